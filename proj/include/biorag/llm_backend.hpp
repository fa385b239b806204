#pragma once

#include <cstddef>
#include <mutex>
#include <string>
#include <vector>

namespace biorag {

// Pluggable completion backend. Implementations must be safe for concurrent
// complete() calls up to their declared concurrency limit.
class LlmBackend {
public:
    virtual ~LlmBackend() = default;
    virtual std::string name() const = 0;
    virtual size_t concurrency_limit() const { return 1; }
    // Throws BackendUnavailableError on transport failure.
    virtual std::string complete(const std::string& prompt) = 0;
};

// Hermetic test backend: an ordered list of replies, one consumed per call.
// Exhausting the script is a test error (std::logic_error). An entry equal
// to kFailMarker simulates a transport failure.
class ScriptedBackend : public LlmBackend {
public:
    static constexpr const char* kFailMarker = "<<FAIL>>";

    explicit ScriptedBackend(std::vector<std::string> replies);

    std::string name() const override { return "scripted"; }
    std::string complete(const std::string& prompt) override;

    size_t calls() const;
    const std::vector<std::string>& prompts_seen() const { return prompts_; }

private:
    std::vector<std::string> replies_;
    std::vector<std::string> prompts_;
    size_t next_ = 0;
    mutable std::mutex mutex_;
};

// POST {"prompt": ...} -> {"completion": ...}; endpoint from config or
// BIORAG_LLM_ENDPOINT.
class RemoteBackend : public LlmBackend {
public:
    explicit RemoteBackend(std::string endpoint, size_t concurrency_limit = 1);

    std::string name() const override { return "remote"; }
    size_t concurrency_limit() const override { return concurrency_limit_; }
    std::string complete(const std::string& prompt) override;

private:
    std::string endpoint_;
    size_t concurrency_limit_;
};

}  // namespace biorag
