#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "biorag/config.hpp"
#include "biorag/embedding.hpp"
#include "biorag/llm_backend.hpp"
#include "biorag/mesh.hpp"
#include "biorag/orchestrator.hpp"
#include "biorag/retrievers.hpp"
#include "biorag/vector_index.hpp"

namespace biorag {

struct NotReadyError : Error {
    NotReadyError() : Error("engine not ready: no index loaded and PubMedLocal enabled") {}
};

struct AskRequest {
    std::string question;
    std::optional<uint32_t> max_iterations;
    std::optional<AblationFlags> ablation;
};

struct AskResponse {
    std::string answer;
    uint32_t iterations = 0;
    bool exhausted = false;
    std::vector<std::string> trace;  // trace_step_digest per step
};

// Wires the configuration into a runnable pipeline. One engine can serve
// concurrent sessions; the index and cassettes are read-only after startup.
class Engine {
public:
    explicit Engine(EngineConfig config);

    // Index loaded, or the local corpus disabled by ablation.
    bool ready() const;

    AskResponse handle_ask(const AskRequest& req);
    FinalAnswer ask(const AskRequest& req);

    const EngineConfig& config() const { return config_; }
    RetrieverRegistry& retrievers() { return *registry_; }
    LlmBackend& backend() { return *backend_; }

private:
    EngineConfig config_;
    std::unique_ptr<Embedder> embedder_;
    std::optional<MeshVocabulary> vocab_;
    std::unique_ptr<MeshPredictor> mesh_predictor_;
    std::optional<VectorIndex> index_;
    std::unique_ptr<LlmBackend> backend_;
    std::unique_ptr<RetrieverRegistry> registry_;
};

AskResponse ask_response_from(const FinalAnswer& answer);

}  // namespace biorag
