#include "biorag/llm_backend.hpp"

#include <stdexcept>

#include "httplib.h"
#include "json.hpp"

#include "biorag/errors.hpp"

namespace biorag {

ScriptedBackend::ScriptedBackend(std::vector<std::string> replies)
    : replies_(std::move(replies)) {}

std::string ScriptedBackend::complete(const std::string& prompt) {
    std::lock_guard<std::mutex> lock(mutex_);
    prompts_.push_back(prompt);
    if (next_ >= replies_.size()) {
        throw std::logic_error("scripted backend exhausted after " +
                               std::to_string(replies_.size()) + " replies");
    }
    std::string reply = replies_[next_++];
    if (reply == kFailMarker) throw BackendUnavailableError("scripted transport failure");
    return reply;
}

size_t ScriptedBackend::calls() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return next_;
}

RemoteBackend::RemoteBackend(std::string endpoint, size_t concurrency_limit)
    : endpoint_(std::move(endpoint)), concurrency_limit_(concurrency_limit) {}

std::string RemoteBackend::complete(const std::string& prompt) {
    httplib::Client client(endpoint_);
    client.set_connection_timeout(30, 0);
    client.set_read_timeout(120, 0);
    nlohmann::json body{{"prompt", prompt}};
    auto res = client.Post("/complete", body.dump(), "application/json");
    if (!res || res->status != 200) {
        throw BackendUnavailableError("llm backend unreachable: " + endpoint_);
    }
    nlohmann::json reply = nlohmann::json::parse(res->body, nullptr, false);
    if (reply.is_discarded() || !reply.contains("completion")) {
        throw BackendUnavailableError("llm backend returned malformed reply");
    }
    return reply["completion"].get<std::string>();
}

}  // namespace biorag
