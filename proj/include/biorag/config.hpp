#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "biorag/mesh.hpp"
#include "biorag/orchestrator.hpp"
#include "biorag/retrievers.hpp"

namespace biorag {

enum class BackendKind { Scripted, Remote };

struct BackendConfig {
    BackendKind kind = BackendKind::Scripted;
    std::vector<std::string> script;  // scripted replies, consumed in order
    std::string endpoint;             // remote; env BIORAG_LLM_ENDPOINT overrides
    size_t concurrency_limit = 1;
};

// One declarative configuration tree. Environment variables override file
// values (BIORAG_LLM_ENDPOINT, BIORAG_EMBED_ENDPOINT, BIORAG_MESH_ENDPOINT,
// BIORAG_NCBI_API_KEY, BIORAG_SEARCH_API_KEY, BIORAG_SEARCH_PROVIDER).
struct EngineConfig {
    uint32_t max_iterations = 15;
    size_t evidence_budget_chars = 8000;
    ResultCaps caps;  // 10 entity / 10 web / 4 local
    AblationFlags ablation;
    bool mesh_hierarchy_expansion = false;

    BackendConfig backend;
    MeshPredictorSpec mesh_predictor;
    std::string embedder_name = "ref256";

    std::string index_path;
    std::string mesh_vocab_path;
    RetrieverClientConfig retrievers;

    bool strict_scoring = false;
};

AblationFlags ablation_from_json(const nlohmann::json& j);
nlohmann::ordered_json ablation_to_json(const AblationFlags& flags);

EngineConfig engine_config_from_json(const nlohmann::json& j);
EngineConfig load_config_file(const std::string& path);

// Applies the BIORAG_* environment overrides in place.
void apply_env_overrides(EngineConfig& config);

}  // namespace biorag
