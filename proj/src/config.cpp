#include "biorag/config.hpp"

#include <cstdlib>
#include <fstream>

#include "biorag/errors.hpp"

namespace biorag {

namespace {

std::string env_or(const char* name, const std::string& fallback) {
    const char* value = std::getenv(name);
    return (value != nullptr && *value != '\0') ? value : fallback;
}

ClientMode parse_client_mode(const std::string& mode) {
    if (mode == "replay") return ClientMode::Replay;
    if (mode == "record") return ClientMode::Record;
    if (mode == "live") return ClientMode::Live;
    throw FormatError("unknown retriever mode: " + mode);
}

MeshPredictorKind parse_predictor_kind(const std::string& kind) {
    if (kind == "scripted") return MeshPredictorKind::Scripted;
    if (kind == "lexical-baseline" || kind == "lexical") return MeshPredictorKind::LexicalBaseline;
    if (kind == "remote") return MeshPredictorKind::Remote;
    throw FormatError("unknown mesh predictor kind: " + kind);
}

}  // namespace

AblationFlags ablation_from_json(const nlohmann::json& j) {
    AblationFlags flags;
    for (const auto& name : j.value("disable_retriever", nlohmann::json::array())) {
        auto id = parse_retriever_name(name.get<std::string>());
        if (!id) throw FormatError("unknown retriever in ablation: " + name.get<std::string>());
        flags.disable_retriever.insert(*id);
    }
    flags.disable_mesh_filter = j.value("disable_mesh_filter", false);
    flags.disable_rewrite = j.value("disable_rewrite", false);
    flags.disable_self_eval = j.value("disable_self_eval", false);
    return flags;
}

nlohmann::ordered_json ablation_to_json(const AblationFlags& flags) {
    nlohmann::ordered_json j;
    j["disable_retriever"] = nlohmann::ordered_json::array();
    for (RetrieverId id : kAllRetrievers) {
        if (flags.disable_retriever.contains(id)) j["disable_retriever"].push_back(retriever_name(id));
    }
    j["disable_mesh_filter"] = flags.disable_mesh_filter;
    j["disable_rewrite"] = flags.disable_rewrite;
    j["disable_self_eval"] = flags.disable_self_eval;
    return j;
}

EngineConfig engine_config_from_json(const nlohmann::json& j) {
    EngineConfig config;
    config.max_iterations = j.value("max_iterations", config.max_iterations);
    config.evidence_budget_chars = j.value("evidence_budget_chars", config.evidence_budget_chars);
    config.mesh_hierarchy_expansion =
        j.value("mesh_hierarchy_expansion", config.mesh_hierarchy_expansion);
    config.strict_scoring = j.value("strict_scoring", config.strict_scoring);
    config.embedder_name = j.value("embedder", config.embedder_name);
    config.index_path = j.value("index_path", config.index_path);
    config.mesh_vocab_path = j.value("mesh_vocab_path", config.mesh_vocab_path);

    if (j.contains("max_results")) {
        const auto& caps = j["max_results"];
        config.caps.entity_db = caps.value("entity_db", config.caps.entity_db);
        config.caps.web_search = caps.value("web_search", config.caps.web_search);
        config.caps.local_corpus = caps.value("local_corpus", config.caps.local_corpus);
    }
    if (j.contains("ablation")) config.ablation = ablation_from_json(j["ablation"]);

    if (j.contains("backend")) {
        const auto& backend = j["backend"];
        std::string kind = backend.value("kind", std::string("scripted"));
        if (kind == "scripted") {
            config.backend.kind = BackendKind::Scripted;
            for (const auto& reply : backend.value("script", nlohmann::json::array())) {
                config.backend.script.push_back(reply.get<std::string>());
            }
        } else if (kind == "remote") {
            config.backend.kind = BackendKind::Remote;
            config.backend.endpoint = backend.value("endpoint", std::string());
            config.backend.concurrency_limit = backend.value("concurrency_limit", size_t{1});
        } else {
            throw FormatError("unknown backend kind: " + kind);
        }
    }

    if (j.contains("mesh_predictor")) {
        const auto& predictor = j["mesh_predictor"];
        config.mesh_predictor.kind =
            parse_predictor_kind(predictor.value("kind", std::string("lexical-baseline")));
        config.mesh_predictor.name = predictor.value("name", std::string("mesh-predictor"));
        config.mesh_predictor.fixture_path = predictor.value("fixture", std::string());
        config.mesh_predictor.endpoint = predictor.value("endpoint", std::string());
    }

    if (j.contains("retrievers")) {
        const auto& retr = j["retrievers"];
        config.retrievers.mode = parse_client_mode(retr.value("mode", std::string("replay")));
        config.retrievers.entity_cassette_path = retr.value("entity_cassette", std::string());
        config.retrievers.web_cassette_path = retr.value("web_cassette", std::string());
        config.retrievers.eutils_endpoint =
            retr.value("eutils_endpoint", config.retrievers.eutils_endpoint);
        config.retrievers.search_provider = retr.value("search_provider", std::string());
        config.retrievers.search_endpoint = retr.value("search_endpoint", std::string());
        config.retrievers.rate_limit_per_sec =
            retr.value("rate_limit_per_sec", config.retrievers.rate_limit_per_sec);
        config.retrievers.snippet_cap = retr.value("snippet_cap", config.retrievers.snippet_cap);
    }
    return config;
}

EngineConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("invalid config file " + path + ": " + e.what());
    }
    EngineConfig config = engine_config_from_json(j);
    apply_env_overrides(config);
    return config;
}

void apply_env_overrides(EngineConfig& config) {
    config.backend.endpoint = env_or("BIORAG_LLM_ENDPOINT", config.backend.endpoint);
    config.mesh_predictor.endpoint = env_or("BIORAG_MESH_ENDPOINT", config.mesh_predictor.endpoint);
    config.retrievers.ncbi_api_key = env_or("BIORAG_NCBI_API_KEY", config.retrievers.ncbi_api_key);
    config.retrievers.search_api_key =
        env_or("BIORAG_SEARCH_API_KEY", config.retrievers.search_api_key);
    config.retrievers.search_provider =
        env_or("BIORAG_SEARCH_PROVIDER", config.retrievers.search_provider);
}

}  // namespace biorag
