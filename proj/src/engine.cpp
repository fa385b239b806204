#include "biorag/engine.hpp"

namespace biorag {

Engine::Engine(EngineConfig config) : config_(std::move(config)) {
    embedder_ = make_embedder(config_.embedder_name);

    if (!config_.mesh_vocab_path.empty()) {
        vocab_ = MeshVocabulary::load_file(config_.mesh_vocab_path);
        mesh_predictor_ = make_mesh_predictor(config_.mesh_predictor);
    }
    if (!config_.index_path.empty()) {
        index_ = VectorIndex::load_file(config_.index_path);
    }

    switch (config_.backend.kind) {
        case BackendKind::Scripted:
            backend_ = std::make_unique<ScriptedBackend>(config_.backend.script);
            break;
        case BackendKind::Remote:
            if (config_.backend.endpoint.empty()) {
                throw BackendUnavailableError("remote backend requires an endpoint");
            }
            backend_ = std::make_unique<RemoteBackend>(config_.backend.endpoint,
                                                       config_.backend.concurrency_limit);
            break;
    }

    registry_ = std::make_unique<RetrieverRegistry>(
        config_.retrievers, config_.caps, index_ ? &*index_ : nullptr, embedder_.get());
}

bool Engine::ready() const {
    if (index_.has_value()) return true;
    return config_.ablation.disable_retriever.contains(RetrieverId::PubMedLocal);
}

FinalAnswer Engine::ask(const AskRequest& req) {
    if (!ready()) throw NotReadyError();

    OrchestratorConfig orc;
    orc.max_iterations = req.max_iterations.value_or(config_.max_iterations);
    orc.evidence_budget_chars = config_.evidence_budget_chars;
    orc.ablation = req.ablation.value_or(config_.ablation);
    orc.mesh_hierarchy_expansion = config_.mesh_hierarchy_expansion;

    Orchestrator orchestrator(orc, *backend_, *registry_, mesh_predictor_.get(),
                              vocab_ ? &*vocab_ : nullptr);
    return orchestrator.run_session(req.question);
}

AskResponse ask_response_from(const FinalAnswer& answer) {
    AskResponse response;
    response.answer = answer.text;
    response.iterations = answer.iterations_used;
    response.exhausted = answer.exhausted;
    for (const TraceStep& step : answer.trace) {
        response.trace.push_back(trace_step_digest(step));
    }
    return response;
}

AskResponse Engine::handle_ask(const AskRequest& req) {
    return ask_response_from(ask(req));
}

}  // namespace biorag
