#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "biorag/llm_backend.hpp"
#include "biorag/mesh.hpp"
#include "biorag/prompts.hpp"
#include "biorag/retrievers.hpp"

namespace biorag {

// Component switches for the ablation experiments: D-flags drop information
// sources from selection, C1 turns the MeSH filter off, C2 the query rewrite,
// C3 the self-evaluation loop.
struct AblationFlags {
    std::set<RetrieverId> disable_retriever;
    bool disable_mesh_filter = false;  // C1
    bool disable_rewrite = false;      // C2
    bool disable_self_eval = false;    // C3
};

enum class Phase { Select, Rewrite, Execute, Evaluate, Generate };
const char* phase_name(Phase phase);

// One audit entry. Appended in chronological order, never mutated.
// Timestamps are excluded from determinism comparisons.
struct TraceStep {
    uint32_t iteration = 0;
    Phase phase = Phase::Select;
    std::string input_digest;
    std::string output_digest;
    int64_t timestamp_ms = 0;
    std::string note;  // warnings and ablation markers; empty normally
};

struct AgentState {
    std::string question;
    uint32_t iteration = 0;
    uint32_t max_iterations = 15;
    std::vector<std::pair<RetrieverId, std::string>> tried;
    std::vector<EvidenceSet> evidence;
    AblationFlags ablation;
    std::vector<TraceStep> trace;
};

struct FinalAnswer {
    std::string text;
    uint32_t iterations_used = 0;
    bool exhausted = false;  // true iff the iteration cap was reached
    std::vector<TraceStep> trace;
};

struct OrchestratorConfig {
    uint32_t max_iterations = 15;
    size_t evidence_budget_chars = 8000;
    AblationFlags ablation;
    // Off by default: predicted labels match descendants in the MeSH tree too.
    bool mesh_hierarchy_expansion = false;
};

// FNV-1a 64 hex of the text; used for trace digests.
std::string digest(std::string_view text);

// "<iteration>:<phase>:<input_digest>:<output_digest>[:<note>]"; the
// timestamp is deliberately excluded so runs are comparable.
std::string trace_step_digest(const TraceStep& step);

// Marker substituted for the {Results} slot when nothing was retrieved.
extern const char* kNoEvidenceMarker;

// The five-step loop: Select -> Rewrite -> Execute -> Evaluate, cycling until
// the evaluation passes or the iteration cap forces a Generate. One full
// cycle counts as one iteration, so the cap bounds self-evaluations.
class Orchestrator {
public:
    Orchestrator(OrchestratorConfig config, LlmBackend& backend, RetrieverRegistry& retrievers,
                 MeshPredictor* mesh_predictor = nullptr, const MeshVocabulary* vocab = nullptr);

    FinalAnswer run_session(const std::string& question);

    // Phase operations, public so tests can drive them individually.
    RetrieverId select_retriever(AgentState& state);
    std::string rewrite_query(AgentState& state, RetrieverId retriever);
    EvidenceSet execute_retrieval(AgentState& state, RetrieverId retriever,
                                  const std::string& rewritten);
    bool self_evaluate(AgentState& state);
    std::string generate_answer(AgentState& state);

    AgentState make_state(const std::string& question) const;

    // "— [source:locator] title: snippet" lines, oldest evicted first once
    // the character budget is exceeded.
    static std::string render_evidence(const std::vector<EvidenceSet>& evidence, size_t budget);

private:
    OrchestratorConfig config_;
    LlmBackend& backend_;
    RetrieverRegistry& retrievers_;
    MeshPredictor* mesh_predictor_;
    const MeshVocabulary* vocab_;

    std::vector<RetrieverId> enabled_retrievers(const AgentState& state) const;
    void record(AgentState& state, Phase phase, const std::string& input,
                const std::string& output, const std::string& note = "") const;
};

}  // namespace biorag
