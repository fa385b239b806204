#include "biorag/orchestrator.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <sstream>

#include "biorag/embedding.hpp"
#include "biorag/errors.hpp"

namespace biorag {

const char* kNoEvidenceMarker = "[no evidence retrieved]";

namespace {

std::string trim_copy(const std::string& s) {
    size_t begin = s.find_first_not_of(" \t\n\r\f\v");
    if (begin == std::string::npos) return "";
    size_t end = s.find_last_not_of(" \t\n\r\f\v");
    return s.substr(begin, end - begin + 1);
}

int64_t now_ms() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

std::string first_alpha_token(const std::string& text) {
    std::string token;
    for (char c : text) {
        if (std::isalpha(static_cast<unsigned char>(c))) {
            token.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else if (!token.empty()) {
            break;
        }
    }
    return token;
}

std::string evidence_item_line(const EvidenceItem& item) {
    return std::string("— [") + retriever_name(item.source) + ":" + item.locator + "] " +
           item.title + ": " + item.snippet;
}

std::string evidence_set_text(const EvidenceSet& set) {
    std::ostringstream out;
    out << retriever_name(set.request.retriever) << " results for \"" << set.request.query
        << "\" (max " << set.request.max_results << "): " << set.items.size() << " items";
    for (const EvidenceItem& item : set.items) out << '\n' << evidence_item_line(item);
    return out.str();
}

}  // namespace

const char* phase_name(Phase phase) {
    switch (phase) {
        case Phase::Select: return "Select";
        case Phase::Rewrite: return "Rewrite";
        case Phase::Execute: return "Execute";
        case Phase::Evaluate: return "Evaluate";
        case Phase::Generate: return "Generate";
    }
    return "?";
}

std::string digest(std::string_view text) {
    uint64_t h = fnv1a64(text);
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string trace_step_digest(const TraceStep& step) {
    std::string out = std::to_string(step.iteration) + ":" + phase_name(step.phase) + ":" +
                      step.input_digest + ":" + step.output_digest;
    if (!step.note.empty()) out += ":" + step.note;
    return out;
}

Orchestrator::Orchestrator(OrchestratorConfig config, LlmBackend& backend,
                           RetrieverRegistry& retrievers, MeshPredictor* mesh_predictor,
                           const MeshVocabulary* vocab)
    : config_(std::move(config)),
      backend_(backend),
      retrievers_(retrievers),
      mesh_predictor_(mesh_predictor),
      vocab_(vocab) {}

AgentState Orchestrator::make_state(const std::string& question) const {
    AgentState state;
    state.question = question;
    state.max_iterations = config_.max_iterations;
    state.ablation = config_.ablation;
    return state;
}

void Orchestrator::record(AgentState& state, Phase phase, const std::string& input,
                          const std::string& output, const std::string& note) const {
    state.trace.push_back(
        TraceStep{state.iteration, phase, digest(input), digest(output), now_ms(), note});
}

std::vector<RetrieverId> Orchestrator::enabled_retrievers(const AgentState& state) const {
    std::vector<RetrieverId> enabled;
    for (RetrieverId id : kAllRetrievers) {
        if (!state.ablation.disable_retriever.contains(id)) enabled.push_back(id);
    }
    return enabled;
}

std::string Orchestrator::render_evidence(const std::vector<EvidenceSet>& evidence,
                                          size_t budget) {
    std::vector<std::string> lines;
    for (const EvidenceSet& set : evidence) {
        for (const EvidenceItem& item : set.items) lines.push_back(evidence_item_line(item));
    }
    size_t total = 0;
    for (const std::string& line : lines) total += line.size() + 1;
    size_t first = 0;
    while (first < lines.size() && total > budget) {
        total -= lines[first].size() + 1;
        ++first;  // oldest-first eviction
    }
    std::string out;
    for (size_t i = first; i < lines.size(); ++i) {
        if (!out.empty()) out.push_back('\n');
        out += lines[i];
    }
    if (out.size() > budget) out.resize(budget);
    return out;
}

RetrieverId Orchestrator::select_retriever(AgentState& state) {
    std::vector<RetrieverId> enabled = enabled_retrievers(state);
    if (enabled.empty()) throw NoRetrieversEnabledError();

    std::ostringstream methods;
    for (RetrieverId id : enabled) {
        const RetrieverManual& manual = manual_for(id);
        methods << "Manual #" << retriever_display_name(id) << ": " << manual.manual_text << "\n";
    }
    if (!state.tried.empty()) {
        methods << "\nPreviously tried (retrieval method: query):\n";
        for (const auto& [id, query] : state.tried) {
            methods << "- " << retriever_display_name(id) << ": " << query << "\n";
        }
    }

    std::string prompt = render_prompt(prompt_template(PromptId::P1),
                                       {{"Question", state.question},
                                        {"Retrieval", methods.str()}});

    std::string note;
    for (int attempt = 0; attempt < 2; ++attempt) {
        std::string ask = prompt;
        if (attempt == 1) {
            ask += "\nYour previous reply did not name one of the RETRIEVAL METHODS above. "
                   "Reply with exactly one method name.";
            note = "re-prompted after unusable selection reply";
        }
        std::string reply = backend_.complete(ask);
        std::optional<RetrieverId> choice = match_retriever_mention(reply);
        if (choice && std::find(enabled.begin(), enabled.end(), *choice) != enabled.end()) {
            record(state, Phase::Select, prompt, retriever_display_name(*choice), note);
            return *choice;
        }
    }
    record(state, Phase::Select, prompt, "", "selection failed");
    throw SelectionFailedError("backend did not name an enabled retrieval method");
}

std::string Orchestrator::rewrite_query(AgentState& state, RetrieverId retriever) {
    if (state.ablation.disable_rewrite) {
        record(state, Phase::Rewrite, state.question, state.question, "rewrite disabled (C2)");
        return state.question;
    }

    const RetrieverManual& manual = manual_for(retriever);
    std::string prompt = render_prompt(prompt_template(PromptId::P2),
                                       {{"Retrieval", manual.manual_text},
                                        {"Question", state.question}});
    std::string reply = trim_copy(backend_.complete(prompt));
    if (reply.empty()) {
        record(state, Phase::Rewrite, prompt, state.question,
               "empty rewrite reply; fell back to the original question");
        return state.question;
    }
    record(state, Phase::Rewrite, prompt, reply);
    return reply;
}

EvidenceSet Orchestrator::execute_retrieval(AgentState& state, RetrieverId retriever,
                                            const std::string& rewritten) {
    RetrievalRequest req;
    req.retriever = retriever;
    req.query = rewritten;
    req.max_results = retrievers_.default_max_results(retriever);

    std::string filter_text = "direct lookup";
    std::string note;
    if (retriever == RetrieverId::PubMedLocal) {
        MeshFilter filter = MeshFilter::match_all();
        if (state.ablation.disable_mesh_filter) {
            note = "mesh filter disabled (C1)";
        } else if (mesh_predictor_ != nullptr && vocab_ != nullptr) {
            try {
                std::vector<std::string> labels =
                    predict_mesh(*mesh_predictor_, state.question, *vocab_);
                if (config_.mesh_hierarchy_expansion) {
                    labels = vocab_->expand_with_descendants(labels);
                }
                filter = build_filter(labels);
            } catch (const BackendUnavailableError& e) {
                // degrade to pure vector search rather than aborting the loop
                note = std::string("mesh predictor failed; match-all filter: ") + e.what();
            }
        } else {
            note = "no mesh predictor configured; match-all filter";
        }
        req.filter = filter;
        filter_text = filter.describe();
    }

    // Prompt #3 describes the deterministic query+filter combination; it is
    // recorded as the Execute input rather than sent to the backend.
    std::string combine = render_prompt(prompt_template(PromptId::P3),
                                        {{"Query", rewritten}, {"Retrieval", filter_text}});

    EvidenceSet set;
    try {
        set = retrievers_.execute(req);
    } catch (const RetrieverFailureError& e) {
        set.request = req;
        set.fetched_at_ms = now_ms();
        note = note.empty() ? e.what() : note + "; " + e.what();
    }

    state.evidence.push_back(set);
    state.tried.emplace_back(retriever, rewritten);
    record(state, Phase::Execute, combine, evidence_set_text(set), note);
    return set;
}

bool Orchestrator::self_evaluate(AgentState& state) {
    if (state.ablation.disable_self_eval) {
        record(state, Phase::Evaluate, "", "YES", "self-evaluation disabled (C3)");
        return true;
    }

    std::string results = render_evidence(state.evidence, config_.evidence_budget_chars);
    if (results.empty()) results = kNoEvidenceMarker;
    std::string prompt = render_prompt(prompt_template(PromptId::P4),
                                       {{"Results", results}, {"Question", state.question}});
    std::string reply = backend_.complete(prompt);

    std::string token = first_alpha_token(reply);
    if (token == "yes") {
        record(state, Phase::Evaluate, prompt, reply);
        return true;
    }
    std::string note;
    if (token != "no") note = "unparseable evaluation reply treated as NO";
    record(state, Phase::Evaluate, prompt, reply, note);
    return false;
}

std::string Orchestrator::generate_answer(AgentState& state) {
    std::string results = render_evidence(state.evidence, config_.evidence_budget_chars);
    if (results.empty()) results = kNoEvidenceMarker;
    std::string prompt = render_prompt(prompt_template(PromptId::P5),
                                       {{"Results", results}, {"Question", state.question}});
    std::string reply;
    try {
        reply = backend_.complete(prompt);
    } catch (const BackendUnavailableError& e) {
        record(state, Phase::Generate, prompt, "", "generation failed");
        throw GenerationFailedError(e.what());
    }
    record(state, Phase::Generate, prompt, reply);
    return reply;
}

FinalAnswer Orchestrator::run_session(const std::string& question) {
    if (trim_copy(question).empty()) throw EmptyInputError("empty question");

    AgentState state = make_state(question);
    for (;;) {
        state.iteration++;

        RetrieverId retriever;
        try {
            retriever = select_retriever(state);
        } catch (const SelectionFailedError& e) {
            FinalAnswer failed;
            failed.text = std::string("error: ") + e.what();
            failed.iterations_used = state.iteration;
            failed.exhausted = false;
            failed.trace = std::move(state.trace);
            return failed;
        } catch (const NoRetrieversEnabledError& e) {
            FinalAnswer failed;
            failed.text = std::string("error: ") + e.what();
            failed.iterations_used = state.iteration;
            failed.exhausted = false;
            failed.trace = std::move(state.trace);
            return failed;
        }

        std::string rewritten = rewrite_query(state, retriever);
        execute_retrieval(state, retriever, rewritten);
        bool sufficient = self_evaluate(state);

        if (sufficient || state.iteration >= state.max_iterations) {
            FinalAnswer answer;
            answer.text = generate_answer(state);
            answer.iterations_used = state.iteration;
            answer.exhausted = !sufficient;
            answer.trace = std::move(state.trace);
            return answer;
        }
    }
}

}  // namespace biorag
