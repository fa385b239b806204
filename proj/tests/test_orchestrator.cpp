#include "doctest.h"

#include <memory>
#include <random>

#include "biorag/errors.hpp"
#include "biorag/orchestrator.hpp"
#include "biorag/vector_index.hpp"
#include "test_util.hpp"

using namespace biorag;

namespace {

const char* kImmunityQuestion =
    "What are the differences between innate immunity and adaptive immunity?";

// Full replay harness: fixture vocabulary, scripted MeSH predictor, fixture
// corpus index, replay cassettes.
struct Harness {
    ReferenceEmbedder embedder;
    MeshVocabulary vocab;
    ScriptedMeshPredictor predictor;
    VectorIndex index;
    RetrieverRegistry registry;

    Harness()
        : vocab(MeshVocabulary::load_file(testutil::fixture_path("mesh_vocab.tsv"))),
          predictor(ScriptedMeshPredictor::load_file(testutil::fixture_path("mesh_scripted.jsonl"))),
          index(build_index()),
          registry(replay_config(), ResultCaps{}, &index, &embedder) {}

    static RetrieverClientConfig replay_config() {
        RetrieverClientConfig config;
        config.mode = ClientMode::Replay;
        config.entity_cassette_path = testutil::fixture_path("cassettes/entity.jsonl");
        config.web_cassette_path = testutil::fixture_path("cassettes/web.jsonl");
        return config;
    }

    static VectorIndex build_index() {
        std::ifstream in(testutil::fixture_path("corpus_small.jsonl"));
        ReferenceEmbedder embedder;
        return VectorIndex::build(load_corpus(in), embedder);
    }

    Orchestrator make(ScriptedBackend& backend, OrchestratorConfig config = {}) {
        return Orchestrator(config, backend, registry, &predictor, &vocab);
    }
};

std::vector<std::string> phases_of(const std::vector<TraceStep>& trace) {
    std::vector<std::string> out;
    for (const TraceStep& step : trace) out.push_back(phase_name(step.phase));
    return out;
}

}  // namespace

TEST_SUITE("orchestrator") {

TEST_CASE("select_retriever maps scripted replies to retriever ids") {
    Harness h;
    ScriptedBackend backend({"PubMed local vector database"});
    Orchestrator orchestrator = h.make(backend);
    AgentState state = orchestrator.make_state(kImmunityQuestion);
    state.iteration = 1;
    CHECK(orchestrator.select_retriever(state) == RetrieverId::PubMedLocal);
}

TEST_CASE("select_retriever re-prompts past disabled retrievers") {
    Harness h;
    ScriptedBackend backend({"Gene", "Web Search"});
    OrchestratorConfig config;
    config.ablation.disable_retriever = {RetrieverId::Gene};
    Orchestrator orchestrator = h.make(backend, config);
    AgentState state = orchestrator.make_state("q");
    state.iteration = 1;
    CHECK(orchestrator.select_retriever(state) == RetrieverId::WebSearch);
    CHECK(backend.calls() == 2);
    // disabled manuals never rendered into P1
    CHECK(backend.prompts_seen()[0].find("Manual #Gene") == std::string::npos);
    CHECK(backend.prompts_seen()[0].find("Manual #Web Search") != std::string::npos);
}

TEST_CASE("select_retriever fails after two unusable replies") {
    Harness h;
    ScriptedBackend backend({"FooDB", "BarDB"});
    Orchestrator orchestrator = h.make(backend);
    AgentState state = orchestrator.make_state("q");
    state.iteration = 1;
    CHECK_THROWS_AS(orchestrator.select_retriever(state), SelectionFailedError);
}

TEST_CASE("all retrievers disabled is an error") {
    Harness h;
    ScriptedBackend backend({});
    OrchestratorConfig config;
    for (RetrieverId id : kAllRetrievers) config.ablation.disable_retriever.insert(id);
    Orchestrator orchestrator = h.make(backend, config);
    AgentState state = orchestrator.make_state("q");
    CHECK_THROWS_AS(orchestrator.select_retriever(state), NoRetrieversEnabledError);
}

TEST_CASE("rewrite_query returns the scripted rewrite verbatim") {
    Harness h;
    ScriptedBackend backend({"official symbol of gene LMP10"});
    Orchestrator orchestrator = h.make(backend);
    AgentState state = orchestrator.make_state("What is the official gene symbol of LMP10?");
    state.iteration = 1;
    CHECK(orchestrator.rewrite_query(state, RetrieverId::Gene) ==
          "official symbol of gene LMP10");
    // P2 carries the selected manual (with its input requirements)
    CHECK(backend.prompts_seen()[0].find("the input must be a specific gene name") !=
          std::string::npos);
}

TEST_CASE("rewrite disabled (C2) returns the question without a backend call") {
    Harness h;
    ScriptedBackend backend({});
    OrchestratorConfig config;
    config.ablation.disable_rewrite = true;
    Orchestrator orchestrator = h.make(backend, config);
    AgentState state = orchestrator.make_state("the original question");
    state.iteration = 1;
    CHECK(orchestrator.rewrite_query(state, RetrieverId::Gene) == "the original question");
    CHECK(backend.calls() == 0);
    CHECK(state.trace.back().note == "rewrite disabled (C2)");
}

TEST_CASE("empty rewrite reply falls back to the question with a trace warning") {
    Harness h;
    ScriptedBackend backend({"   "});
    Orchestrator orchestrator = h.make(backend);
    AgentState state = orchestrator.make_state("fallback question");
    state.iteration = 1;
    CHECK(orchestrator.rewrite_query(state, RetrieverId::WebSearch) == "fallback question");
    CHECK(state.trace.back().note.find("empty rewrite reply") != std::string::npos);
}

TEST_CASE("local retrieval restricts hits to predicted MeSH terms") {
    Harness h;
    ScriptedBackend backend({});
    Orchestrator orchestrator = h.make(backend);
    AgentState state = orchestrator.make_state(kImmunityQuestion);
    state.iteration = 1;

    EvidenceSet set =
        orchestrator.execute_retrieval(state, RetrieverId::PubMedLocal, kImmunityQuestion);
    REQUIRE_FALSE(set.items.empty());
    CHECK(set.items.size() <= 4);
    const std::vector<std::string> predicted = {"Adaptive Immunity", "Animals",
                                                "Immunity, Innate"};
    for (const EvidenceItem& item : set.items) {
        const IndexedDocument* doc = h.index.find(item.locator);
        REQUIRE(doc != nullptr);
        bool tagged = false;
        for (const std::string& term : doc->doc.mesh) {
            for (const std::string& want : predicted) {
                if (term == want) tagged = true;
            }
        }
        CHECK(tagged);
    }
    CHECK(state.evidence.size() == 1);
    CHECK(state.tried.size() == 1);
}

TEST_CASE("mesh filter disabled (C1) equals unfiltered brute-force top-4") {
    Harness h;
    ScriptedBackend backend({});
    OrchestratorConfig config;
    config.ablation.disable_mesh_filter = true;
    Orchestrator orchestrator = h.make(backend, config);
    AgentState state = orchestrator.make_state(kImmunityQuestion);
    state.iteration = 1;

    EvidenceSet set =
        orchestrator.execute_retrieval(state, RetrieverId::PubMedLocal, kImmunityQuestion);

    std::vector<std::pair<CleanDocument, EmbeddingVector>> pairs;
    for (const IndexedDocument& item : h.index.documents()) {
        pairs.emplace_back(item.doc, item.vector);
    }
    auto oracle = testutil::oracle_search(pairs, h.embedder.embed(kImmunityQuestion), {}, 4);
    REQUIRE(set.items.size() == oracle.size());
    for (size_t i = 0; i < oracle.size(); ++i) {
        CHECK(set.items[i].locator == oracle[i].id);
        CHECK(*set.items[i].score == doctest::Approx(oracle[i].score).epsilon(1e-12));
    }
}

TEST_CASE("retriever failure is absorbed as empty evidence") {
    Harness h;
    ScriptedBackend backend({});
    Orchestrator orchestrator = h.make(backend);
    AgentState state = orchestrator.make_state("q");
    state.iteration = 1;
    EvidenceSet set = orchestrator.execute_retrieval(state, RetrieverId::Gene, "NOT_RECORDED");
    CHECK(set.items.empty());
    CHECK(state.evidence.size() == 1);
    CHECK(state.trace.back().note.find("CassetteMiss") != std::string::npos);
}

TEST_CASE("self_evaluate parses the first alphabetic token") {
    Harness h;
    ScriptedBackend backend({"YES", "no, the evidence is thin", "perhaps"});
    Orchestrator orchestrator = h.make(backend);
    AgentState state = orchestrator.make_state("q");
    state.iteration = 1;

    CHECK(orchestrator.self_evaluate(state));
    CHECK_FALSE(orchestrator.self_evaluate(state));
    CHECK(state.trace.back().note.empty());
    CHECK_FALSE(orchestrator.self_evaluate(state));
    CHECK(state.trace.back().note == "unparseable evaluation reply treated as NO");
}

TEST_CASE("self-evaluation disabled (C3) passes without a backend call") {
    Harness h;
    ScriptedBackend backend({});
    OrchestratorConfig config;
    config.ablation.disable_self_eval = true;
    Orchestrator orchestrator = h.make(backend, config);
    AgentState state = orchestrator.make_state("q");
    state.iteration = 1;
    CHECK(orchestrator.self_evaluate(state));
    CHECK(backend.calls() == 0);
}

TEST_CASE("generate_answer returns the scripted answer") {
    Harness h;
    ScriptedBackend backend({"PSMB10"});
    Orchestrator orchestrator = h.make(backend);
    AgentState state = orchestrator.make_state("q");
    state.iteration = 1;
    EvidenceSet set;
    set.request.retriever = RetrieverId::Gene;
    EvidenceItem item;
    item.source = RetrieverId::Gene;
    item.title = "PSMB10";
    item.snippet = "immunoproteasome subunit";
    item.locator = "gene:5699";
    set.items.push_back(item);
    state.evidence.push_back(set);
    CHECK(orchestrator.generate_answer(state) == "PSMB10");
    CHECK(backend.prompts_seen()[0].find("[Gene:gene:5699] PSMB10") != std::string::npos);
}

TEST_CASE("generate_answer marks empty evidence explicitly") {
    Harness h;
    ScriptedBackend backend({"nothing to go on"});
    Orchestrator orchestrator = h.make(backend);
    AgentState state = orchestrator.make_state("q");
    state.iteration = 1;
    orchestrator.generate_answer(state);
    CHECK(backend.prompts_seen()[0].find(kNoEvidenceMarker) != std::string::npos);
}

TEST_CASE("generate_answer surfaces backend failure as GenerationFailed") {
    Harness h;
    ScriptedBackend backend({ScriptedBackend::kFailMarker});
    Orchestrator orchestrator = h.make(backend);
    AgentState state = orchestrator.make_state("q");
    state.iteration = 1;
    CHECK_THROWS_AS(orchestrator.generate_answer(state), GenerationFailedError);
}

TEST_CASE("two-cycle session: web insufficient, local corpus sufficient") {
    Harness h;
    ScriptedBackend backend({
        "Web Search",                             // iteration 1: select
        "innate vs adaptive immunity overview",   // rewrite
        "NO",                                     // evaluate -> insufficient
        "PubMed local vector database",           // iteration 2: select
        kImmunityQuestion,                        // rewrite
        "YES",                                    // evaluate -> sufficient
        "Adaptive immunity is antigen-specific and slower; innate immunity is immediate.",
    });
    Orchestrator orchestrator = h.make(backend);
    FinalAnswer answer = orchestrator.run_session(kImmunityQuestion);

    CHECK(answer.iterations_used == 2);
    CHECK_FALSE(answer.exhausted);
    CHECK(answer.text.find("antigen-specific") != std::string::npos);

    size_t selects = 0;
    for (const TraceStep& step : answer.trace) {
        if (step.phase == Phase::Select) ++selects;
    }
    CHECK(selects == 2);
    CHECK(phases_of(answer.trace) ==
          std::vector<std::string>{"Select", "Rewrite", "Execute", "Evaluate", "Select",
                                   "Rewrite", "Execute", "Evaluate", "Generate"});
    // second P1 lists the previously tried pair
    CHECK(backend.prompts_seen()[3].find("Previously tried") != std::string::npos);
    CHECK(backend.prompts_seen()[3].find("innate vs adaptive immunity overview") !=
          std::string::npos);
}

TEST_CASE("always-NO script exhausts the 15-iteration cap and still answers") {
    Harness h;
    std::vector<std::string> script;
    for (int i = 0; i < 15; ++i) {
        script.push_back("Web Search");
        script.push_back("query that is not in any cassette");
        script.push_back("NO");
    }
    script.push_back("best-effort answer");
    ScriptedBackend backend(script);
    Orchestrator orchestrator = h.make(backend);
    FinalAnswer answer = orchestrator.run_session("unanswerable question");

    CHECK(answer.iterations_used == 15);
    CHECK(answer.exhausted);
    CHECK(answer.text == "best-effort answer");
    CHECK(backend.calls() == 46);
}

TEST_CASE("sufficient on the first evaluation uses one iteration") {
    Harness h;
    ScriptedBackend backend({"PubMed local vector database", kImmunityQuestion, "YES", "done"});
    Orchestrator orchestrator = h.make(backend);
    FinalAnswer answer = orchestrator.run_session(kImmunityQuestion);
    CHECK(answer.iterations_used == 1);
    CHECK_FALSE(answer.exhausted);
}

TEST_CASE("C3 forces a single iteration on every input") {
    Harness h;
    OrchestratorConfig config;
    config.ablation.disable_self_eval = true;
    for (const char* question : {kImmunityQuestion, "anything else", "third question"}) {
        ScriptedBackend backend({"Web Search", "some rewrite", "the answer"});
        Orchestrator orchestrator = h.make(backend, config);
        FinalAnswer answer = orchestrator.run_session(question);
        CHECK(answer.iterations_used == 1);
    }
}

TEST_CASE("selection failure yields an error answer with the trace preserved") {
    Harness h;
    ScriptedBackend backend({"FooDB", "BarDB"});
    Orchestrator orchestrator = h.make(backend);
    FinalAnswer answer = orchestrator.run_session("q");
    CHECK(answer.text.rfind("error:", 0) == 0);
    CHECK_FALSE(answer.exhausted);
    CHECK_FALSE(answer.trace.empty());
}

TEST_CASE("empty question is rejected") {
    Harness h;
    ScriptedBackend backend({});
    Orchestrator orchestrator = h.make(backend);
    CHECK_THROWS_AS(orchestrator.run_session("   "), EmptyInputError);
}

TEST_CASE("trace digests are deterministic for a fixed script") {
    Harness h;
    auto run = [&] {
        ScriptedBackend backend({"Web Search",
                                 "innate vs adaptive immunity overview", "NO",
                                 "PubMed local vector database", kImmunityQuestion, "YES",
                                 "final"});
        Orchestrator orchestrator = h.make(backend);
        FinalAnswer answer = orchestrator.run_session(kImmunityQuestion);
        std::string combined;
        for (const TraceStep& step : answer.trace) combined += trace_step_digest(step) + "\n";
        return combined;
    };
    CHECK(run() == run());
}

TEST_CASE("termination holds for adversarial scripted backends") {
    Harness h;
    std::mt19937 rng(1234);
    const char* pool[] = {"Web Search", "Gene", "PubMed local vector database", "FooDB",
                          "garbage reply", "YES", "NO", "perhaps", "", "tp53",
                          "dbSNP", "Protein", "==", "yes and no"};
    for (int round = 0; round < 40; ++round) {
        std::vector<std::string> script;
        for (int i = 0; i < 70; ++i) script.push_back(pool[rng() % std::size(pool)]);
        ScriptedBackend backend(script);
        Orchestrator orchestrator = h.make(backend);
        FinalAnswer answer = orchestrator.run_session("a question");
        CHECK(answer.iterations_used <= 15);
        CHECK(answer.iterations_used >= 1);
    }
}

TEST_CASE("phase ordering holds across random successful sessions") {
    Harness h;
    std::mt19937 rng(555);
    for (int round = 0; round < 20; ++round) {
        uint32_t cycles = 1 + rng() % 5;
        std::vector<std::string> script;
        for (uint32_t i = 0; i < cycles; ++i) {
            script.push_back("Web Search");
            script.push_back("a rewritten query");
            script.push_back(i + 1 == cycles ? "YES" : "NO");
        }
        script.push_back("answer");
        ScriptedBackend backend(script);
        Orchestrator orchestrator = h.make(backend);
        FinalAnswer answer = orchestrator.run_session("q");

        REQUIRE(answer.trace.size() == cycles * 4 + 1);
        for (uint32_t i = 0; i < cycles; ++i) {
            CHECK(answer.trace[i * 4 + 0].phase == Phase::Select);
            CHECK(answer.trace[i * 4 + 1].phase == Phase::Rewrite);
            CHECK(answer.trace[i * 4 + 2].phase == Phase::Execute);
            CHECK(answer.trace[i * 4 + 3].phase == Phase::Evaluate);
            for (int p = 0; p < 4; ++p) CHECK(answer.trace[i * 4 + p].iteration == i + 1);
        }
        CHECK(answer.trace.back().phase == Phase::Generate);
        CHECK(answer.iterations_used == cycles);
    }
}

TEST_CASE("evidence accumulates monotonically across iterations") {
    Harness h;
    ScriptedBackend backend({"Web Search", "miss one", "NO",
                             "Gene", "TP53", "NO",
                             "PubMed local vector database", kImmunityQuestion, "YES",
                             "done"});
    Orchestrator orchestrator = h.make(backend);
    AgentState state = orchestrator.make_state(kImmunityQuestion);
    size_t previous = 0;
    for (int i = 0; i < 3; ++i) {
        state.iteration++;
        RetrieverId retriever = orchestrator.select_retriever(state);
        std::string rewritten = orchestrator.rewrite_query(state, retriever);
        orchestrator.execute_retrieval(state, retriever, rewritten);
        orchestrator.self_evaluate(state);
        CHECK(state.evidence.size() == previous + 1);
        previous = state.evidence.size();
    }
}

TEST_CASE("mesh predictor outage degrades local retrieval to match-all") {
    Harness h;
    RemoteMeshPredictor dead("http://127.0.0.1:9");
    ScriptedBackend backend({});
    Orchestrator orchestrator({}, backend, h.registry, &dead, &h.vocab);
    AgentState state = orchestrator.make_state(kImmunityQuestion);
    state.iteration = 1;
    EvidenceSet set =
        orchestrator.execute_retrieval(state, RetrieverId::PubMedLocal, kImmunityQuestion);
    CHECK_FALSE(set.items.empty());  // unfiltered search still returns evidence
    CHECK(state.trace.back().note.find("mesh predictor failed") != std::string::npos);
}

TEST_CASE("remote llm backend failure is BackendUnavailable") {
    RemoteBackend backend("http://127.0.0.1:9");
    CHECK_THROWS_AS(backend.complete("prompt"), BackendUnavailableError);
}

TEST_CASE("evidence rendering evicts oldest lines beyond the budget") {
    std::vector<EvidenceSet> evidence;
    for (int i = 0; i < 3; ++i) {
        EvidenceSet set;
        EvidenceItem item;
        item.source = RetrieverId::WebSearch;
        item.title = "title" + std::to_string(i);
        item.snippet = std::string(100, 'a' + i);
        item.locator = "https://example.org/" + std::to_string(i);
        set.items.push_back(item);
        evidence.push_back(set);
    }
    std::string full = Orchestrator::render_evidence(evidence, 100000);
    CHECK(full.find("title0") != std::string::npos);
    CHECK(full.find("title2") != std::string::npos);

    std::string tight = Orchestrator::render_evidence(evidence, 300);
    CHECK(tight.find("title0") == std::string::npos);  // oldest evicted
    CHECK(tight.find("title2") != std::string::npos);
    CHECK(tight.size() <= 300);
}

}  // TEST_SUITE
