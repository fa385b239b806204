// biorag command line: ingest, index, ask, eval, serve.
// Exit codes: 0 success, 1 usage error, 2 runtime failure.

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "biorag/config.hpp"
#include "biorag/corpus.hpp"
#include "biorag/engine.hpp"
#include "biorag/eval.hpp"
#include "biorag/service.hpp"
#include "biorag/vector_index.hpp"

namespace {

struct IngestArgs {
    std::string input, output, rules, stats;
};

struct IndexArgs {
    std::string corpus, out, embedder = "ref256";
};

struct AskArgs {
    std::string question, config;
    bool trace = false;
    uint32_t max_iterations = 0;  // 0 = config value
};

struct EvalArgs {
    std::string dataset, task, predictions;
    bool strict = false;
};

struct ServeArgs {
    std::string config, host = "127.0.0.1";
    int port = 8080;
};

int run_ingest(const IngestArgs& args) {
    biorag::IngestRules rules;
    if (!args.rules.empty()) rules = biorag::IngestRules::load_file(args.rules);

    std::ifstream in(args.input);
    if (!in) throw biorag::Error("cannot open input file: " + args.input);
    std::ofstream out(args.output);
    if (!out) throw biorag::Error("cannot open output file: " + args.output);

    biorag::IngestStats stats = biorag::ingest_corpus(in, out, rules);

    nlohmann::ordered_json report;
    report["input_count"] = stats.input_count;
    report["accepted_count"] = stats.accepted_count;
    report["rejected_count"] = stats.rejected_count;
    report["rejection_reasons"] = stats.rejection_reasons;
    if (!args.stats.empty()) {
        std::ofstream stats_out(args.stats);
        if (!stats_out) throw biorag::Error("cannot open stats file: " + args.stats);
        stats_out << report.dump(2) << '\n';
    }
    std::cout << report.dump() << '\n';
    return 0;
}

int run_index(const IndexArgs& args) {
    std::ifstream corpus(args.corpus);
    if (!corpus) throw biorag::Error("cannot open corpus file: " + args.corpus);
    auto embedder = biorag::make_embedder(args.embedder);
    biorag::VectorIndex index = biorag::VectorIndex::build_stream(corpus, *embedder);
    index.save_file(args.out);
    std::cout << "indexed " << index.size() << " documents ("
              << index.embedder_spec().name << ", dim " << index.embedder_spec().dimension
              << ") -> " << args.out << '\n';
    return 0;
}

int run_ask(const AskArgs& args) {
    biorag::EngineConfig config;
    std::string config_path = args.config;
    if (config_path.empty()) {
        if (const char* env = std::getenv("BIORAG_CONFIG"); env && *env) config_path = env;
    }
    if (config_path.empty()) throw biorag::Error("ask requires --config or BIORAG_CONFIG");
    config = biorag::load_config_file(config_path);

    biorag::Engine engine(config);
    biorag::AskRequest request;
    request.question = args.question;
    if (args.max_iterations > 0) request.max_iterations = args.max_iterations;

    biorag::AskResponse response = engine.handle_ask(request);
    std::cout << response.answer << '\n';
    if (args.trace) {
        std::cout << "iterations=" << response.iterations
                  << " exhausted=" << (response.exhausted ? "true" : "false") << '\n';
        for (const std::string& step : response.trace) std::cout << step << '\n';
    }
    return 0;
}

int run_eval(const EvalArgs& args) {
    auto task = biorag::parse_task_kind(args.task);
    if (!task) {
        throw biorag::Error("unknown task kind: " + args.task +
                            " (expected ExactMatch, GeneDiseaseRecall, ProteinCodingBoolean "
                            "or MultipleChoice)");
    }
    auto examples = biorag::load_dataset_file(args.dataset, *task);
    auto predictions = biorag::load_predictions_file(args.predictions);
    biorag::NormalizeOptions opts;
    opts.strict = args.strict;
    biorag::ScoreReport report = biorag::evaluate_run(examples, predictions, opts);
    std::cout << biorag::score_report_to_json(report).dump(2) << '\n';
    return 0;
}

int run_serve(const ServeArgs& args) {
    biorag::EngineConfig config = biorag::load_config_file(args.config);
    biorag::Engine engine(config);
    biorag::AskService service(engine);
    int port = service.bind(args.host, args.port);
    if (port <= 0) throw biorag::Error("cannot bind " + args.host + ":" + std::to_string(args.port));
    std::cout << "listening on " << args.host << ":" << port << '\n';
    service.run();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"biorag: taxonomy-filtered retrieval and self-evaluated question answering"};
    app.require_subcommand(1);

    IngestArgs ingest_args;
    auto* ingest = app.add_subcommand("ingest", "Clean and quality-filter raw abstract records");
    ingest->add_option("--input", ingest_args.input, "Raw records (jsonl)")->required();
    ingest->add_option("--output", ingest_args.output, "Cleaned corpus output (jsonl)")->required();
    ingest->add_option("--rules", ingest_args.rules, "Quality rules file (json)");
    ingest->add_option("--stats", ingest_args.stats, "Write ingest stats to this file (json)");

    IndexArgs index_args;
    auto* index = app.add_subcommand("index", "Embed a cleaned corpus into a vector index");
    index->add_option("--corpus", index_args.corpus, "Cleaned corpus (jsonl)")->required();
    index->add_option("--out", index_args.out, "Index output path")->required();
    index->add_option("--embedder", index_args.embedder, "Embedder name (default ref256)");

    AskArgs ask_args;
    auto* ask = app.add_subcommand("ask", "Answer a question with the agentic retrieval loop");
    ask->add_option("question", ask_args.question, "The question")->required();
    ask->add_option("--config", ask_args.config, "Engine config file (json)");
    ask->add_option("--max-iterations", ask_args.max_iterations, "Override the iteration cap");
    ask->add_flag("--trace", ask_args.trace, "Print the trace digests after the answer");

    EvalArgs eval_args;
    auto* eval = app.add_subcommand("eval", "Score predictions against a QA dataset");
    eval->add_option("--dataset", eval_args.dataset, "Dataset (jsonl)")->required();
    eval->add_option("--task", eval_args.task, "Task kind")->required();
    eval->add_option("--predictions", eval_args.predictions, "Predictions (jsonl)")->required();
    eval->add_flag("--strict", eval_args.strict, "Trim-only normalization");

    ServeArgs serve_args;
    auto* serve = app.add_subcommand("serve", "Serve POST /v1/ask over HTTP");
    serve->add_option("--config", serve_args.config, "Engine config file (json)")->required();
    serve->add_option("--host", serve_args.host, "Bind host (default 127.0.0.1)");
    serve->add_option("--port", serve_args.port, "Bind port (default 8080)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*ingest) return run_ingest(ingest_args);
        if (*index) return run_index(index_args);
        if (*ask) return run_ask(ask_args);
        if (*eval) return run_eval(eval_args);
        if (*serve) return run_serve(serve_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
