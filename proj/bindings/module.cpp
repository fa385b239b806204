// Python bindings for the main pipeline operations.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "biorag/config.hpp"
#include "biorag/corpus.hpp"
#include "biorag/embedding.hpp"
#include "biorag/engine.hpp"
#include "biorag/eval.hpp"
#include "biorag/mesh.hpp"
#include "biorag/prompts.hpp"
#include "biorag/retrievers.hpp"
#include "biorag/vector_index.hpp"

namespace py = pybind11;
using namespace biorag;

namespace {

TaskKind task_from_name(const std::string& name) {
    auto task = parse_task_kind(name);
    if (!task) throw py::value_error("unknown task kind: " + name);
    return *task;
}

PromptId prompt_from_name(const std::string& name) {
    for (PromptId id : {PromptId::P1, PromptId::P2, PromptId::P3, PromptId::P4, PromptId::P5}) {
        if (name == prompt_id_name(id)) return id;
    }
    throw py::value_error("unknown prompt id: " + name);
}

py::dict stats_to_dict(const IngestStats& stats) {
    py::dict reasons;
    for (const auto& [reason, count] : stats.rejection_reasons) {
        reasons[py::str(reason)] = count;
    }
    py::dict out;
    out["input_count"] = stats.input_count;
    out["accepted_count"] = stats.accepted_count;
    out["rejected_count"] = stats.rejected_count;
    out["rejection_reasons"] = reasons;
    return out;
}

py::dict answer_to_dict(const FinalAnswer& answer) {
    py::list trace;
    for (const TraceStep& step : answer.trace) trace.append(trace_step_digest(step));
    py::dict out;
    out["answer"] = answer.text;
    out["iterations"] = answer.iterations_used;
    out["exhausted"] = answer.exhausted;
    out["trace"] = trace;
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Taxonomy-filtered hybrid retrieval with a self-evaluated agent loop";

    py::register_exception<EmptyInputError>(m, "EmptyInputError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

    // --- corpus ---------------------------------------------------------
    py::class_<CleanDocument>(m, "CleanDocument")
        .def(py::init([](std::string id, std::string title, std::string abstract,
                         std::vector<std::string> mesh, int year) {
                 CleanDocument doc;
                 doc.id = std::move(id);
                 doc.title = std::move(title);
                 doc.abstract = std::move(abstract);
                 doc.mesh = std::move(mesh);
                 doc.year = year;
                 return doc;
             }),
             py::arg("id"), py::arg("title") = "", py::arg("abstract") = "",
             py::arg("mesh") = std::vector<std::string>{}, py::arg("year") = 0)
        .def_readwrite("id", &CleanDocument::id)
        .def_readwrite("title", &CleanDocument::title)
        .def_readwrite("abstract", &CleanDocument::abstract)
        .def_readwrite("mesh", &CleanDocument::mesh)
        .def_readwrite("year", &CleanDocument::year);

    m.def("clean_text", &clean_text, py::arg("raw"),
          "Remove hyperlinks, markup and control characters; collapse whitespace.");

    m.def(
        "ingest_file",
        [](const std::string& input, const std::string& output) {
            std::ifstream in(input);
            if (!in) throw py::value_error("cannot open " + input);
            std::ofstream out(output);
            if (!out) throw py::value_error("cannot open " + output);
            return stats_to_dict(ingest_corpus(in, out));
        },
        py::arg("input"), py::arg("output"),
        "Clean and quality-filter a raw jsonl file into the corpus format.");

    // --- embedding --------------------------------------------------------
    m.def(
        "reference_embed",
        [](const std::string& text) { return reference_embed(text).values; }, py::arg("text"),
        "Deterministic 256-dim unit-norm bag-of-tokens embedding.");

    m.def(
        "cosine_similarity",
        [](const std::vector<float>& a, const std::vector<float>& b) {
            return cosine_similarity(EmbeddingVector{a}, EmbeddingVector{b});
        },
        py::arg("a"), py::arg("b"));

    // --- mesh ---------------------------------------------------------------
    py::class_<MeshVocabulary>(m, "MeshVocabulary")
        .def_static("load_file", &MeshVocabulary::load_file, py::arg("path"))
        .def("__len__", &MeshVocabulary::size)
        .def("__contains__",
             [](const MeshVocabulary& vocab, const std::string& label) {
                 return vocab.contains(label);
             })
        .def("labels", [](const MeshVocabulary& vocab) {
            std::vector<std::string> labels;
            for (const MeshTerm& term : vocab.terms()) labels.push_back(term.label);
            return labels;
        });

    py::class_<MeshFilter>(m, "MeshFilter")
        .def_readonly("terms", &MeshFilter::terms)
        .def_property_readonly(
            "mode",
            [](const MeshFilter& filter) {
                return filter.mode == MeshFilterMode::AnyOf ? "any-of" : "match-all";
            })
        .def("describe", &MeshFilter::describe)
        .def("matches", [](const MeshFilter& filter, const CleanDocument& doc) {
            return filter_matches(filter, doc);
        });

    m.def("build_filter", &build_filter, py::arg("labels"));

    m.def(
        "predict_mesh_lexical",
        [](const std::string& question, const MeshVocabulary& vocab) {
            LexicalMeshPredictor predictor;
            return predict_mesh(predictor, question, vocab);
        },
        py::arg("question"), py::arg("vocab"),
        "Vocabulary labels appearing in the question, longest first.");

    // --- index -------------------------------------------------------------
    py::class_<SearchHit>(m, "SearchHit")
        .def_readonly("doc_id", &SearchHit::doc_id)
        .def_readonly("score", &SearchHit::score)
        .def_readonly("rank", &SearchHit::rank)
        .def_readonly("fallback_used", &SearchHit::fallback_used)
        .def("__repr__", [](const SearchHit& hit) {
            std::ostringstream out;
            out << "SearchHit(doc_id='" << hit.doc_id << "', score=" << hit.score
                << ", rank=" << hit.rank << ", fallback_used=" << (hit.fallback_used ? "True" : "False")
                << ")";
            return out.str();
        });

    py::class_<VectorIndex>(m, "VectorIndex")
        .def_static(
            "build",
            [](const std::vector<CleanDocument>& docs) {
                ReferenceEmbedder embedder;
                return VectorIndex::build(docs, embedder);
            },
            py::arg("docs"), "Build from documents with the reference embedder.")
        .def_static(
            "build_from_corpus",
            [](const std::string& path) {
                std::ifstream in(path);
                if (!in) throw py::value_error("cannot open " + path);
                ReferenceEmbedder embedder;
                return VectorIndex::build_stream(in, embedder);
            },
            py::arg("path"))
        .def_static("load_file", &VectorIndex::load_file, py::arg("path"))
        .def("save_file", &VectorIndex::save_file, py::arg("path"))
        .def("__len__", &VectorIndex::size)
        .def(
            "search_text",
            [](const VectorIndex& index, const std::string& query,
               const std::vector<std::string>& filter_labels, size_t k) {
                ReferenceEmbedder embedder;
                return index.search(embedder.embed(query), build_filter(filter_labels), k);
            },
            py::arg("query"), py::arg("filter_labels") = std::vector<std::string>{},
            py::arg("k") = 4);

    // --- retrievers and prompts ---------------------------------------------
    m.def("list_manuals", [] {
        py::list out;
        for (const RetrieverManual& manual : list_manuals()) {
            py::dict entry;
            entry["id"] = retriever_name(manual.id);
            entry["name"] = retriever_display_name(manual.id);
            entry["manual_text"] = manual.manual_text;
            entry["input_requirements"] = manual.input_requirements;
            out.append(entry);
        }
        return out;
    });

    m.def(
        "prompt_text",
        [](const std::string& id) { return prompt_template(prompt_from_name(id)).template_text; },
        py::arg("id"), "Template text for P1..P5.");

    m.def(
        "render_prompt",
        [](const std::string& id, const std::map<std::string, std::string>& slots) {
            return render_prompt(prompt_template(prompt_from_name(id)), slots);
        },
        py::arg("id"), py::arg("slots"));

    // --- eval ---------------------------------------------------------------
    m.def(
        "normalize_answer",
        [](const std::string& raw, const std::string& task, bool strict) {
            NormalizeOptions opts;
            opts.strict = strict;
            return normalize_answer(raw, task_from_name(task), opts);
        },
        py::arg("raw"), py::arg("task"), py::arg("strict") = false);

    m.def(
        "score_example",
        [](const std::vector<std::string>& predicted, const std::vector<std::string>& gold,
           const std::string& task, bool strict) {
            QaExample example;
            example.id = "py";
            example.gold = gold;
            example.task = task_from_name(task);
            NormalizeOptions opts;
            opts.strict = strict;
            return score_example(Prediction{predicted}, example, opts);
        },
        py::arg("predicted"), py::arg("gold"), py::arg("task"), py::arg("strict") = false);

    m.def(
        "evaluate_files",
        [](const std::string& dataset, const std::string& task, const std::string& predictions,
           bool strict) {
            NormalizeOptions opts;
            opts.strict = strict;
            ScoreReport report = evaluate_run(load_dataset_file(dataset, task_from_name(task)),
                                              load_predictions_file(predictions), opts);
            py::dict per_task;
            for (const auto& [name, mean] : report.per_task) per_task[py::str(name)] = mean;
            py::list per_example;
            for (const ExampleScore& entry : report.per_example) {
                py::dict e;
                e["id"] = entry.id;
                e["score"] = entry.score;
                e["missing_prediction"] = entry.missing_prediction;
                per_example.append(e);
            }
            py::dict out;
            out["n"] = report.n;
            out["per_task"] = per_task;
            out["per_example"] = per_example;
            return out;
        },
        py::arg("dataset"), py::arg("task"), py::arg("predictions"), py::arg("strict") = false);

    // --- engine ---------------------------------------------------------------
    py::class_<Engine>(m, "Engine")
        .def(py::init([](const std::string& config_json) {
                 nlohmann::json j = nlohmann::json::parse(config_json);
                 EngineConfig config = engine_config_from_json(j);
                 apply_env_overrides(config);
                 return std::make_unique<Engine>(std::move(config));
             }),
             py::arg("config_json"),
             "Engine from a JSON configuration string (same schema as the config file).")
        .def("ready", &Engine::ready)
        .def(
            "ask",
            [](Engine& engine, const std::string& question, py::object max_iterations) {
                AskRequest request;
                request.question = question;
                if (!max_iterations.is_none()) {
                    request.max_iterations = max_iterations.cast<uint32_t>();
                }
                return answer_to_dict(engine.ask(request));
            },
            py::arg("question"), py::arg("max_iterations") = py::none());
}
