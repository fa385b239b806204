#include "biorag/mesh.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <sstream>
#include <unordered_set>

#include "httplib.h"
#include "json.hpp"

#include "biorag/errors.hpp"
#include "biorag/log.hpp"

namespace biorag {

namespace {

std::string to_lower(const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string trim_copy(const std::string& s) {
    size_t begin = s.find_first_not_of(" \t\n\r\f\v");
    if (begin == std::string::npos) return "";
    size_t end = s.find_last_not_of(" \t\n\r\f\v");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

MeshVocabulary MeshVocabulary::load(std::istream& in) {
    MeshVocabulary vocab;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        size_t tab = line.find('\t');
        if (tab == std::string::npos) {
            throw ParseError(line_no, "expected \"label<TAB>tree;tree\"");
        }
        std::string label = trim_copy(line.substr(0, tab));
        if (label.empty()) throw ParseError(line_no, "empty label");

        std::vector<std::string> trees;
        std::stringstream rest(line.substr(tab + 1));
        std::string tree;
        while (std::getline(rest, tree, ';')) {
            tree = trim_copy(tree);
            if (!tree.empty()) trees.push_back(tree);
        }

        auto it = vocab.by_label_.find(label);
        if (it == vocab.by_label_.end()) {
            vocab.by_label_[label] = vocab.terms_.size();
            vocab.terms_.push_back(MeshTerm{label, std::move(trees)});
            it = vocab.by_label_.find(label);
        } else {
            auto& existing = vocab.terms_[it->second].tree_numbers;
            existing.insert(existing.end(), trees.begin(), trees.end());
        }
        auto& numbers = vocab.terms_[it->second].tree_numbers;
        std::sort(numbers.begin(), numbers.end());
        numbers.erase(std::unique(numbers.begin(), numbers.end()), numbers.end());
    }
    if (in.bad()) throw Error("vocabulary stream failure");
    return vocab;
}

MeshVocabulary MeshVocabulary::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open vocabulary file: " + path);
    return load(in);
}

bool MeshVocabulary::contains(const std::string& label) const {
    return by_label_.find(label) != by_label_.end();
}

const MeshTerm* MeshVocabulary::find(const std::string& label) const {
    auto it = by_label_.find(label);
    return it == by_label_.end() ? nullptr : &terms_[it->second];
}

std::vector<std::string> MeshVocabulary::expand_with_descendants(
    const std::vector<std::string>& labels) const {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    auto push = [&](const std::string& label) {
        if (seen.insert(label).second) out.push_back(label);
    };

    std::vector<std::string> prefixes;
    for (const std::string& label : labels) {
        push(label);
        if (const MeshTerm* term = find(label)) {
            for (const std::string& tree : term->tree_numbers) prefixes.push_back(tree + ".");
        }
    }
    for (const MeshTerm& term : terms_) {
        for (const std::string& tree : term.tree_numbers) {
            for (const std::string& prefix : prefixes) {
                if (tree.size() > prefix.size() && tree.compare(0, prefix.size(), prefix) == 0) {
                    push(term.label);
                }
            }
        }
    }
    return out;
}

ScriptedMeshPredictor ScriptedMeshPredictor::load(std::istream& in) {
    ScriptedMeshPredictor predictor;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim_copy(line).empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("question") || !j.contains("mesh")) {
            throw ParseError(line_no, "expected {\"question\": ..., \"mesh\": [...]}");
        }
        std::vector<std::string> mesh;
        for (const auto& t : j["mesh"]) mesh.push_back(t.get<std::string>());
        predictor.add(j["question"].get<std::string>(), std::move(mesh));
    }
    return predictor;
}

ScriptedMeshPredictor ScriptedMeshPredictor::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open mesh fixture file: " + path);
    return load(in);
}

void ScriptedMeshPredictor::add(const std::string& question, std::vector<std::string> mesh) {
    by_question_[trim_copy(question)] = std::move(mesh);
}

std::vector<std::string> ScriptedMeshPredictor::predict(const std::string& question,
                                                        const MeshVocabulary&) {
    auto it = by_question_.find(trim_copy(question));
    if (it == by_question_.end()) return {};
    return it->second;
}

std::vector<std::string> LexicalMeshPredictor::predict(const std::string& question,
                                                       const MeshVocabulary& vocab) {
    std::string folded = to_lower(question);
    std::vector<std::string> hits;
    for (const MeshTerm& term : vocab.terms()) {
        if (folded.find(to_lower(term.label)) != std::string::npos) {
            hits.push_back(term.label);
        }
    }
    std::sort(hits.begin(), hits.end(), [](const std::string& a, const std::string& b) {
        if (a.size() != b.size()) return a.size() > b.size();
        return a < b;
    });
    return hits;
}

RemoteMeshPredictor::RemoteMeshPredictor(std::string endpoint)
    : endpoint_(std::move(endpoint)) {}

std::vector<std::string> RemoteMeshPredictor::predict(const std::string& question,
                                                      const MeshVocabulary&) {
    httplib::Client client(endpoint_);
    client.set_connection_timeout(5, 0);
    nlohmann::json body{{"question", question}};
    auto res = client.Post("/predict_mesh", body.dump(), "application/json");
    if (!res || res->status != 200) {
        throw BackendUnavailableError("mesh predictor unreachable: " + endpoint_);
    }
    nlohmann::json reply = nlohmann::json::parse(res->body, nullptr, false);
    if (reply.is_discarded() || !reply.contains("mesh")) {
        throw BackendUnavailableError("mesh predictor returned malformed reply");
    }
    std::vector<std::string> mesh;
    for (const auto& t : reply["mesh"]) mesh.push_back(t.get<std::string>());
    return mesh;
}

std::unique_ptr<MeshPredictor> make_mesh_predictor(const MeshPredictorSpec& spec) {
    switch (spec.kind) {
        case MeshPredictorKind::Scripted:
            return std::make_unique<ScriptedMeshPredictor>(
                ScriptedMeshPredictor::load_file(spec.fixture_path));
        case MeshPredictorKind::LexicalBaseline:
            return std::make_unique<LexicalMeshPredictor>();
        case MeshPredictorKind::Remote: {
            std::string endpoint = spec.endpoint;
            if (const char* env = std::getenv("BIORAG_MESH_ENDPOINT"); env && *env) {
                endpoint = env;
            }
            if (endpoint.empty()) {
                throw BackendUnavailableError("remote mesh predictor requires an endpoint");
            }
            return std::make_unique<RemoteMeshPredictor>(endpoint);
        }
    }
    throw Error("unknown mesh predictor kind");
}

std::vector<std::string> predict_mesh(MeshPredictor& predictor, const std::string& question,
                                      const MeshVocabulary& vocab) {
    if (trim_copy(question).empty()) throw EmptyInputError("empty question");

    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    for (const std::string& label : predictor.predict(question, vocab)) {
        if (!seen.insert(label).second) continue;
        if (!vocab.contains(label)) {
            log_warn("predictor '" + predictor.name() + "' returned out-of-vocabulary label '" +
                     label + "', dropped");
            continue;
        }
        out.push_back(label);
    }
    return out;
}

std::string MeshFilter::describe() const {
    if (mode == MeshFilterMode::MatchAll) return "filtered by: [match-all]";
    std::string out = "filtered by: [";
    for (size_t i = 0; i < terms.size(); ++i) {
        if (i > 0) out += " or ";
        out += "eq(\"MeSH\", \"" + terms[i] + "\")";
    }
    out += "]";
    return out;
}

MeshFilter build_filter(const std::vector<std::string>& labels) {
    MeshFilter filter;
    std::unordered_set<std::string> seen;
    for (const std::string& label : labels) {
        if (seen.insert(label).second) filter.terms.push_back(label);
    }
    filter.mode = filter.terms.empty() ? MeshFilterMode::MatchAll : MeshFilterMode::AnyOf;
    return filter;
}

bool filter_matches(const MeshFilter& filter, const CleanDocument& doc) {
    if (filter.mode == MeshFilterMode::MatchAll) return true;
    for (const std::string& term : doc.mesh) {
        if (std::find(filter.terms.begin(), filter.terms.end(), term) != filter.terms.end()) {
            return true;
        }
    }
    return false;
}

}  // namespace biorag
