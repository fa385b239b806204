#include "biorag/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "json.hpp"

namespace biorag {

namespace {

bool is_space_byte(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool iequals_at(const std::string& s, size_t pos, const char* lit) {
    for (size_t i = 0; lit[i] != '\0'; ++i) {
        if (pos + i >= s.size()) return false;
        if (std::tolower(static_cast<unsigned char>(s[pos + i])) != lit[i]) return false;
    }
    return true;
}

// R1: drop hyperlink tokens. http(s):// anywhere, www. only at a word start.
std::string strip_urls(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    size_t i = 0;
    while (i < s.size()) {
        bool url = iequals_at(s, i, "http://") || iequals_at(s, i, "https://");
        if (!url && iequals_at(s, i, "www.")) {
            bool at_word_start =
                i == 0 || !std::isalnum(static_cast<unsigned char>(s[i - 1]));
            url = at_word_start;
        }
        if (url) {
            while (i < s.size() && !is_space_byte(static_cast<unsigned char>(s[i]))) ++i;
            out.push_back(' ');
            continue;
        }
        out.push_back(s[i]);
        ++i;
    }
    return out;
}

// Elements whose content is dropped wholesale (tables, embedded code/styles).
constexpr const char* kBlockElements[] = {"table", "script", "style"};

size_t find_open_tag(const std::string& s, const char* name, size_t from) {
    size_t pos = from;
    while ((pos = s.find('<', pos)) != std::string::npos) {
        if (iequals_at(s, pos + 1, name)) {
            size_t after = pos + 1 + std::string(name).size();
            if (after >= s.size() || s[after] == '>' || s[after] == '/' ||
                is_space_byte(static_cast<unsigned char>(s[after]))) {
                return pos;
            }
        }
        ++pos;
    }
    return std::string::npos;
}

// R2a: remove <table>...</table> (and script/style) including content.
std::string drop_block_elements(const std::string& s) {
    std::string cur = s;
    for (const char* name : kBlockElements) {
        size_t open;
        while ((open = find_open_tag(cur, name, 0)) != std::string::npos) {
            const std::string close = std::string("</") + name;
            size_t close_pos = std::string::npos;
            size_t probe = open;
            while ((probe = cur.find('<', probe + 1)) != std::string::npos) {
                if (iequals_at(cur, probe, close.c_str())) {
                    close_pos = probe;
                    break;
                }
            }
            if (close_pos == std::string::npos) break;  // dangling tag; R2b strips it
            size_t close_end = cur.find('>', close_pos);
            if (close_end == std::string::npos) break;
            cur.erase(open, close_end + 1 - open);
        }
    }
    return cur;
}

// R2b: strip remaining <...> tags, keeping inner text. Only sequences that
// look like tags are removed: '<' followed by a letter, '/', '!' or '?', with
// a '>' within 256 bytes. "a < b" stays untouched.
std::string strip_tags(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    size_t i = 0;
    while (i < s.size()) {
        if (s[i] == '<' && i + 1 < s.size()) {
            char next = s[i + 1];
            bool tagish = std::isalpha(static_cast<unsigned char>(next)) || next == '/' ||
                          next == '!' || next == '?';
            if (tagish) {
                size_t close = s.find('>', i + 1);
                if (close != std::string::npos && close - i <= 256) {
                    i = close + 1;
                    continue;
                }
            }
        }
        out.push_back(s[i]);
        ++i;
    }
    return out;
}

// R3: ASCII control characters. Tab/newline family becomes a space so the
// collapse step can merge it; the rest are deleted.
std::string strip_controls(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (unsigned char c : s) {
        if (c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
            out.push_back(' ');
        } else if (c < 0x20 || c == 0x7f) {
            continue;
        } else {
            out.push_back(static_cast<char>(c));
        }
    }
    return out;
}

std::string collapse_whitespace(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    bool in_run = false;
    for (char c : s) {
        if (c == ' ') {
            in_run = true;
            continue;
        }
        if (in_run && !out.empty()) out.push_back(' ');
        in_run = false;
        out.push_back(c);
    }
    return out;
}

std::string clean_pass(const std::string& s) {
    return collapse_whitespace(strip_controls(strip_tags(drop_block_elements(strip_urls(s)))));
}

}  // namespace

std::string clean_text(const std::string& raw) {
    // Stripping can expose new matches ("<<b>table>..."), so run to fixpoint.
    // Every changing pass shrinks the string, so this terminates.
    std::string cur = clean_pass(raw);
    for (;;) {
        std::string next = clean_pass(cur);
        if (next == cur) return cur;
        cur = std::move(next);
    }
}

const char* reject_reason_name(RejectReason reason) {
    switch (reason) {
        case RejectReason::Empty: return "EMPTY";
        case RejectReason::TooShort: return "TOO_SHORT";
        case RejectReason::NonAlpha: return "NON_ALPHA";
        case RejectReason::DupId: return "DUP_ID";
        case RejectReason::Malformed: return "MALFORMED";
    }
    return "UNKNOWN";
}

IngestRules IngestRules::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open rules file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("invalid rules file " + path + ": " + e.what());
    }
    IngestRules rules;
    rules.min_abstract_chars = j.value("min_abstract_chars", rules.min_abstract_chars);
    rules.min_alpha_ratio = j.value("min_alpha_ratio", rules.min_alpha_ratio);
    return rules;
}

FilterDecision quality_filter(const CleanDocument& doc, const IngestRules& rules) {
    if (doc.abstract.empty()) return {false, RejectReason::Empty};
    if (doc.abstract.size() < rules.min_abstract_chars) return {false, RejectReason::TooShort};
    size_t alpha = static_cast<size_t>(std::count_if(
        doc.abstract.begin(), doc.abstract.end(),
        [](unsigned char c) { return std::isalpha(c) != 0; }));
    double ratio = static_cast<double>(alpha) / static_cast<double>(doc.abstract.size());
    if (ratio < rules.min_alpha_ratio) return {false, RejectReason::NonAlpha};
    return {true, std::nullopt};
}

CleanDocument clean_record(const RawRecord& raw) {
    CleanDocument doc;
    doc.id = raw.id;
    doc.title = clean_text(raw.title);
    doc.abstract = clean_text(raw.abstract);
    doc.year = raw.year;

    std::unordered_set<std::string> seen;
    for (const std::string& term : raw.mesh) {
        std::string trimmed = clean_text(term);
        if (trimmed.empty()) continue;
        std::string folded = trimmed;
        std::transform(folded.begin(), folded.end(), folded.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (seen.insert(folded).second) doc.mesh.push_back(trimmed);
    }
    return doc;
}

std::string to_jsonl(const CleanDocument& doc) {
    nlohmann::ordered_json j;
    j["id"] = doc.id;
    j["title"] = doc.title;
    j["abstract"] = doc.abstract;
    j["mesh"] = doc.mesh;
    j["year"] = doc.year;
    return j.dump();
}

std::optional<RawRecord> parse_raw_record(const std::string& line) {
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return std::nullopt;
    if (!j.contains("id") || !j["id"].is_string()) return std::nullopt;

    RawRecord rec;
    rec.id = j["id"].get<std::string>();
    if (rec.id.empty()) return std::nullopt;
    try {
        rec.title = j.value("title", std::string());
        rec.abstract = j.value("abstract", std::string());
        rec.year = j.value("year", 0);
        if (j.contains("mesh")) {
            if (!j["mesh"].is_array()) return std::nullopt;
            for (const auto& t : j["mesh"]) {
                if (!t.is_string()) return std::nullopt;
                rec.mesh.push_back(t.get<std::string>());
            }
        }
    } catch (const nlohmann::json::exception&) {
        return std::nullopt;
    }
    return rec;
}

namespace {

struct IngestSink {
    virtual ~IngestSink() = default;
    virtual void accept(const CleanDocument& doc) = 0;
};

void reject(IngestStats& stats, RejectReason reason) {
    stats.rejected_count++;
    stats.rejection_reasons[reject_reason_name(reason)]++;
}

// Per-record processing is pure; the sink is the single ordered writer.
void ingest_line(const std::string& line, const IngestRules& rules,
                 std::unordered_set<std::string>& seen_ids, IngestStats& stats,
                 IngestSink& sink) {
    stats.input_count++;
    std::optional<RawRecord> raw = parse_raw_record(line);
    if (!raw) {
        reject(stats, RejectReason::Malformed);
        return;
    }
    if (!seen_ids.insert(raw->id).second) {
        reject(stats, RejectReason::DupId);
        return;
    }
    CleanDocument doc = clean_record(*raw);
    FilterDecision decision = quality_filter(doc, rules);
    if (!decision.accepted) {
        reject(stats, *decision.reason);
        return;
    }
    stats.accepted_count++;
    sink.accept(doc);
}

}  // namespace

IngestStats ingest_corpus(std::istream& input, std::ostream& output, const IngestRules& rules) {
    struct StreamSink : IngestSink {
        std::ostream& out;
        explicit StreamSink(std::ostream& o) : out(o) {}
        void accept(const CleanDocument& doc) override { out << to_jsonl(doc) << '\n'; }
    } sink{output};

    IngestStats stats;
    std::unordered_set<std::string> seen_ids;
    std::string line;
    while (std::getline(input, line)) {
        if (line.empty()) continue;
        ingest_line(line, rules, seen_ids, stats, sink);
        if (output.fail()) throw IngestAborted("output stream failure", stats);
    }
    if (input.bad()) throw IngestAborted("input stream failure", stats);
    return stats;
}

std::pair<std::vector<CleanDocument>, IngestStats> ingest_records(
    const std::vector<RawRecord>& records, const IngestRules& rules) {
    struct VectorSink : IngestSink {
        std::vector<CleanDocument> docs;
        void accept(const CleanDocument& doc) override { docs.push_back(doc); }
    } sink;

    IngestStats stats;
    std::unordered_set<std::string> seen_ids;
    for (const RawRecord& rec : records) {
        stats.input_count++;
        if (rec.id.empty()) {
            reject(stats, RejectReason::Malformed);
            continue;
        }
        if (!seen_ids.insert(rec.id).second) {
            reject(stats, RejectReason::DupId);
            continue;
        }
        CleanDocument doc = clean_record(rec);
        FilterDecision decision = quality_filter(doc, rules);
        if (!decision.accepted) {
            reject(stats, *decision.reason);
            continue;
        }
        stats.accepted_count++;
        sink.accept(doc);
    }
    return {std::move(sink.docs), stats};
}

std::vector<CleanDocument> load_corpus(std::istream& input) {
    std::vector<CleanDocument> docs;
    std::string line;
    size_t line_no = 0;
    while (std::getline(input, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("id")) {
            throw ParseError(line_no, "malformed corpus record");
        }
        CleanDocument doc;
        doc.id = j.value("id", std::string());
        doc.title = j.value("title", std::string());
        doc.abstract = j.value("abstract", std::string());
        doc.year = j.value("year", 0);
        for (const auto& t : j.value("mesh", nlohmann::json::array())) {
            doc.mesh.push_back(t.get<std::string>());
        }
        docs.push_back(std::move(doc));
    }
    return docs;
}

}  // namespace biorag
