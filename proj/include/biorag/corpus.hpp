#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "biorag/errors.hpp"

namespace biorag {

// One abstract record as it arrives from the upstream dump. The abstract may
// still contain hyperlinks, markup and control characters.
struct RawRecord {
    std::string id;
    std::string title;
    std::string abstract;
    std::vector<std::string> mesh;
    int year = 0;  // 0 = unknown
};

// A cleaned record in the canonical corpus format.
struct CleanDocument {
    std::string id;
    std::string title;
    std::string abstract;  // plain prose: no links, tags or control characters
    std::vector<std::string> mesh;  // trimmed, deduplicated
    int year = 0;
};

enum class RejectReason { Empty, TooShort, NonAlpha, DupId, Malformed };
const char* reject_reason_name(RejectReason reason);

struct IngestStats {
    uint64_t input_count = 0;
    uint64_t accepted_count = 0;
    uint64_t rejected_count = 0;
    std::map<std::string, uint64_t> rejection_reasons;
};

// Quality thresholds (rules Q1-Q3; Q4 duplicate-id handling lives in the
// ingest loop). Thresholds can be overridden from a JSON rules file:
//   {"min_abstract_chars": 200, "min_alpha_ratio": 0.6}
struct IngestRules {
    size_t min_abstract_chars = 200;
    double min_alpha_ratio = 0.6;

    static IngestRules load_file(const std::string& path);
};

// Cleaning pipeline, rule set v1, applied in order until a fixpoint:
//   R1  remove hyperlink tokens (http://, https://, word-initial www.)
//   R2  remove table/script/style elements with their content, then strip
//       remaining <...> tags keeping inner text
//   R3  remove ASCII control characters (tab/newline become spaces)
//   then collapse whitespace runs to single spaces and trim the ends.
// Total and idempotent.
std::string clean_text(const std::string& raw);

struct FilterDecision {
    bool accepted = false;
    std::optional<RejectReason> reason;
};

// Q1 empty, Q2 shorter than min_abstract_chars, Q3 alphabetic ratio below
// min_alpha_ratio. Expects an already-cleaned abstract.
FilterDecision quality_filter(const CleanDocument& doc, const IngestRules& rules = {});

// Cleans title and abstract, trims and dedups mesh terms (case-insensitive,
// first occurrence kept).
CleanDocument clean_record(const RawRecord& raw);

// Corpus line format: {"id":..., "title":..., "abstract":..., "mesh":[...], "year":...}
std::string to_jsonl(const CleanDocument& doc);
std::optional<RawRecord> parse_raw_record(const std::string& line);

// Raised when the input or output stream fails mid-run; carries the stats
// accumulated so far.
struct IngestAborted : Error {
    IngestStats partial;
    IngestAborted(const std::string& what, IngestStats stats)
        : Error(what), partial(std::move(stats)) {}
};

// Streaming ingest: raw jsonl in, accepted CleanDocuments out (input order
// preserved). Malformed lines are rejected and counted; blank lines skipped.
IngestStats ingest_corpus(std::istream& input, std::ostream& output,
                          const IngestRules& rules = {});

std::pair<std::vector<CleanDocument>, IngestStats> ingest_records(
    const std::vector<RawRecord>& records, const IngestRules& rules = {});

// Loads an already-cleaned corpus file (the ingest output format).
std::vector<CleanDocument> load_corpus(std::istream& input);

}  // namespace biorag
