#pragma once

#include <stdexcept>
#include <string>

namespace biorag {

// Base class for every error raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptyInputError : Error {
    EmptyInputError() : Error("empty input") {}
    explicit EmptyInputError(const std::string& what) : Error(what) {}
};

struct DimensionMismatchError : Error {
    DimensionMismatchError(size_t lhs, size_t rhs)
        : Error("dimension mismatch: " + std::to_string(lhs) + " vs " + std::to_string(rhs)) {}
};

// Carries the 1-based line number of the offending input line.
struct ParseError : Error {
    size_t line;
    ParseError(size_t line_no, const std::string& what)
        : Error("line " + std::to_string(line_no) + ": " + what), line(line_no) {}
};

struct FormatError : Error {
    explicit FormatError(const std::string& what) : Error(what) {}
};

struct UnsupportedVersionError : Error {
    explicit UnsupportedVersionError(const std::string& what) : Error(what) {}
};

struct CorruptIndexError : Error {
    explicit CorruptIndexError(const std::string& what) : Error(what) {}
};

struct DuplicateIdError : Error {
    std::string id;
    explicit DuplicateIdError(const std::string& doc_id)
        : Error("duplicate document id: " + doc_id), id(doc_id) {}
};

struct BackendUnavailableError : Error {
    explicit BackendUnavailableError(const std::string& what) : Error(what) {}
};

// Failure of one retriever client; the loop records it and continues.
struct RetrieverFailureError : Error {
    std::string retriever;
    std::string cause;
    RetrieverFailureError(const std::string& retriever_name, const std::string& why)
        : Error("retriever " + retriever_name + " failed: " + why),
          retriever(retriever_name),
          cause(why) {}
};

struct RateLimitedError : Error {
    double retry_after_sec;
    explicit RateLimitedError(double retry_after)
        : Error("rate limit exceeded, retry after " + std::to_string(retry_after) + "s"),
          retry_after_sec(retry_after) {}
};

struct MissingSlotError : Error {
    std::string slot;
    explicit MissingSlotError(const std::string& name)
        : Error("missing prompt slot: " + name), slot(name) {}
};

struct SelectionFailedError : Error {
    explicit SelectionFailedError(const std::string& what) : Error(what) {}
};

struct NoRetrieversEnabledError : Error {
    NoRetrieversEnabledError() : Error("all retrievers are disabled") {}
};

struct GenerationFailedError : Error {
    explicit GenerationFailedError(const std::string& what) : Error(what) {}
};

struct EmptyDatasetError : Error {
    EmptyDatasetError() : Error("dataset contains no examples") {}
};

}  // namespace biorag
