#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "biorag/embedding.hpp"
#include "biorag/mesh.hpp"
#include "biorag/vector_index.hpp"

namespace biorag {

enum class RetrieverId { Gene, DbSnp, Genome, Protein, WebSearch, PubMedLocal };

constexpr std::array<RetrieverId, 6> kAllRetrievers = {
    RetrieverId::Gene,     RetrieverId::DbSnp,     RetrieverId::Genome,
    RetrieverId::Protein,  RetrieverId::WebSearch, RetrieverId::PubMedLocal};

// Stable identifier used in config files, cassette keys and JSON.
const char* retriever_name(RetrieverId id);
// Name as it appears in the tool manuals ("dbSNP", "Web Search", "PubMed").
const char* retriever_display_name(RetrieverId id);
std::optional<RetrieverId> parse_retriever_name(const std::string& name);

// Maps a free-form model reply to a retriever by case-insensitive,
// word-bounded alias matching; the longest matching alias wins.
std::optional<RetrieverId> match_retriever_mention(const std::string& reply);

struct RetrieverManual {
    RetrieverId id;
    std::string manual_text;         // byte-exact tool manual
    std::string input_requirements;  // the manual's input sentence
};

// The six manuals in fixed order: Gene, dbSNP, Genome, Protein, Web Search,
// PubMed local vector database.
const std::vector<RetrieverManual>& list_manuals();
const RetrieverManual& manual_for(RetrieverId id);

struct RetrievalRequest {
    RetrieverId retriever = RetrieverId::PubMedLocal;
    std::string query;                 // rewritten query
    std::optional<MeshFilter> filter;  // PubMedLocal only
    size_t max_results = 10;
};

struct EvidenceItem {
    RetrieverId source = RetrieverId::PubMedLocal;
    std::string title;
    std::string snippet;
    std::string locator;  // URL or database accession
    std::optional<double> score;
};

struct EvidenceSet {
    RetrievalRequest request;
    std::vector<EvidenceItem> items;  // |items| <= request.max_results
    int64_t fetched_at_ms = 0;
    bool replayed = false;
};

// Normalized cassette key: "<retriever>|<lowercased, space-collapsed query>|<max_results>".
std::string cassette_key(RetrieverId id, const std::string& query, size_t max_results);

// Record/replay store, line-delimited JSON {"key": ..., "items": [...]}.
// Replay opens read-only; record appends under a single writer.
class Cassette {
public:
    Cassette() = default;
    Cassette(const Cassette&) = delete;
    Cassette& operator=(const Cassette&) = delete;

    // Merges the file's entries into this cassette.
    void load_from(const std::string& path);

    std::optional<std::vector<EvidenceItem>> find(const std::string& key) const;
    void put(const std::string& key, std::vector<EvidenceItem> items);
    void append_to_file(const std::string& path, const std::string& key,
                        const std::vector<EvidenceItem>& items);
    size_t size() const { return entries_.size(); }

private:
    std::unordered_map<std::string, std::vector<EvidenceItem>> entries_;
    std::mutex write_mutex_;
};

nlohmann::ordered_json evidence_item_to_json(const EvidenceItem& item);
EvidenceItem evidence_item_from_json(const nlohmann::json& j);

// Token bucket, shared per endpoint.
class TokenBucket {
public:
    TokenBucket(double rate_per_sec, double capacity);
    bool try_acquire();
    double seconds_until_available();

private:
    double rate_;
    double capacity_;
    double tokens_;
    std::chrono::steady_clock::time_point last_refill_;
    std::mutex mutex_;

    void refill_locked();
};

enum class ClientMode { Replay, Record, Live };

struct RetrieverClientConfig {
    ClientMode mode = ClientMode::Replay;
    std::string entity_cassette_path;
    std::string web_cassette_path;
    std::string eutils_endpoint = "https://eutils.ncbi.nlm.nih.gov";
    std::string ncbi_api_key;        // env BIORAG_NCBI_API_KEY
    std::string search_provider;     // env BIORAG_SEARCH_PROVIDER
    std::string search_endpoint;
    std::string search_api_key;      // env BIORAG_SEARCH_API_KEY
    double rate_limit_per_sec = 3.0;
    size_t snippet_cap = 1200;
};

struct ResultCaps {
    size_t entity_db = 10;
    size_t web_search = 10;
    size_t local_corpus = 4;
};

// Registry of all six information sources. Dispatch is total over
// RetrieverId; client failures surface as RetrieverFailureError.
class RetrieverRegistry {
public:
    RetrieverRegistry(RetrieverClientConfig config, ResultCaps caps,
                      const VectorIndex* index = nullptr, const Embedder* embedder = nullptr);

    EvidenceSet execute(const RetrievalRequest& req);

    std::vector<EvidenceItem> entity_lookup(RetrieverId db, const std::string& term,
                                            size_t max_results);
    std::vector<EvidenceItem> web_search(const std::string& query, size_t max_results);

    size_t default_max_results(RetrieverId id) const;
    const ResultCaps& caps() const { return caps_; }
    bool has_local_index() const { return index_ != nullptr; }

private:
    RetrieverClientConfig config_;
    ResultCaps caps_;
    const VectorIndex* index_;
    const Embedder* embedder_;
    Cassette entity_cassette_;
    Cassette web_cassette_;
    TokenBucket entity_bucket_;
    TokenBucket search_bucket_;

    std::vector<EvidenceItem> entity_lookup_live(RetrieverId db, const std::string& term,
                                                 size_t max_results);
    std::vector<EvidenceItem> web_search_live(const std::string& query, size_t max_results);
    std::vector<EvidenceItem> local_search(const RetrievalRequest& req);
};

}  // namespace biorag
