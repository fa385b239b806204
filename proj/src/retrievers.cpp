#include "biorag/retrievers.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

#include "httplib.h"

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

std::string collapse_spaces(const std::string& s) {
    std::string out;
    bool in_run = false;
    for (unsigned char c : s) {
        if (std::isspace(c)) {
            in_run = true;
            continue;
        }
        if (in_run && !out.empty()) out.push_back(' ');
        in_run = false;
        out.push_back(static_cast<char>(c));
    }
    return out;
}

int64_t now_ms() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

std::string cap_snippet(const std::string& text, size_t cap) {
    if (text.size() <= cap) return text;
    return text.substr(0, cap);
}

}  // namespace

const char* retriever_name(RetrieverId id) {
    switch (id) {
        case RetrieverId::Gene: return "Gene";
        case RetrieverId::DbSnp: return "DbSnp";
        case RetrieverId::Genome: return "Genome";
        case RetrieverId::Protein: return "Protein";
        case RetrieverId::WebSearch: return "WebSearch";
        case RetrieverId::PubMedLocal: return "PubMedLocal";
    }
    return "?";
}

const char* retriever_display_name(RetrieverId id) {
    switch (id) {
        case RetrieverId::Gene: return "Gene";
        case RetrieverId::DbSnp: return "dbSNP";
        case RetrieverId::Genome: return "Genome";
        case RetrieverId::Protein: return "Protein";
        case RetrieverId::WebSearch: return "Web Search";
        case RetrieverId::PubMedLocal: return "PubMed";
    }
    return "?";
}

std::optional<RetrieverId> parse_retriever_name(const std::string& name) {
    std::string folded = to_lower(trim_copy(name));
    for (RetrieverId id : kAllRetrievers) {
        if (folded == to_lower(retriever_name(id)) ||
            folded == to_lower(retriever_display_name(id))) {
            return id;
        }
    }
    return std::nullopt;
}

namespace {

struct Alias {
    const char* phrase;
    RetrieverId id;
};

// Checked longest-first; ties resolve in manual order.
const Alias kAliases[] = {
    {"pubmed local vector database", RetrieverId::PubMedLocal},
    {"local vector database", RetrieverId::PubMedLocal},
    {"local pubmed database", RetrieverId::PubMedLocal},
    {"web search engine", RetrieverId::WebSearch},
    {"genome database", RetrieverId::Genome},
    {"protein database", RetrieverId::Protein},
    {"gene database", RetrieverId::Gene},
    {"dbsnp database", RetrieverId::DbSnp},
    {"search engine", RetrieverId::WebSearch},
    {"snp database", RetrieverId::DbSnp},
    {"local corpus", RetrieverId::PubMedLocal},
    {"pubmedlocal", RetrieverId::PubMedLocal},
    {"web search", RetrieverId::WebSearch},
    {"websearch", RetrieverId::WebSearch},
    {"genome", RetrieverId::Genome},
    {"protein", RetrieverId::Protein},
    {"pubmed", RetrieverId::PubMedLocal},
    {"dbsnp", RetrieverId::DbSnp},
    {"db snp", RetrieverId::DbSnp},
    {"gene", RetrieverId::Gene},
    {"snp", RetrieverId::DbSnp},
};

bool word_bounded_at(const std::string& text, size_t pos, size_t len) {
    auto is_word = [](unsigned char c) { return std::isalnum(c) != 0; };
    if (pos > 0 && is_word(text[pos - 1])) return false;
    if (pos + len < text.size() && is_word(text[pos + len])) return false;
    return true;
}

bool contains_word_bounded(const std::string& haystack, const std::string& needle) {
    size_t pos = 0;
    while ((pos = haystack.find(needle, pos)) != std::string::npos) {
        if (word_bounded_at(haystack, pos, needle.size())) return true;
        ++pos;
    }
    return false;
}

}  // namespace

std::optional<RetrieverId> match_retriever_mention(const std::string& reply) {
    std::string folded = to_lower(reply);
    const Alias* best = nullptr;
    size_t best_len = 0;
    for (const Alias& alias : kAliases) {
        size_t len = std::string(alias.phrase).size();
        if (len <= best_len) continue;
        if (contains_word_bounded(folded, alias.phrase)) {
            best = &alias;
            best_len = len;
        }
    }
    if (best == nullptr) return std::nullopt;
    return best->id;
}

std::string cassette_key(RetrieverId id, const std::string& query, size_t max_results) {
    return to_lower(retriever_name(id)) + "|" + to_lower(collapse_spaces(query)) + "|" +
           std::to_string(max_results);
}

nlohmann::ordered_json evidence_item_to_json(const EvidenceItem& item) {
    nlohmann::ordered_json j;
    j["source"] = retriever_name(item.source);
    j["title"] = item.title;
    j["snippet"] = item.snippet;
    j["locator"] = item.locator;
    if (item.score) j["score"] = *item.score;
    return j;
}

EvidenceItem evidence_item_from_json(const nlohmann::json& j) {
    EvidenceItem item;
    auto id = parse_retriever_name(j.value("source", std::string()));
    if (!id) throw FormatError("evidence item has unknown source");
    item.source = *id;
    item.title = j.value("title", std::string());
    item.snippet = j.value("snippet", std::string());
    item.locator = j.value("locator", std::string());
    if (j.contains("score") && j["score"].is_number()) item.score = j["score"].get<double>();
    return item;
}

void Cassette::load_from(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open cassette file: " + path);
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim_copy(line).empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("key") || !j.contains("items")) {
            throw ParseError(line_no, "expected {\"key\": ..., \"items\": [...]}");
        }
        std::vector<EvidenceItem> items;
        for (const auto& ij : j["items"]) items.push_back(evidence_item_from_json(ij));
        entries_[j["key"].get<std::string>()] = std::move(items);
    }
}

std::optional<std::vector<EvidenceItem>> Cassette::find(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void Cassette::put(const std::string& key, std::vector<EvidenceItem> items) {
    std::lock_guard<std::mutex> lock(write_mutex_);
    entries_[key] = std::move(items);
}

void Cassette::append_to_file(const std::string& path, const std::string& key,
                              const std::vector<EvidenceItem>& items) {
    std::lock_guard<std::mutex> lock(write_mutex_);
    entries_[key] = items;
    std::ofstream out(path, std::ios::app);
    if (!out) throw Error("cannot open cassette file for append: " + path);
    nlohmann::ordered_json j;
    j["key"] = key;
    j["items"] = nlohmann::ordered_json::array();
    for (const EvidenceItem& item : items) j["items"].push_back(evidence_item_to_json(item));
    out << j.dump() << '\n';
}

TokenBucket::TokenBucket(double rate_per_sec, double capacity)
    : rate_(rate_per_sec),
      capacity_(capacity),
      tokens_(capacity),
      last_refill_(std::chrono::steady_clock::now()) {}

void TokenBucket::refill_locked() {
    auto now = std::chrono::steady_clock::now();
    double elapsed = std::chrono::duration<double>(now - last_refill_).count();
    last_refill_ = now;
    tokens_ = std::min(capacity_, tokens_ + elapsed * rate_);
}

bool TokenBucket::try_acquire() {
    std::lock_guard<std::mutex> lock(mutex_);
    refill_locked();
    if (tokens_ >= 1.0) {
        tokens_ -= 1.0;
        return true;
    }
    return false;
}

double TokenBucket::seconds_until_available() {
    std::lock_guard<std::mutex> lock(mutex_);
    refill_locked();
    if (tokens_ >= 1.0) return 0.0;
    return (1.0 - tokens_) / rate_;
}

RetrieverRegistry::RetrieverRegistry(RetrieverClientConfig config, ResultCaps caps,
                                     const VectorIndex* index, const Embedder* embedder)
    : config_(std::move(config)),
      caps_(caps),
      index_(index),
      embedder_(embedder),
      entity_bucket_(config_.rate_limit_per_sec, config_.rate_limit_per_sec),
      search_bucket_(config_.rate_limit_per_sec, config_.rate_limit_per_sec) {
    // Replay requires the cassette; record mode starts fresh if absent.
    auto load_cassette = [this](Cassette& cassette, const std::string& path) {
        if (path.empty()) return;
        if (config_.mode != ClientMode::Replay && !std::ifstream(path).good()) return;
        cassette.load_from(path);
    };
    load_cassette(entity_cassette_, config_.entity_cassette_path);
    load_cassette(web_cassette_, config_.web_cassette_path);
}

size_t RetrieverRegistry::default_max_results(RetrieverId id) const {
    switch (id) {
        case RetrieverId::Gene:
        case RetrieverId::DbSnp:
        case RetrieverId::Genome:
        case RetrieverId::Protein: return caps_.entity_db;
        case RetrieverId::WebSearch: return caps_.web_search;
        case RetrieverId::PubMedLocal: return caps_.local_corpus;
    }
    return caps_.entity_db;
}

std::vector<EvidenceItem> RetrieverRegistry::local_search(const RetrievalRequest& req) {
    if (index_ == nullptr || embedder_ == nullptr) {
        throw RetrieverFailureError(retriever_name(req.retriever), "NoIndex");
    }
    EmbeddingVector query = embedder_->embed(req.query);
    MeshFilter filter = req.filter.value_or(MeshFilter::match_all());
    std::vector<EvidenceItem> items;
    for (const SearchHit& hit : index_->search(query, filter, req.max_results)) {
        const IndexedDocument* item = index_->find(hit.doc_id);
        EvidenceItem ev;
        ev.source = RetrieverId::PubMedLocal;
        ev.title = item != nullptr ? item->doc.title : hit.doc_id;
        ev.snippet = cap_snippet(item != nullptr ? item->doc.abstract : "", config_.snippet_cap);
        if (ev.snippet.empty()) ev.snippet = ev.title;
        ev.locator = hit.doc_id;
        ev.score = hit.score;
        items.push_back(std::move(ev));
    }
    return items;
}

EvidenceSet RetrieverRegistry::execute(const RetrievalRequest& req) {
    if (trim_copy(req.query).empty()) throw EmptyInputError("empty retrieval query");
    if (req.max_results == 0) throw std::invalid_argument("max_results must be >= 1");

    EvidenceSet set;
    set.request = req;
    set.fetched_at_ms = now_ms();

    switch (req.retriever) {
        case RetrieverId::Gene:
        case RetrieverId::DbSnp:
        case RetrieverId::Genome:
        case RetrieverId::Protein:
            set.items = entity_lookup(req.retriever, req.query, req.max_results);
            set.replayed = config_.mode == ClientMode::Replay;
            break;
        case RetrieverId::WebSearch:
            set.items = web_search(req.query, req.max_results);
            set.replayed = config_.mode == ClientMode::Replay;
            break;
        case RetrieverId::PubMedLocal:
            set.items = local_search(req);
            set.replayed = false;
            break;
    }
    if (set.items.size() > req.max_results) set.items.resize(req.max_results);
    return set;
}

std::vector<EvidenceItem> RetrieverRegistry::entity_lookup(RetrieverId db, const std::string& term,
                                                           size_t max_results) {
    if (db == RetrieverId::WebSearch || db == RetrieverId::PubMedLocal) {
        throw std::invalid_argument("entity_lookup expects an entity database retriever");
    }
    if (trim_copy(term).empty()) throw EmptyInputError("empty lookup term");
    if (max_results == 0) throw std::invalid_argument("max_results must be >= 1");

    const std::string key = cassette_key(db, term, max_results);
    if (config_.mode == ClientMode::Replay) {
        auto recorded = entity_cassette_.find(key);
        if (!recorded) throw RetrieverFailureError(retriever_name(db), "CassetteMiss");
        if (recorded->size() > max_results) recorded->resize(max_results);
        return *recorded;
    }

    std::vector<EvidenceItem> items = entity_lookup_live(db, term, max_results);
    if (config_.mode == ClientMode::Record && !config_.entity_cassette_path.empty()) {
        entity_cassette_.append_to_file(config_.entity_cassette_path, key, items);
    }
    return items;
}

std::vector<EvidenceItem> RetrieverRegistry::web_search(const std::string& query,
                                                        size_t max_results) {
    if (trim_copy(query).empty()) throw EmptyInputError("empty search query");
    if (max_results == 0) throw std::invalid_argument("max_results must be >= 1");

    const std::string key = cassette_key(RetrieverId::WebSearch, query, max_results);
    if (config_.mode == ClientMode::Replay) {
        auto recorded = web_cassette_.find(key);
        if (!recorded) throw RetrieverFailureError("WebSearch", "CassetteMiss");
        if (recorded->size() > max_results) recorded->resize(max_results);
        return *recorded;
    }

    std::vector<EvidenceItem> items = web_search_live(query, max_results);
    if (config_.mode == ClientMode::Record && !config_.web_cassette_path.empty()) {
        web_cassette_.append_to_file(config_.web_cassette_path, key, items);
    }
    return items;
}

namespace {

const char* eutils_db_name(RetrieverId id) {
    switch (id) {
        case RetrieverId::Gene: return "gene";
        case RetrieverId::DbSnp: return "snp";
        case RetrieverId::Genome: return "genome";
        case RetrieverId::Protein: return "protein";
        default: return "gene";
    }
}

void honor_retry_after(const httplib::Result& res) {
    if (res && res->status == 429) {
        double wait = 1.0;
        if (res->has_header("Retry-After")) {
            try {
                wait = std::stod(res->get_header_value("Retry-After"));
            } catch (const std::exception&) {
            }
        }
        throw RateLimitedError(wait);
    }
}

}  // namespace

std::vector<EvidenceItem> RetrieverRegistry::entity_lookup_live(RetrieverId db,
                                                                const std::string& term,
                                                                size_t max_results) {
    if (!entity_bucket_.try_acquire()) {
        throw RateLimitedError(entity_bucket_.seconds_until_available());
    }

    httplib::Client client(config_.eutils_endpoint);
    client.set_connection_timeout(10, 0);

    std::string search_path = "/entrez/eutils/esearch.fcgi?db=" + std::string(eutils_db_name(db)) +
                              "&retmode=json&retmax=" + std::to_string(max_results) +
                              "&term=" + httplib::detail::encode_query_param(term);
    if (!config_.ncbi_api_key.empty()) search_path += "&api_key=" + config_.ncbi_api_key;

    auto search_res = client.Get(search_path);
    honor_retry_after(search_res);
    if (!search_res || search_res->status != 200) {
        throw RetrieverFailureError(retriever_name(db), "esearch transport failure");
    }
    nlohmann::json search_json = nlohmann::json::parse(search_res->body, nullptr, false);
    if (search_json.is_discarded()) {
        throw RetrieverFailureError(retriever_name(db), "esearch returned malformed JSON");
    }

    std::vector<std::string> ids;
    for (const auto& id : search_json["esearchresult"].value("idlist", nlohmann::json::array())) {
        ids.push_back(id.get<std::string>());
    }
    if (ids.empty()) return {};

    std::string joined;
    for (size_t i = 0; i < ids.size(); ++i) {
        if (i > 0) joined += ",";
        joined += ids[i];
    }
    std::string summary_path = "/entrez/eutils/esummary.fcgi?db=" +
                               std::string(eutils_db_name(db)) + "&retmode=json&id=" + joined;
    if (!config_.ncbi_api_key.empty()) summary_path += "&api_key=" + config_.ncbi_api_key;

    auto summary_res = client.Get(summary_path);
    honor_retry_after(summary_res);
    if (!summary_res || summary_res->status != 200) {
        throw RetrieverFailureError(retriever_name(db), "esummary transport failure");
    }
    nlohmann::json summary_json = nlohmann::json::parse(summary_res->body, nullptr, false);
    if (summary_json.is_discarded() || !summary_json.contains("result")) {
        throw RetrieverFailureError(retriever_name(db), "esummary returned malformed JSON");
    }

    std::vector<EvidenceItem> items;
    const nlohmann::json& result = summary_json["result"];
    for (const std::string& uid : ids) {
        if (!result.contains(uid)) continue;
        const nlohmann::json& rec = result[uid];
        EvidenceItem item;
        item.source = db;
        item.title = rec.value("name", rec.value("title", uid));
        std::string description = rec.value("description", rec.value("summary", std::string()));
        item.snippet = cap_snippet(
            description.empty() ? item.title : item.title + " - " + description,
            config_.snippet_cap);
        item.locator = std::string(eutils_db_name(db)) + ":" + uid;
        items.push_back(std::move(item));
        if (items.size() == max_results) break;
    }
    return items;
}

std::vector<EvidenceItem> RetrieverRegistry::web_search_live(const std::string& query,
                                                             size_t max_results) {
    if (config_.search_provider.empty() || config_.search_endpoint.empty()) {
        throw RetrieverFailureError("WebSearch", "NotConfigured");
    }
    if (!search_bucket_.try_acquire()) {
        throw RateLimitedError(search_bucket_.seconds_until_available());
    }

    httplib::Client client(config_.search_endpoint);
    client.set_connection_timeout(10, 0);
    std::string path = "/search?q=" + httplib::detail::encode_query_param(query) +
                       "&count=" + std::to_string(max_results) +
                       "&provider=" + config_.search_provider;
    httplib::Headers headers;
    if (!config_.search_api_key.empty()) {
        headers.emplace("Authorization", "Bearer " + config_.search_api_key);
    }
    auto res = client.Get(path, headers);
    honor_retry_after(res);
    if (!res || res->status != 200) {
        throw RetrieverFailureError("WebSearch", "transport failure");
    }
    nlohmann::json j = nlohmann::json::parse(res->body, nullptr, false);
    if (j.is_discarded() || !j.contains("results")) {
        throw RetrieverFailureError("WebSearch", "malformed search reply");
    }

    std::vector<EvidenceItem> items;
    for (const auto& r : j["results"]) {
        EvidenceItem item;
        item.source = RetrieverId::WebSearch;
        item.title = r.value("title", std::string());
        item.snippet = cap_snippet(r.value("snippet", item.title), config_.snippet_cap);
        item.locator = r.value("url", std::string());
        if (item.locator.empty()) continue;
        items.push_back(std::move(item));
        if (items.size() == max_results) break;
    }
    return items;
}

}  // namespace biorag
