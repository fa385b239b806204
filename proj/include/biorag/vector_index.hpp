#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "biorag/corpus.hpp"
#include "biorag/embedding.hpp"
#include "biorag/mesh.hpp"

namespace biorag {

struct IndexedDocument {
    CleanDocument doc;
    EmbeddingVector vector;  // unit norm
};

struct SearchHit {
    std::string doc_id;
    double score = 0.0;        // cosine, in [-1, 1]
    uint32_t rank = 0;         // 1-based, contiguous
    bool fallback_used = false;
};

// Exhaustive filter-then-rank index. Immutable after build/load; concurrent
// searches are safe.
class VectorIndex {
public:
    VectorIndex() = default;

    // Embeds title + " " + abstract per document, input order preserved.
    // Throws DuplicateIdError on a repeated id; embed failures carry the
    // document id.
    static VectorIndex build(const std::vector<CleanDocument>& docs, const Embedder& embedder);
    static VectorIndex build_stream(std::istream& corpus_jsonl, const Embedder& embedder);

    // Top-k of the filter's candidates by (cosine desc, id asc). When an
    // any-of filter matches nothing, re-runs unfiltered with
    // fallback_used=true on every hit.
    std::vector<SearchHit> search(const EmbeddingVector& query, const MeshFilter& filter,
                                  size_t k) const;

    const IndexedDocument* find(const std::string& doc_id) const;
    const std::vector<IndexedDocument>& documents() const { return docs_; }
    size_t size() const { return docs_.size(); }
    const EmbedderSpec& embedder_spec() const { return spec_; }

    // Binary layout (all integers little-endian):
    //   "BIORAG-IDX v1\n"
    //   str name, str version, u32 dim          (embedder spec)
    //   u64 doc_count
    //   per doc: str id, str title, str abstract,
    //            u32 mesh_count, mesh strings, i32 year, dim * f32
    //   str = u32 byte length + UTF-8 bytes
    void save(std::ostream& out) const;
    void save_file(const std::string& path) const;
    static VectorIndex load(std::istream& in);
    static VectorIndex load_file(const std::string& path);

private:
    EmbedderSpec spec_;
    std::vector<IndexedDocument> docs_;
    std::unordered_map<std::string, size_t> by_id_;

    void insert(IndexedDocument item);
};

}  // namespace biorag
