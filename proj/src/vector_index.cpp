#include "biorag/vector_index.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <unordered_set>

#include "biorag/errors.hpp"

namespace biorag {

namespace {

constexpr char kMagicPrefix[] = "BIORAG-IDX v";
constexpr uint32_t kFormatVersion = 1;
constexpr uint32_t kMaxStringBytes = 64u * 1024u * 1024u;

void write_u32(std::ostream& out, uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

void write_u64(std::ostream& out, uint64_t v) {
    write_u32(out, static_cast<uint32_t>(v));
    write_u32(out, static_cast<uint32_t>(v >> 32));
}

void write_str(std::ostream& out, const std::string& s) {
    write_u32(out, static_cast<uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void write_f32(std::ostream& out, float f) {
    uint32_t bits;
    std::memcpy(&bits, &f, 4);
    write_u32(out, bits);
}

uint32_t read_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (in.gcount() != 4) throw CorruptIndexError("truncated index stream");
    return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
           (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

uint64_t read_u64(std::istream& in) {
    uint64_t lo = read_u32(in);
    uint64_t hi = read_u32(in);
    return lo | (hi << 32);
}

std::string read_str(std::istream& in) {
    uint32_t len = read_u32(in);
    if (len > kMaxStringBytes) throw CorruptIndexError("string length out of range");
    std::string s(len, '\0');
    in.read(s.data(), len);
    if (static_cast<uint32_t>(in.gcount()) != len) throw CorruptIndexError("truncated index stream");
    return s;
}

float read_f32(std::istream& in) {
    uint32_t bits = read_u32(in);
    float f;
    std::memcpy(&f, &bits, 4);
    return f;
}

}  // namespace

void VectorIndex::insert(IndexedDocument item) {
    if (!by_id_.emplace(item.doc.id, docs_.size()).second) {
        throw DuplicateIdError(item.doc.id);
    }
    docs_.push_back(std::move(item));
}

VectorIndex VectorIndex::build(const std::vector<CleanDocument>& docs, const Embedder& embedder) {
    VectorIndex index;
    index.spec_ = embedder.spec();
    for (const CleanDocument& doc : docs) {
        EmbeddingVector vec;
        try {
            vec = embedder.embed(doc.title + " " + doc.abstract);
        } catch (const Error& e) {
            throw Error("embedding failed for doc '" + doc.id + "': " + e.what());
        }
        index.insert(IndexedDocument{doc, std::move(vec)});
    }
    return index;
}

VectorIndex VectorIndex::build_stream(std::istream& corpus_jsonl, const Embedder& embedder) {
    return build(load_corpus(corpus_jsonl), embedder);
}

std::vector<SearchHit> VectorIndex::search(const EmbeddingVector& query, const MeshFilter& filter,
                                           size_t k) const {
    if (k == 0) throw std::invalid_argument("k must be >= 1");
    if (query.dimension() != spec_.dimension) {
        throw DimensionMismatchError(query.dimension(), spec_.dimension);
    }

    auto rank = [&](bool apply_filter, bool fallback) {
        std::vector<SearchHit> hits;
        for (const IndexedDocument& item : docs_) {
            if (apply_filter && !filter_matches(filter, item.doc)) continue;
            hits.push_back(SearchHit{item.doc.id, cosine_similarity(query, item.vector), 0, fallback});
        }
        std::sort(hits.begin(), hits.end(), [](const SearchHit& a, const SearchHit& b) {
            if (a.score != b.score) return a.score > b.score;
            return a.doc_id < b.doc_id;
        });
        if (hits.size() > k) hits.resize(k);
        for (size_t i = 0; i < hits.size(); ++i) hits[i].rank = static_cast<uint32_t>(i + 1);
        return hits;
    };

    std::vector<SearchHit> hits = rank(true, false);
    if (hits.empty() && filter.mode == MeshFilterMode::AnyOf) {
        hits = rank(false, true);
    }
    return hits;
}

const IndexedDocument* VectorIndex::find(const std::string& doc_id) const {
    auto it = by_id_.find(doc_id);
    return it == by_id_.end() ? nullptr : &docs_[it->second];
}

void VectorIndex::save(std::ostream& out) const {
    out << kMagicPrefix << kFormatVersion << '\n';
    write_str(out, spec_.name);
    write_str(out, spec_.version);
    write_u32(out, static_cast<uint32_t>(spec_.dimension));
    write_u64(out, docs_.size());
    for (const IndexedDocument& item : docs_) {
        write_str(out, item.doc.id);
        write_str(out, item.doc.title);
        write_str(out, item.doc.abstract);
        write_u32(out, static_cast<uint32_t>(item.doc.mesh.size()));
        for (const std::string& term : item.doc.mesh) write_str(out, term);
        write_u32(out, static_cast<uint32_t>(item.doc.year));
        for (float v : item.vector.values) write_f32(out, v);
    }
    if (!out) throw Error("index write failure");
}

void VectorIndex::save_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open index file for writing: " + path);
    save(out);
}

VectorIndex VectorIndex::load(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) throw FormatError("empty index stream");
    if (header.rfind(kMagicPrefix, 0) != 0) throw FormatError("bad index magic");
    uint32_t version = 0;
    try {
        version = static_cast<uint32_t>(std::stoul(header.substr(sizeof(kMagicPrefix) - 1)));
    } catch (const std::exception&) {
        throw FormatError("bad index magic");
    }
    if (version != kFormatVersion) {
        throw UnsupportedVersionError("unsupported index version v" + std::to_string(version));
    }

    VectorIndex index;
    index.spec_.name = read_str(in);
    index.spec_.version = read_str(in);
    index.spec_.dimension = read_u32(in);
    uint64_t count = read_u64(in);
    for (uint64_t i = 0; i < count; ++i) {
        IndexedDocument item;
        item.doc.id = read_str(in);
        item.doc.title = read_str(in);
        item.doc.abstract = read_str(in);
        uint32_t mesh_count = read_u32(in);
        for (uint32_t m = 0; m < mesh_count; ++m) item.doc.mesh.push_back(read_str(in));
        item.doc.year = static_cast<int32_t>(read_u32(in));
        item.vector.values.resize(index.spec_.dimension);
        for (size_t d = 0; d < index.spec_.dimension; ++d) item.vector.values[d] = read_f32(in);
        try {
            index.insert(std::move(item));
        } catch (const DuplicateIdError&) {
            throw CorruptIndexError("duplicate id in index stream");
        }
    }
    return index;
}

VectorIndex VectorIndex::load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open index file: " + path);
    return load(in);
}

}  // namespace biorag
