#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace biorag {

// Unit-norm sentence embedding. All stored and compared vectors are
// normalized at embed time, never at query time.
struct EmbeddingVector {
    std::vector<float> values;

    size_t dimension() const { return values.size(); }
    double norm() const;
};

struct EmbedderSpec {
    std::string name;
    size_t dimension = 0;
    std::string version;

    bool operator==(const EmbedderSpec&) const = default;
};

class Embedder {
public:
    virtual ~Embedder() = default;
    virtual EmbedderSpec spec() const = 0;
    // Deterministic for a fixed (spec, text). Throws EmptyInputError on
    // empty/whitespace-only text; remote backends throw BackendUnavailableError.
    virtual EmbeddingVector embed(const std::string& text) const = 0;
};

// FNV-1a 64-bit. Fixed hash so reference embeddings are reproducible
// bit-for-bit across runs and platforms.
uint64_t fnv1a64(std::string_view bytes);

// Deterministic stand-in for a trained sentence embedder: lowercase maximal
// alphanumeric runs, each token hashed with FNV-1a 64 into one of 256
// buckets, bucket counts L2-normalized. Inputs with no alphanumeric run hash
// the whole trimmed text into a single bucket.
class ReferenceEmbedder : public Embedder {
public:
    static constexpr size_t kDimension = 256;

    EmbedderSpec spec() const override;
    EmbeddingVector embed(const std::string& text) const override;
};

EmbeddingVector reference_embed(const std::string& text);

// Wire contract: POST {"text": ...} -> {"vector": [...], "dim": n}.
// Endpoint from config or BIORAG_EMBED_ENDPOINT.
class RemoteEmbedder : public Embedder {
public:
    RemoteEmbedder(std::string endpoint, size_t dimension, std::string name = "remote");

    EmbedderSpec spec() const override;
    EmbeddingVector embed(const std::string& text) const override;

private:
    std::string endpoint_;
    size_t dimension_;
    std::string name_;
};

// Dot product of unit vectors, clamped to [-1, 1]. Throws
// DimensionMismatchError when dimensions differ.
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

// "ref256" -> ReferenceEmbedder; anything else is treated as a remote
// embedder name resolved via BIORAG_EMBED_ENDPOINT.
std::unique_ptr<Embedder> make_embedder(const std::string& name);

}  // namespace biorag
