#include "biorag/embedding.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdlib>

#include "httplib.h"
#include "json.hpp"

#include "biorag/errors.hpp"

namespace biorag {

double EmbeddingVector::norm() const {
    double sum = 0.0;
    for (float v : values) sum += static_cast<double>(v) * static_cast<double>(v);
    return std::sqrt(sum);
}

uint64_t fnv1a64(std::string_view bytes) {
    uint64_t hash = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        hash ^= static_cast<uint64_t>(c);
        hash *= 1099511628211ull;
    }
    return hash;
}

namespace {

std::string trim_copy(const std::string& s) {
    size_t begin = s.find_first_not_of(" \t\n\r\f\v");
    if (begin == std::string::npos) return "";
    size_t end = s.find_last_not_of(" \t\n\r\f\v");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

EmbedderSpec ReferenceEmbedder::spec() const {
    return {"ref256", kDimension, "1"};
}

EmbeddingVector ReferenceEmbedder::embed(const std::string& text) const {
    std::string trimmed = trim_copy(text);
    if (trimmed.empty()) throw EmptyInputError("cannot embed empty text");

    std::array<uint32_t, kDimension> counts{};
    bool any_token = false;
    size_t i = 0;
    while (i < trimmed.size()) {
        if (!std::isalnum(static_cast<unsigned char>(trimmed[i]))) {
            ++i;
            continue;
        }
        std::string token;
        while (i < trimmed.size() && std::isalnum(static_cast<unsigned char>(trimmed[i]))) {
            token.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(trimmed[i]))));
            ++i;
        }
        counts[fnv1a64(token) % kDimension]++;
        any_token = true;
    }
    if (!any_token) counts[fnv1a64(trimmed) % kDimension] = 1;

    double norm = 0.0;
    for (uint32_t c : counts) norm += static_cast<double>(c) * static_cast<double>(c);
    norm = std::sqrt(norm);

    EmbeddingVector vec;
    vec.values.resize(kDimension);
    for (size_t b = 0; b < kDimension; ++b) {
        vec.values[b] = static_cast<float>(static_cast<double>(counts[b]) / norm);
    }
    return vec;
}

EmbeddingVector reference_embed(const std::string& text) {
    return ReferenceEmbedder{}.embed(text);
}

RemoteEmbedder::RemoteEmbedder(std::string endpoint, size_t dimension, std::string name)
    : endpoint_(std::move(endpoint)), dimension_(dimension), name_(std::move(name)) {}

EmbedderSpec RemoteEmbedder::spec() const {
    return {name_, dimension_, "remote"};
}

EmbeddingVector RemoteEmbedder::embed(const std::string& text) const {
    if (trim_copy(text).empty()) throw EmptyInputError("cannot embed empty text");

    httplib::Client client(endpoint_);
    client.set_connection_timeout(5, 0);
    nlohmann::json body{{"text", text}};
    auto res = client.Post("/embed", body.dump(), "application/json");
    if (!res || res->status != 200) {
        throw BackendUnavailableError("embedding backend unreachable: " + endpoint_);
    }
    nlohmann::json reply = nlohmann::json::parse(res->body, nullptr, false);
    if (reply.is_discarded() || !reply.contains("vector")) {
        throw BackendUnavailableError("embedding backend returned malformed reply");
    }
    EmbeddingVector vec;
    for (const auto& v : reply["vector"]) vec.values.push_back(v.get<float>());
    if (vec.dimension() != dimension_) {
        throw DimensionMismatchError(vec.dimension(), dimension_);
    }
    // normalization happens at embed time, never at query time
    double norm = vec.norm();
    if (norm <= 0.0) {
        throw BackendUnavailableError("embedding backend returned a zero vector");
    }
    for (float& value : vec.values) value = static_cast<float>(value / norm);
    return vec;
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dimension() != b.dimension()) {
        throw DimensionMismatchError(a.dimension(), b.dimension());
    }
    double dot = 0.0;
    for (size_t i = 0; i < a.values.size(); ++i) {
        dot += static_cast<double>(a.values[i]) * static_cast<double>(b.values[i]);
    }
    return std::clamp(dot, -1.0, 1.0);
}

std::unique_ptr<Embedder> make_embedder(const std::string& name) {
    if (name.empty() || name == "ref256") return std::make_unique<ReferenceEmbedder>();
    const char* endpoint = std::getenv("BIORAG_EMBED_ENDPOINT");
    if (endpoint == nullptr || *endpoint == '\0') {
        throw BackendUnavailableError("embedder '" + name +
                                      "' requires BIORAG_EMBED_ENDPOINT");
    }
    return std::make_unique<RemoteEmbedder>(endpoint, ReferenceEmbedder::kDimension, name);
}

}  // namespace biorag
