#include "epilog/embedding.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <mutex>

namespace epilog {

double cosine(const Embedding& a, const Embedding& b) {
    if (a.dim() != b.dim()) {
        throw DimensionMismatch("cosine: dim " + std::to_string(a.dim()) + " vs " +
                                std::to_string(b.dim()));
    }
    double dot = 0.0;
    double norm_a = 0.0;
    double norm_b = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        dot += a.values[i] * b.values[i];
        norm_a += a.values[i] * a.values[i];
        norm_b += b.values[i] * b.values[i];
    }
    if (norm_a == 0.0 || norm_b == 0.0) {
        return 0.0;
    }
    return dot / (std::sqrt(norm_a) * std::sqrt(norm_b));
}

std::uint64_t fnv1a64(std::string_view s, std::uint64_t seed) {
    // Offset basis mixed with the seed so distinct seeds give unrelated
    // bucket assignments.
    std::uint64_t h = 14695981039346656037ull ^ (seed * 0x9e3779b97f4a7c15ull);
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            current.push_back(static_cast<char>(std::tolower(c)));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) {
        tokens.push_back(std::move(current));
    }
    return tokens;
}

namespace {

bool is_blank(const std::string& text) {
    return std::all_of(text.begin(), text.end(),
                       [](unsigned char c) { return std::isspace(c) != 0; });
}

}  // namespace

HashingProvider::HashingProvider(int dim, std::uint64_t seed) : dim_(dim), seed_(seed) {
    if (dim < kMinHashingDim) {
        throw InvalidDim("hashing provider needs dim >= " + std::to_string(kMinHashingDim) +
                         ", got " + std::to_string(dim));
    }
    id_ = "hashing-d" + std::to_string(dim) + "-s" + std::to_string(seed);
}

Embedding HashingProvider::embed(const std::string& text) const {
    if (text.empty() || is_blank(text)) {
        throw EmptyInput("embed: empty text");
    }
    Embedding out = Embedding::zeros(dim_);
    // Two signed buckets per token: collisions need both hashes to agree,
    // which keeps distinct tokens separable at small dims.
    for (const std::string& token : tokenize(text)) {
        const std::uint64_t h1 = fnv1a64(token, seed_ * 2 + 1);
        const std::uint64_t h2 = fnv1a64(token, seed_ * 2 + 2);
        const double s1 = (h1 >> 63) ? 1.0 : -1.0;
        const double s2 = (h2 >> 63) ? 1.0 : -1.0;
        out.values[h1 % static_cast<std::uint64_t>(dim_)] += s1;
        out.values[h2 % static_cast<std::uint64_t>(dim_)] += s2;
    }
    double norm = 0.0;
    for (double v : out.values) {
        norm += v * v;
    }
    if (norm > 0.0) {
        const double inv = 1.0 / std::sqrt(norm);
        for (double& v : out.values) {
            v *= inv;
        }
    }
    return out;
}

CachedProvider::CachedProvider(std::shared_ptr<const EmbeddingProvider> inner)
    : inner_(std::move(inner)) {}

Embedding CachedProvider::embed(const std::string& text) const {
    {
        std::shared_lock lock(mutex_);
        auto it = cache_.find(text);
        if (it != cache_.end()) {
            return it->second;
        }
    }
    Embedding computed = inner_->embed(text);
    std::unique_lock lock(mutex_);
    auto [it, inserted] = cache_.emplace(text, std::move(computed));
    return it->second;
}

std::size_t CachedProvider::cache_size() const {
    std::shared_lock lock(mutex_);
    return cache_.size();
}

}  // namespace epilog
