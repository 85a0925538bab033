#pragma once

#include <cstdint>
#include <memory>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "epilog/errors.hpp"

namespace epilog {

// A fixed-dimension feature vector. All values are finite.
struct Embedding {
    std::vector<double> values;

    int dim() const { return static_cast<int>(values.size()); }

    static Embedding zeros(int dim) { return Embedding{std::vector<double>(static_cast<std::size_t>(dim), 0.0)}; }
};

enum class Modality { text, vector_passthrough };

// Cosine similarity in [-1, 1]. Zero-norm inputs yield 0 rather than an
// error: a degenerate text means "no evidence of similarity", and aborting
// an episode over it would be worse than scoring it at zero.
// Throws DimensionMismatch when dims differ.
double cosine(const Embedding& a, const Embedding& b);

// Deterministic text-to-vector encoders. Instances are stateless after
// construction and safe to share across threads.
class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;

    virtual std::string provider_id() const = 0;
    virtual int dim() const = 0;
    virtual Modality modality() const { return Modality::text; }

    // True only for providers whose text and vector payloads live in one
    // joint space (CLIP-style). Cross-modal cosine is refused otherwise.
    virtual bool cross_modal() const { return false; }

    // Deterministic: same input, same output. Throws EmptyInput when the
    // text is empty after whitespace trimming.
    virtual Embedding embed(const std::string& text) const = 0;
};

// Stable 64-bit FNV-1a hash, seed-mixed. Used for feature hashing and for
// cache keys; must not change across platforms or runs.
std::uint64_t fnv1a64(std::string_view s, std::uint64_t seed = 0);

// Lowercased alphanumeric token runs.
std::vector<std::string> tokenize(std::string_view text);

constexpr int kMinHashingDim = 8;
constexpr int kDefaultEmbeddingDim = 64;

// Token-level feature hashing with L2 normalization: each token adds a
// signed unit to two seed-derived buckets. Shared tokens between two texts
// raise their cosine; disjoint token sets land near zero. The default
// offline substitute for a learned sentence encoder.
class HashingProvider final : public EmbeddingProvider {
public:
    explicit HashingProvider(int dim = kDefaultEmbeddingDim, std::uint64_t seed = 0);

    std::string provider_id() const override { return id_; }
    int dim() const override { return dim_; }
    Embedding embed(const std::string& text) const override;

private:
    int dim_;
    std::uint64_t seed_;
    std::string id_;
};

// Decorator that caches embeddings by (provider_id, input hash). The
// retriever rescans memory every step, so each distinct text is encoded
// once. Concurrent reads; fills are serialized.
class CachedProvider final : public EmbeddingProvider {
public:
    explicit CachedProvider(std::shared_ptr<const EmbeddingProvider> inner);

    std::string provider_id() const override { return inner_->provider_id(); }
    int dim() const override { return inner_->dim(); }
    Modality modality() const override { return inner_->modality(); }
    bool cross_modal() const override { return inner_->cross_modal(); }
    Embedding embed(const std::string& text) const override;

    std::size_t cache_size() const;

private:
    std::shared_ptr<const EmbeddingProvider> inner_;
    mutable std::shared_mutex mutex_;
    mutable std::unordered_map<std::string, Embedding> cache_;
};

struct RemoteProviderConfig {
    std::string base_url = "http://127.0.0.1:8900";
    std::string path = "/embed";
    int dim = kDefaultEmbeddingDim;
    int timeout_ms = 10000;
    int max_retries = 1;
};

// Client for a remote encoder endpoint: POST {"texts": [...]} returning
// {"embeddings": [[...], ...]}. Failures surface as ProviderUnavailable.
class RemoteProvider final : public EmbeddingProvider {
public:
    explicit RemoteProvider(RemoteProviderConfig config);

    std::string provider_id() const override;
    int dim() const override { return config_.dim; }
    Embedding embed(const std::string& text) const override;

    std::vector<Embedding> embed_batch(const std::vector<std::string>& texts) const;

private:
    RemoteProviderConfig config_;
};

}  // namespace epilog
