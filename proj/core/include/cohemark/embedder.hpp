#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cohemark/http.hpp"
#include "cohemark/types.hpp"

namespace cohemark {

enum class EmbedderKind { Hash, Remote };

/// `identity` fingerprints the embedding behavior: equal identities must
/// produce equal vectors for equal input.
struct EmbedderSpec {
    EmbedderKind kind = EmbedderKind::Hash;
    std::size_t dimension = 0;
    std::string identity;
};

class Embedder {
  public:
    virtual ~Embedder() = default;

    [[nodiscard]] virtual const EmbedderSpec& spec() const noexcept = 0;

    /// One unit-norm vector per sentence, in input order.
    [[nodiscard]] virtual std::vector<EmbeddingVector> embed(std::span<const Sentence> sentences) const = 0;

    /// Embeds a single piece of text as one pseudo-sentence.
    [[nodiscard]] EmbeddingVector embed_text(std::string_view text) const;
    [[nodiscard]] std::vector<EmbeddingVector> embed_texts(std::span<const std::string> texts) const;
};

/// Token-bucket embedder: lowercases, splits on non-alphanumerics, hashes each
/// token into one of `dimension` buckets and L2-normalizes the counts.
class HashEmbedder final : public Embedder {
  public:
    static constexpr std::size_t kDefaultDimension = 64;
    static constexpr std::uint64_t kDefaultSeed = 0x5EED'C0DE'2024ULL;

    explicit HashEmbedder(std::size_t dimension = kDefaultDimension, std::uint64_t seed = kDefaultSeed);

    [[nodiscard]] const EmbedderSpec& spec() const noexcept override { return spec_; }
    [[nodiscard]] std::vector<EmbeddingVector> embed(std::span<const Sentence> sentences) const override;

    [[nodiscard]] EmbeddingVector embed_one(std::string_view text) const;

  private:
    EmbedderSpec spec_;
    std::uint64_t seed_;
};

/// Client for the sidecar's POST /embed endpoint.
class RemoteEmbedder final : public Embedder {
  public:
    static constexpr std::size_t kMaxBatch = 128;
    /// Remote vectors must be unit norm within this tolerance before they are accepted.
    static constexpr double kRemoteNormTolerance = 1e-5;

    /// Probes the endpoint once to learn the served model and dimension.
    /// When `expected_dimension` is set a different served width is a DimensionMismatch.
    static std::unique_ptr<RemoteEmbedder> connect(const std::string& base_url,
                                                   std::optional<std::size_t> expected_dimension = std::nullopt,
                                                   RetryPolicy retry = {});

    [[nodiscard]] const EmbedderSpec& spec() const noexcept override { return spec_; }
    [[nodiscard]] std::vector<EmbeddingVector> embed(std::span<const Sentence> sentences) const override;

    [[nodiscard]] const std::string& model_name() const noexcept { return model_; }

  private:
    RemoteEmbedder(std::unique_ptr<JsonHttpClient> client, std::string model, std::size_t dimension);

    struct Batch {
        std::vector<std::vector<double>> vectors;
        std::size_t dimension = 0;
        std::string model;
    };
    static Batch request(const JsonHttpClient& client, std::span<const std::string> texts);

    std::unique_ptr<JsonHttpClient> client_;
    std::string model_;
    EmbedderSpec spec_;
};

struct EmbedderOptions {
    EmbedderKind kind = EmbedderKind::Hash;
    std::size_t dimension = HashEmbedder::kDefaultDimension;
    std::uint64_t hash_seed = HashEmbedder::kDefaultSeed;
    std::string url;
};

std::unique_ptr<Embedder> make_embedder(const EmbedderOptions& options);

/// Rebuilds the embedder named by a model's embedder identity. Remote
/// identities connect to `remote_url` and must report the same model and width.
std::unique_ptr<Embedder> embedder_for_identity(const std::string& identity, const std::string& remote_url = {});

}  // namespace cohemark
