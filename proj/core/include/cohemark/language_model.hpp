#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "cohemark/embedder.hpp"
#include "cohemark/http.hpp"

namespace cohemark {

struct LmRequest {
    std::string context;
    double temperature = 0.9;
    double repetition_penalty = 1.05;
    std::uint64_t nonce = 0;
};

struct LmSample {
    std::string sentence;
    bool end_of_text = false;
};

/// Sentence-at-a-time language model. Implementations must be safe to call
/// concurrently from independent generations.
class LanguageModel {
  public:
    virtual ~LanguageModel() = default;
    [[nodiscard]] virtual LmSample sample_sentence(const LmRequest& request) const = 0;
};

/// Offline mock LM drawing whole sentences from a pool. With a similarity
/// embedder, a sentence's weight is exp(cos(sentence, last context sentence) / T);
/// sentences already present in the context are divided by the repetition penalty.
class CorpusLm final : public LanguageModel {
  public:
    explicit CorpusLm(std::vector<std::string> pool, std::shared_ptr<const Embedder> similarity_embedder = nullptr);

    [[nodiscard]] LmSample sample_sentence(const LmRequest& request) const override;
    [[nodiscard]] std::size_t pool_size() const noexcept { return pool_.size(); }

  private:
    std::vector<std::string> pool_;
    std::shared_ptr<const Embedder> embedder_;
    std::vector<EmbeddingVector> pool_embeddings_;
};

struct CompletionParams {
    double temperature = 0.9;
    double repetition_penalty = 1.05;
    int max_tokens = 128;
};

/// Client for the sidecar's POST /generate endpoint.
class CompletionClient {
  public:
    struct Completion {
        std::string text;
        bool end_of_text = false;
    };

    explicit CompletionClient(std::string base_url, RetryPolicy retry = {}, int max_in_flight = 4);

    /// Throws LmUnavailable on transport, status or schema failures.
    [[nodiscard]] Completion complete(const std::string& prompt, const CompletionParams& params) const;

  private:
    JsonHttpClient http_;
};

/// Remote LM: the completion is truncated to its first sentence.
class RemoteLm final : public LanguageModel {
  public:
    explicit RemoteLm(std::shared_ptr<const CompletionClient> client, int max_tokens = 128);

    [[nodiscard]] LmSample sample_sentence(const LmRequest& request) const override;

  private:
    std::shared_ptr<const CompletionClient> client_;
    int max_tokens_;
};

}  // namespace cohemark
