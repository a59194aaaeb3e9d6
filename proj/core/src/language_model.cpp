#include "cohemark/language_model.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <unordered_set>

#include "cohemark/error.hpp"
#include "cohemark/rng.hpp"
#include "cohemark/segmenter.hpp"

namespace cohemark {

using nlohmann::json;

CorpusLm::CorpusLm(std::vector<std::string> pool, std::shared_ptr<const Embedder> similarity_embedder)
    : embedder_(std::move(similarity_embedder)) {
    for (auto& s : pool) {
        const auto t = trim(s);
        if (!t.empty()) pool_.emplace_back(t);
    }
    if (pool_.empty()) throw Error(Errc::EmptyInput, "mock LM sentence pool is empty");
    if (embedder_) pool_embeddings_ = embedder_->embed_texts(pool_);
}

LmSample CorpusLm::sample_sentence(const LmRequest& request) const {
    const auto context_sentences = segment_sentences(request.context);
    std::unordered_set<std::string_view> seen;
    for (const auto& s : context_sentences) seen.insert(s.text());

    std::optional<EmbeddingVector> tail;
    if (embedder_ && !context_sentences.empty()) {
        tail = embedder_->embed_text(context_sentences.back().text());
    }
    const double temperature = request.temperature > 0.0 ? request.temperature : 1.0;
    const double penalty = request.repetition_penalty > 0.0 ? request.repetition_penalty : 1.0;

    std::vector<double> cumulative(pool_.size());
    double total = 0.0;
    for (std::size_t i = 0; i < pool_.size(); ++i) {
        double w = tail ? std::exp(cosine_similarity(pool_embeddings_[i], *tail) / temperature) : 1.0;
        if (seen.contains(pool_[i])) w /= penalty;
        total += w;
        cumulative[i] = total;
    }
    Rng rng(request.nonce);
    const double target = rng.uniform() * total;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
    const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), pool_.size() - 1);
    return LmSample{pool_[idx], false};
}

CompletionClient::CompletionClient(std::string base_url, RetryPolicy retry, int max_in_flight)
    : http_(std::move(base_url), retry, std::chrono::seconds(300), max_in_flight) {}

CompletionClient::Completion CompletionClient::complete(const std::string& prompt,
                                                        const CompletionParams& params) const {
    const json body = {
        {"prompt", prompt},
        {"temperature", params.temperature},
        {"repetition_penalty", params.repetition_penalty},
        {"max_tokens", params.max_tokens},
    };
    HttpResponse res;
    try {
        res = http_.post_json("/generate", body.dump());
    } catch (const Error& e) {
        throw Error(Errc::LmUnavailable, e.what());
    }
    if (res.status != 200) {
        throw Error(Errc::LmUnavailable, "/generate returned HTTP " + std::to_string(res.status));
    }
    try {
        const auto parsed = json::parse(res.body);
        Completion c;
        c.text = parsed.at("text").get<std::string>();
        c.end_of_text = parsed.value("end_of_text", false);
        return c;
    } catch (const json::exception& e) {
        throw Error(Errc::LmUnavailable, std::string("malformed /generate response: ") + e.what());
    }
}

RemoteLm::RemoteLm(std::shared_ptr<const CompletionClient> client, int max_tokens)
    : client_(std::move(client)), max_tokens_(max_tokens) {
    if (!client_) throw Error(Errc::InvalidArgument, "remote LM needs a completion client");
}

LmSample RemoteLm::sample_sentence(const LmRequest& request) const {
    const auto completion = client_->complete(
        request.context, CompletionParams{request.temperature, request.repetition_penalty, max_tokens_});
    const auto sentences = segment_sentences(completion.text);
    LmSample sample;
    sample.end_of_text = completion.end_of_text;
    if (!sentences.empty()) {
        sample.sentence = sentences.front().text();
        // Truncation means the text went on past this sentence.
        if (sentences.size() > 1) sample.end_of_text = false;
    }
    return sample;
}

}  // namespace cohemark
