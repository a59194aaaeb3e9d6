#include "cohemark/attack.hpp"

#include <cmath>

#include "cohemark/error.hpp"
#include "cohemark/rng.hpp"
#include "cohemark/segmenter.hpp"

namespace cohemark {

std::string render_paraphrase_prompt(std::string_view prefix, std::string_view paragraph) {
    std::string out;
    out.reserve(kParaphrasePromptTemplate.size() + prefix.size() + paragraph.size());
    const auto first = kParaphrasePromptTemplate.find("{}");
    const auto second = kParaphrasePromptTemplate.find("{}", first + 2);
    out += kParaphrasePromptTemplate.substr(0, first);
    out += prefix;
    out += kParaphrasePromptTemplate.substr(first + 2, second - first - 2);
    out += paragraph;
    out += kParaphrasePromptTemplate.substr(second + 2);
    return out;
}

void validate(const AttackConfig& config) {
    if (const auto* noise = std::get_if<EmbeddingNoiseAttack>(&config)) {
        if (!std::isfinite(noise->sigma) || noise->sigma < 0.0) {
            throw Error(Errc::InvalidArgument, "noise sigma must be finite and non-negative");
        }
    } else if (std::get<ParaphraseAttack>(config).endpoint.empty()) {
        throw Error(Errc::InvalidArgument, "paraphrase attack needs an endpoint");
    }
}

ParaphraseOutcome paraphrase_attack(const std::string& prefix, const std::string& text,
                                    const CompletionClient& client, const CompletionParams& params) {
    if (trim(prefix).empty() || trim(text).empty()) {
        throw Error(Errc::InvalidArgument, "paraphrase attack needs a non-empty prefix and text");
    }
    const auto completion = client.complete(render_paraphrase_prompt(prefix, text), params);
    const auto rewritten = trim(completion.text);
    if (rewritten.empty()) throw Error(Errc::EmptyResponse, "paraphraser returned an empty response");
    ParaphraseOutcome out;
    out.text = std::string(rewritten);
    out.sentences_before = segment_sentences(text).size();
    out.sentences_after = segment_sentences(out.text).size();
    return out;
}

NoiseAttackResult embedding_noise_attack(const std::optional<EmbeddingVector>& prompt,
                                         std::span<const EmbeddingVector> sentences, double sigma,
                                         std::uint64_t seed, const ClusterModel& model, const NsscConfig& nssc,
                                         double threshold, const DetectOptions& options) {
    validate(AttackConfig{EmbeddingNoiseAttack{sigma}});
    NoiseAttackResult result;
    result.perturbed.reserve(sentences.size());
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        if (sigma == 0.0) {
            result.perturbed.push_back(sentences[i]);
            continue;
        }
        // One noise stream per sentence position, so every sigma sees the same directions.
        Rng rng(derive_seed(seed, {i}));
        const auto clean = sentences[i].values();
        std::vector<double> noisy(clean.begin(), clean.end());
        for (auto& v : noisy) v += sigma * rng.normal();
        result.perturbed.push_back(EmbeddingVector::normalized(std::move(noisy)));
    }
    result.detection = detect_embeddings(prompt, result.perturbed, model, nssc, threshold, options);
    return result;
}

NoiseAttackResult embedding_noise_attack(const GenerationRecord& record, double sigma, std::uint64_t seed,
                                         const ClusterModel& model, const Embedder& embedder,
                                         const NsscConfig& nssc, double threshold, const DetectOptions& options) {
    model.require_embedder(embedder.spec());
    const auto sentences = segment_sentences(record.text());
    const auto embeddings = embedder.embed(sentences);
    std::optional<EmbeddingVector> prompt;
    if (options.prompt && !trim(*options.prompt).empty()) {
        prompt = embedder.embed_text(prompt_anchor_text(*options.prompt, options.prompt_anchor));
    }
    return embedding_noise_attack(prompt, embeddings, sigma, seed, model, nssc, threshold, options);
}

}  // namespace cohemark
