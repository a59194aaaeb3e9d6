#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cohemark/detector.hpp"
#include "cohemark/language_model.hpp"

namespace cohemark {

/// Instruction sent to the paraphrasing model; the two "{}" slots take the
/// prefix and the paragraph, in that order.
inline constexpr std::string_view kParaphrasePromptTemplate =
    "Given the previous prefix and the paragraph after that prefix, paraphrase the paragraph sentence by sentence. "
    "Only output the paraphrased paragraph in your response. Please maintain the core semantic meaning of each "
    "sentence from the original text. Feel free to modify the wording and sentence structure and try to replace "
    "adjacent vocabulary as much as possible to introduce new ways of expression, but do NOT change the primary "
    "information conveyed by the sentences.\n"
    "Previous prefix: {}\n"
    "Paragraph to paraphrase: {}";

std::string render_paraphrase_prompt(std::string_view prefix, std::string_view paragraph);

struct EmbeddingNoiseAttack {
    double sigma = 0.0;
};

struct ParaphraseAttack {
    std::string endpoint;
    CompletionParams params{0.7, 1.0, 1024};
};

using AttackConfig = std::variant<EmbeddingNoiseAttack, ParaphraseAttack>;

/// Throws InvalidArgument for a negative or non-finite sigma or an empty endpoint.
void validate(const AttackConfig& config);

struct ParaphraseOutcome {
    std::string text;
    std::size_t sentences_before = 0;
    std::size_t sentences_after = 0;
};

/// Sends the paraphrase instruction through `client` and returns the rewritten
/// paragraph. Throws EmptyResponse when the model answers with nothing.
ParaphraseOutcome paraphrase_attack(const std::string& prefix, const std::string& text,
                                    const CompletionClient& client, const CompletionParams& params);

struct NoiseAttackResult {
    std::vector<EmbeddingVector> perturbed;
    DetectionResult detection;
};

/// Adds seeded isotropic Gaussian noise of scale `sigma` to every sentence
/// embedding, renormalizes, and replays detection on the perturbed vectors.
/// The prompt embedding (if any) is left untouched; sigma == 0 is an exact no-op.
NoiseAttackResult embedding_noise_attack(const std::optional<EmbeddingVector>& prompt,
                                         std::span<const EmbeddingVector> sentences, double sigma,
                                         std::uint64_t seed, const ClusterModel& model, const NsscConfig& nssc,
                                         double threshold, const DetectOptions& options = {});

/// Convenience overload: embeds the record's sentences (and its prompt when
/// `options.prompt` is set) before perturbing.
NoiseAttackResult embedding_noise_attack(const GenerationRecord& record, double sigma, std::uint64_t seed,
                                         const ClusterModel& model, const Embedder& embedder,
                                         const NsscConfig& nssc, double threshold,
                                         const DetectOptions& options = {});

}  // namespace cohemark
