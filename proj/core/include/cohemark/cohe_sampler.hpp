#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cohemark/embedder.hpp"
#include "cohemark/fuzzy_cmeans.hpp"
#include "cohemark/language_model.hpp"
#include "cohemark/nssc.hpp"

namespace cohemark {

/// Which part of the prompt stands in for the "previous sentence" of the first step.
enum class PromptAnchor { WholePrompt, LastSentence };

struct GenerationConfig {
    std::size_t max_sentences = 15;
    std::size_t max_trials_per_sentence = 50;
    double temperature = 0.9;
    double repetition_penalty = 1.05;
    /// 0 selects 16 * max_sentences.
    std::size_t max_total_trials = 0;
    std::uint64_t seed = 0;
    PromptAnchor prompt_anchor = PromptAnchor::WholePrompt;

    void validate() const;
    [[nodiscard]] std::size_t total_trial_budget() const noexcept {
        return max_total_trials != 0 ? max_total_trials : 16 * max_sentences;
    }
};

enum class GenerationOutcome { Completed, Failed };

std::string_view to_string(GenerationOutcome outcome);

struct AcceptedSentence {
    std::string text;
    std::size_t trials = 0;
    std::vector<ClusterId> green;
    NsscMode mode = NsscMode::V1;
    ClusterId primary = 0;

    friend bool operator==(const AcceptedSentence&, const AcceptedSentence&) = default;
};

struct GenerationRecord {
    std::string prompt;
    ClusterId prompt_primary = 0;
    std::vector<AcceptedSentence> sentences;
    GenerationOutcome outcome = GenerationOutcome::Completed;
    std::string failure_reason;
    std::size_t total_trials = 0;

    /// Accepted sentences joined with single spaces.
    [[nodiscard]] std::string text() const;

    friend bool operator==(const GenerationRecord&, const GenerationRecord&) = default;
};

/// The text standing in for the first step's previous sentence.
std::string prompt_anchor_text(const std::string& prompt, PromptAnchor anchor);

/// Sentence-level rejection sampling: for every step the previous sentence's
/// membership index and the current NSSC mode fix a green set, and LM
/// candidates are drawn until one's primary cluster is green. Exhausted trial
/// budgets end the record as Failed; LM transport errors throw LmUnavailable.
GenerationRecord generate(const std::string& prompt, const ClusterModel& model, const NsscConfig& nssc,
                          const GenerationConfig& config, const LanguageModel& lm, const Embedder& embedder);

}  // namespace cohemark
