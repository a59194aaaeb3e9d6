#include "cohemark/cohe_sampler.hpp"

#include "cohemark/error.hpp"
#include "cohemark/rng.hpp"
#include "cohemark/segmenter.hpp"

namespace cohemark {

std::string_view to_string(GenerationOutcome outcome) {
    return outcome == GenerationOutcome::Completed ? "completed" : "failed";
}

void GenerationConfig::validate() const {
    if (max_sentences < 1) throw Error(Errc::InvalidArgument, "max_sentences must be at least 1");
    if (max_trials_per_sentence < 1) throw Error(Errc::InvalidArgument, "max_trials_per_sentence must be at least 1");
    if (!(temperature > 0.0)) throw Error(Errc::InvalidArgument, "temperature must be positive");
    if (!(repetition_penalty > 0.0)) throw Error(Errc::InvalidArgument, "repetition_penalty must be positive");
}

std::string GenerationRecord::text() const {
    std::string out;
    for (const auto& s : sentences) {
        if (!out.empty()) out += ' ';
        out += s.text;
    }
    return out;
}

std::string prompt_anchor_text(const std::string& prompt, PromptAnchor anchor) {
    if (anchor == PromptAnchor::LastSentence) {
        const auto sentences = segment_sentences(prompt);
        if (!sentences.empty()) return sentences.back().text();
    }
    return std::string(trim(prompt));
}

GenerationRecord generate(const std::string& prompt, const ClusterModel& model, const NsscConfig& nssc,
                          const GenerationConfig& config, const LanguageModel& lm, const Embedder& embedder) {
    config.validate();
    nssc.validate();
    model.require_embedder(embedder.spec());
    if (trim(prompt).empty()) throw Error(Errc::InvalidArgument, "prompt must not be empty");

    GenerationRecord record;
    record.prompt = prompt;

    auto previous = membership_index_of(model, embedder, prompt_anchor_text(prompt, config.prompt_anchor));
    record.prompt_primary = primary_cluster(previous);
    SamplerState state;
    std::string context(trim(prompt));
    const auto total_budget = config.total_trial_budget();

    for (std::size_t t = 0; t < config.max_sentences; ++t) {
        const auto green = green_spaces(previous, state.mode, nssc);
        std::size_t trials = 0;
        std::size_t empty_trials = 0;
        bool accepted = false;
        bool stop = false;
        while (!accepted) {
            if (record.total_trials >= total_budget) {
                record.outcome = GenerationOutcome::Failed;
                record.failure_reason = "total trial budget of " + std::to_string(total_budget) + " exhausted";
                return record;
            }
            if (trials >= config.max_trials_per_sentence) {
                record.outcome = GenerationOutcome::Failed;
                record.failure_reason = empty_trials == trials
                                            ? "language model kept returning empty output"
                                            : "no green candidate within " + std::to_string(trials) +
                                                  " trials for sentence " + std::to_string(t + 1);
                return record;
            }
            const LmRequest request{context, config.temperature, config.repetition_penalty,
                                    derive_seed(config.seed, {t, trials})};
            const auto sample = lm.sample_sentence(request);
            ++trials;
            ++record.total_trials;

            const auto pieces = segment_sentences(sample.sentence);
            if (pieces.empty()) {
                ++empty_trials;
                if (sample.end_of_text) {
                    stop = true;
                    break;
                }
                continue;
            }
            // A candidate that would fuse with the next sentence cannot be replayed.
            const auto& candidate = pieces.front().text();
            if (!ends_at_sentence_boundary(candidate)) continue;

            auto candidate_index = membership_index_of(model, embedder, candidate);
            const auto primary = primary_cluster(candidate_index);
            if (!is_green(green, primary)) continue;

            record.sentences.push_back(AcceptedSentence{candidate, trials, green, state.mode, primary});
            state = advance_state(state, primary_cluster(previous), primary, nssc);
            context += ' ';
            context += candidate;
            previous = std::move(candidate_index);
            accepted = true;
            stop = sample.end_of_text;
        }
        if (stop) break;
    }
    record.outcome = GenerationOutcome::Completed;
    return record;
}

}  // namespace cohemark
