#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace cohemark {

/// Number of built-in topics the synthetic generator draws vocabulary from.
std::size_t synthetic_topic_count();

/// Template sentences over per-topic vocabularies; topics are visited round-robin
/// so every topic gets an equal share. Deterministic in `seed`.
std::vector<std::string> synthetic_sentences(std::size_t count, std::uint64_t seed);

/// Two-sentence prompts, each on a single random topic.
std::vector<std::string> synthetic_prompts(std::size_t count, std::uint64_t seed);

/// Unwatermarked texts: `sentences_per_text` sentences drawn uniformly (with
/// replacement) from `pool`, joined with single spaces.
std::vector<std::string> null_texts(std::span<const std::string> pool, std::size_t count,
                                    std::size_t sentences_per_text, std::uint64_t seed);

}  // namespace cohemark
