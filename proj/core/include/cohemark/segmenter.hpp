#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cohemark/types.hpp"

namespace cohemark {

/// Abbreviations whose trailing period never ends a sentence. Matched
/// case-insensitively against the whitespace-delimited token.
std::span<const std::string_view> sentence_abbreviations();

/// Rule-based splitter: a run of '.', '!' or '?' (optionally followed by
/// closing quotes or brackets) ends a sentence when whitespace or the end of
/// input follows, unless the token is a listed abbreviation. Fragments shorter
/// than two characters are merged into the following sentence (or the
/// preceding one when they come last).
std::vector<Sentence> segment_sentences(std::string_view text);

/// True when `sentence` ends on a boundary that segment_sentences would honor,
/// i.e. appending " <more text>" keeps it as a separate sentence.
bool ends_at_sentence_boundary(std::string_view sentence);

/// Joins sentence texts with single spaces.
std::string join_sentences(std::span<const Sentence> sentences);
std::string join_sentences(std::span<const std::string> sentences);

std::string_view trim(std::string_view s);

}  // namespace cohemark
