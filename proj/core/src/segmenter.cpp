#include "cohemark/segmenter.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace cohemark {
namespace {

constexpr std::array<std::string_view, 8> kAbbreviations = {
    "dr.", "mr.", "mrs.", "ms.", "u.s.", "e.g.", "i.e.", "etc.",
};

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }

/// Length in bytes of a closing quote/bracket starting at `pos`, or 0.
std::size_t closer_length(std::string_view text, std::size_t pos) {
    const char c = text[pos];
    if (c == '"' || c == '\'' || c == ')' || c == ']') return 1;
    // U+2019 and U+201D
    if (text.substr(pos, 3) == "\xE2\x80\x99" || text.substr(pos, 3) == "\xE2\x80\x9D") return 3;
    return 0;
}

bool is_opener(char c) { return c == '"' || c == '\'' || c == '(' || c == '['; }

bool equals_ignore_case(std::string_view a, std::string_view b) {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) ==
                      std::tolower(static_cast<unsigned char>(y));
           });
}

/// Token ending at `period` (inclusive), from the previous whitespace, without leading openers.
bool is_abbreviation(std::string_view text, std::size_t begin, std::size_t period) {
    std::size_t tok = period;
    while (tok > begin && !is_space(text[tok - 1])) --tok;
    while (tok < period && is_opener(text[tok])) ++tok;
    const auto token = text.substr(tok, period - tok + 1);
    return std::any_of(kAbbreviations.begin(), kAbbreviations.end(),
                       [&](std::string_view abbr) { return equals_ignore_case(token, abbr); });
}

std::size_t codepoint_count(std::string_view s) {
    return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) {
        return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
    }));
}

struct Span {
    std::size_t begin;
    std::size_t end;
};

std::vector<Span> raw_pieces(std::string_view text) {
    std::vector<Span> pieces;
    std::size_t start = 0;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        if (!is_terminator(text[i])) {
            ++i;
            continue;
        }
        std::size_t end = i;
        while (end < n && is_terminator(text[end])) ++end;
        const bool single_period = (end - i == 1) && text[i] == '.';
        while (end < n) {
            const auto len = closer_length(text, end);
            if (len == 0) break;
            end += len;
        }
        const bool boundary = (end == n || is_space(text[end])) &&
                              !(single_period && is_abbreviation(text, start, i));
        if (boundary) {
            pieces.push_back({start, end});
            start = end;
        }
        i = end;
    }
    if (start < n) pieces.push_back({start, n});
    // Drop whitespace-only pieces.
    std::erase_if(pieces, [&](const Span& p) { return trim(text.substr(p.begin, p.end - p.begin)).empty(); });
    return pieces;
}

}  // namespace

std::span<const std::string_view> sentence_abbreviations() { return kAbbreviations; }

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

std::vector<Sentence> segment_sentences(std::string_view text) {
    const auto pieces = raw_pieces(text);
    const auto piece_text = [&](const Span& p) { return trim(text.substr(p.begin, p.end - p.begin)); };

    std::vector<Span> merged;
    bool pending = false;
    std::size_t pending_begin = 0;
    for (std::size_t k = 0; k < pieces.size(); ++k) {
        Span p = pieces[k];
        if (pending) {
            p.begin = pending_begin;
            pending = false;
        }
        const bool is_short = codepoint_count(piece_text(p)) < 2;
        if (is_short && k + 1 < pieces.size()) {
            pending = true;
            pending_begin = p.begin;
            continue;
        }
        if (is_short && !merged.empty()) {
            merged.back().end = p.end;
            continue;
        }
        merged.push_back(p);
    }

    std::vector<Sentence> out;
    out.reserve(merged.size());
    for (const auto& p : merged) {
        out.emplace_back(std::string(piece_text(p)), out.size());
    }
    return out;
}

bool ends_at_sentence_boundary(std::string_view sentence) {
    const auto trimmed = trim(sentence);
    if (trimmed.empty()) return false;
    std::string probe(trimmed);
    probe += " Next.";
    const auto parts = segment_sentences(probe);
    return parts.size() == 2 && parts[0].text() == trimmed;
}

std::string join_sentences(std::span<const Sentence> sentences) {
    std::string out;
    for (const auto& s : sentences) {
        if (!out.empty()) out += ' ';
        out += s.text();
    }
    return out;
}

std::string join_sentences(std::span<const std::string> sentences) {
    std::string out;
    for (const auto& s : sentences) {
        if (!out.empty()) out += ' ';
        out += s;
    }
    return out;
}

}  // namespace cohemark
