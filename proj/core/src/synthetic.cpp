#include "cohemark/synthetic.hpp"

#include <array>
#include <cctype>
#include <string_view>

#include "cohemark/error.hpp"
#include "cohemark/rng.hpp"

namespace cohemark {
namespace {

struct Topic {
    std::array<std::string_view, 6> nouns;
    std::array<std::string_view, 4> verbs;
    std::array<std::string_view, 4> adjectives;
};

constexpr std::array<Topic, 8> kTopics = {{
    {{"summit", "ridge", "glacier", "trail", "peak", "climber"},
     {"ascended", "crossed", "scaled", "traversed"},
     {"alpine", "rocky", "steep", "snowy"}},
    {{"market", "stock", "investor", "bond", "dividend", "portfolio"},
     {"rallied", "traded", "hedged", "priced"},
     {"volatile", "bullish", "fiscal", "quarterly"}},
    {{"patient", "doctor", "vaccine", "clinic", "symptom", "therapy"},
     {"diagnosed", "treated", "prescribed", "examined"},
     {"chronic", "clinical", "medical", "acute"}},
    {{"striker", "goal", "referee", "stadium", "league", "coach"},
     {"scored", "tackled", "defended", "kicked"},
     {"offside", "penalty", "athletic", "final"}},
    {{"compiler", "kernel", "server", "database", "protocol", "thread"},
     {"compiled", "deployed", "cached", "parsed"},
     {"concurrent", "binary", "virtual", "remote"}},
    {{"recipe", "oven", "flour", "sauce", "chef", "garlic"},
     {"baked", "simmered", "seasoned", "roasted"},
     {"savory", "crispy", "tender", "spicy"}},
    {{"galaxy", "telescope", "orbit", "comet", "nebula", "astronaut"},
     {"observed", "launched", "orbited", "detected"},
     {"lunar", "cosmic", "stellar", "solar"}},
    {{"senator", "ballot", "election", "parliament", "minister", "campaign"},
     {"voted", "debated", "legislated", "elected"},
     {"partisan", "federal", "electoral", "municipal"}},
}};

constexpr std::array<std::string_view, 6> kFunctionWords = {"the", "a", "near", "with", "after", "by"};

std::string pick(Rng& rng, std::span<const std::string_view> words) {
    return std::string(words[rng.below(words.size())]);
}

std::string make_sentence(const Topic& topic, Rng& rng) {
    std::string s = pick(rng, kFunctionWords);
    s.front() = static_cast<char>(std::toupper(static_cast<unsigned char>(s.front())));
    s += ' ' + pick(rng, topic.adjectives) + ' ' + pick(rng, topic.nouns) + ' ' + pick(rng, topic.verbs);
    s += ' ' + pick(rng, kFunctionWords) + ' ' + pick(rng, topic.nouns);
    if (rng.uniform() < 0.5) s += ' ' + pick(rng, kFunctionWords) + ' ' + pick(rng, topic.adjectives);
    s += ' ' + pick(rng, topic.nouns) + '.';
    return s;
}

}  // namespace

std::size_t synthetic_topic_count() { return kTopics.size(); }

std::vector<std::string> synthetic_sentences(std::size_t count, std::uint64_t seed) {
    Rng rng(derive_seed(seed, {0x5E7}));
    std::vector<std::string> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(make_sentence(kTopics[i % kTopics.size()], rng));
    return out;
}

std::vector<std::string> synthetic_prompts(std::size_t count, std::uint64_t seed) {
    Rng rng(derive_seed(seed, {0x9207}));
    std::vector<std::string> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const auto& topic = kTopics[rng.below(kTopics.size())];
        out.push_back(make_sentence(topic, rng) + ' ' + make_sentence(topic, rng));
    }
    return out;
}

std::vector<std::string> null_texts(std::span<const std::string> pool, std::size_t count,
                                    std::size_t sentences_per_text, std::uint64_t seed) {
    if (pool.empty()) throw Error(Errc::EmptyInput, "null text pool is empty");
    Rng rng(derive_seed(seed, {0x0771}));
    std::vector<std::string> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::string text;
        for (std::size_t k = 0; k < sentences_per_text; ++k) {
            if (!text.empty()) text += ' ';
            text += pool[rng.below(pool.size())];
        }
        out.push_back(std::move(text));
    }
    return out;
}

}  // namespace cohemark
