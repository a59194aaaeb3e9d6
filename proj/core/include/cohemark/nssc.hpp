#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "cohemark/types.hpp"

namespace cohemark {

enum class NsscMode { V1, V2 };

std::string_view to_string(NsscMode mode);

/// Next-sentence selection criteria. Ranks are 0-based positions in the
/// previous sentence's membership index.
struct NsscConfig {
    std::vector<std::size_t> v1_green_ranks{0, 2};
    std::vector<std::size_t> v2_green_ranks{1, 3, 4, 5};
    std::size_t match_budget = 5;

    void validate() const;

    friend bool operator==(const NsscConfig&, const NsscConfig&) = default;
};

struct SamplerState {
    NsscMode mode = NsscMode::V1;
    std::size_t match_counter = 0;

    friend bool operator==(const SamplerState&, const SamplerState&) = default;
};

/// Green clusters for the next sentence, in rank order. Everything else is red.
/// Throws RankOutOfRange when a configured rank does not exist for this K.
std::vector<ClusterId> green_spaces(const MembershipIndex& previous, NsscMode mode, const NsscConfig& config);

inline bool is_green(std::span<const ClusterId> green, ClusterId cluster) {
    return std::find(green.begin(), green.end(), cluster) != green.end();
}

/// Switching rule. A V2 step always returns to {V1, 0}. Otherwise a match of
/// consecutive primary clusters bumps the counter, and reaching the budget
/// arms V2 for exactly the next sentence.
SamplerState advance_state(SamplerState state, ClusterId previous_primary, ClusterId accepted_primary,
                           const NsscConfig& config);

}  // namespace cohemark
