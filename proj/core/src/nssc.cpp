#include "cohemark/nssc.hpp"

#include "cohemark/error.hpp"

namespace cohemark {

std::string_view to_string(NsscMode mode) { return mode == NsscMode::V1 ? "v1" : "v2"; }

void NsscConfig::validate() const {
    if (v1_green_ranks.empty() || v2_green_ranks.empty()) {
        throw Error(Errc::InvalidArgument, "NSSC green rank sets must be non-empty");
    }
    if (match_budget < 1) throw Error(Errc::InvalidArgument, "match budget must be at least 1");
}

std::vector<ClusterId> green_spaces(const MembershipIndex& previous, NsscMode mode, const NsscConfig& config) {
    const auto& ranks = mode == NsscMode::V1 ? config.v1_green_ranks : config.v2_green_ranks;
    std::vector<ClusterId> green;
    green.reserve(ranks.size());
    for (auto r : ranks) {
        if (r >= previous.size()) {
            throw Error(Errc::RankOutOfRange, "NSSC " + std::string(to_string(mode)) + " needs rank " +
                                                  std::to_string(r) + " but the model has only " +
                                                  std::to_string(previous.size()) + " clusters");
        }
        const auto id = previous.at_rank(r);
        if (!is_green(green, id)) green.push_back(id);
    }
    return green;
}

SamplerState advance_state(SamplerState state, ClusterId previous_primary, ClusterId accepted_primary,
                           const NsscConfig& config) {
    if (state.mode == NsscMode::V2) return {NsscMode::V1, 0};
    if (previous_primary != accepted_primary) return state;
    const auto counter = state.match_counter + 1;
    if (counter >= config.match_budget) return {NsscMode::V2, 0};
    return {NsscMode::V1, counter};
}

}  // namespace cohemark
