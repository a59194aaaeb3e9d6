#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace cohemark::testing {

struct NullChainSpec {
    std::size_t clusters = 8;
    std::size_t scored = 15;  // sentences scored per chain (chain holds scored + 1 rankings)
    std::vector<std::size_t> v1{0, 2};
    std::vector<std::size_t> v2{1, 3, 4, 5};
    std::size_t match_budget = 5;
};

// Monte Carlo over chains of independent uniformly random cluster rankings,
// pushed through a from-scratch copy of the two-mode switching rule.
// Returns the per-chain ratio of each simulated chain.
std::vector<double> simulate_null_ratios(const NullChainSpec& spec, std::size_t chains, std::uint64_t seed);

double mean(const std::vector<double>& xs);

}  // namespace cohemark::testing
