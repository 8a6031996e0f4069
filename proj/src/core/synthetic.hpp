#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "event_model.hpp"

namespace edgeminer {

// First-order Markov log generator. Activity k is named by synthetic_activity_name(k).
struct SyntheticSpec {
    std::size_t activities = 1;
    std::size_t cases = 1;
    std::size_t min_length = 1;
    std::size_t max_length = 1;
    // Row-major activities x activities; row i weights the successor of i.
    std::vector<double> transitions;
    // Start activity weights; empty means uniform.
    std::vector<double> start_weights;
    std::uint64_t seed = 0;
    Timestamp epoch = 1'600'000'000'000'000;  // 2020-09-13, microseconds
    Timestamp min_gap = 1'000;                // within-case gap bounds, microseconds
    Timestamp max_gap = 60'000;
    Timestamp case_spread = 1'000'000;        // case starts are uniform in [epoch, epoch + spread)

    // Every transition (self-loops included) equally likely.
    static SyntheticSpec uniform(std::size_t activities, std::size_t cases, std::size_t max_length,
                                 std::uint64_t seed);
    // Activity i continues to (i + 1) mod n with probability dominant_weight; the remaining
    // mass is spread evenly over the other n - 1 successors (self-loop included).
    static SyntheticSpec skewed(std::size_t activities, double dominant_weight, std::size_t cases,
                                std::size_t min_length, std::size_t max_length, std::uint64_t seed);
};

std::string synthetic_activity_name(std::size_t index);

// Throws ValidationError on a malformed spec (negative weights, all-zero rows, bad sizes).
EventLog generate_synthetic(const SyntheticSpec& spec);

} // namespace edgeminer
