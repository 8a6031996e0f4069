#include "synthetic.hpp"

#include <algorithm>
#include <random>

#include "errors.hpp"

namespace edgeminer {

namespace {

std::size_t draw(std::mt19937_64& rng, const double* weights, std::size_t count, double total) {
    const double u = std::uniform_real_distribution<double>(0.0, total)(rng);
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t k = 0; k < count; ++k) {
        if (weights[k] <= 0.0) continue;
        acc += weights[k];
        last_positive = k;
        if (u < acc) return k;
    }
    return last_positive;
}

Timestamp draw_between(std::mt19937_64& rng, Timestamp lo, Timestamp hi) {
    if (hi <= lo) return lo;
    return std::uniform_int_distribution<Timestamp>(lo, hi)(rng);
}

} // namespace

std::string synthetic_activity_name(std::size_t index) {
    if (index < 26) return std::string(1, static_cast<char>('a' + index));
    return "act" + std::to_string(index);
}

SyntheticSpec SyntheticSpec::uniform(std::size_t activities, std::size_t cases, std::size_t max_length,
                                     std::uint64_t seed) {
    SyntheticSpec spec;
    spec.activities = activities;
    spec.cases = cases;
    spec.min_length = 1;
    spec.max_length = max_length;
    spec.transitions.assign(activities * activities, 1.0);
    spec.seed = seed;
    return spec;
}

SyntheticSpec SyntheticSpec::skewed(std::size_t activities, double dominant_weight, std::size_t cases,
                                    std::size_t min_length, std::size_t max_length, std::uint64_t seed) {
    SyntheticSpec spec;
    spec.activities = activities;
    spec.cases = cases;
    spec.min_length = min_length;
    spec.max_length = max_length;
    spec.seed = seed;
    spec.transitions.assign(activities * activities, 0.0);
    if (activities == 1) {
        spec.transitions[0] = 1.0;
        return spec;
    }
    const double rest = (1.0 - dominant_weight) / static_cast<double>(activities - 1);
    for (std::size_t i = 0; i < activities; ++i) {
        for (std::size_t j = 0; j < activities; ++j) spec.transitions[i * activities + j] = rest;
        spec.transitions[i * activities + (i + 1) % activities] = dominant_weight;
    }
    return spec;
}

EventLog generate_synthetic(const SyntheticSpec& spec) {
    const std::size_t n = spec.activities;
    if (n == 0) throw ValidationError("synthetic: need at least one activity");
    if (spec.transitions.size() != n * n)
        throw ValidationError("synthetic: transition matrix must be " + std::to_string(n) + "x" +
                              std::to_string(n));
    if (!spec.start_weights.empty() && spec.start_weights.size() != n)
        throw ValidationError("synthetic: start weights must have one entry per activity");
    if (spec.min_length == 0 || spec.min_length > spec.max_length)
        throw ValidationError("synthetic: need 1 <= min_length <= max_length");
    if (spec.min_gap < 1 || spec.max_gap < spec.min_gap)
        throw ValidationError("synthetic: need 1 <= min_gap <= max_gap");

    std::vector<double> row_totals(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double w = spec.transitions[i * n + j];
            if (!(w >= 0.0)) throw ValidationError("synthetic: negative transition weight in row " + std::to_string(i));
            row_totals[i] += w;
        }
        if (row_totals[i] <= 0.0)
            throw ValidationError("synthetic: all-zero transition row for activity " + synthetic_activity_name(i));
    }
    std::vector<double> starts = spec.start_weights.empty() ? std::vector<double>(n, 1.0) : spec.start_weights;
    double start_total = 0.0;
    for (double w : starts) {
        if (!(w >= 0.0)) throw ValidationError("synthetic: negative start weight");
        start_total += w;
    }
    if (start_total <= 0.0) throw ValidationError("synthetic: all-zero start weights");

    std::mt19937_64 rng(spec.seed);
    std::vector<RawEvent> raw;
    for (std::size_t c = 0; c < spec.cases; ++c) {
        const auto length = static_cast<std::size_t>(
            draw_between(rng, static_cast<Timestamp>(spec.min_length), static_cast<Timestamp>(spec.max_length)));
        Timestamp t = spec.epoch + draw_between(rng, 0, std::max<Timestamp>(spec.case_spread - 1, 0));
        std::size_t act = draw(rng, starts.data(), n, start_total);
        const std::string case_id = "case" + std::to_string(c);
        for (std::size_t k = 0; k < length; ++k) {
            if (k > 0) {
                act = draw(rng, &spec.transitions[act * n], n, row_totals[act]);
                t += draw_between(rng, spec.min_gap, spec.max_gap);
            }
            raw.push_back({case_id, synthetic_activity_name(act), t});
        }
    }
    return EventLog::from_raw(std::move(raw));
}

} // namespace edgeminer
