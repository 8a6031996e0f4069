#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "sim.hpp"

namespace edgeminer {

struct RunSummary {
    SimResult result;
    MergedFM oracle;
    bool equal = false;
    std::size_t network_events = 0;     // events whose predecessor came over the network
    double mean_messages_network = 0;   // mean Phase-1 messages charged to those events
    double mean_queried = 0;            // over all events
};

RunSummary summarize_run(const EventLog& log, const SimConfig& config);
// key,value rows.
std::string summary_csv(const RunSummary& s, const EventLog& log, const SimConfig& config);

struct BaselineRow {
    Strategy strategy;
    double mean = 0;      // queried nodes per event
    double stderr_ = 0;   // standard error of that mean
    double reduction = 0; // percent below query_all
    std::size_t runs = 0;
};

// One run per seed and strategy (query_all, mfp, oracle). The seed drives the
// latency draw; with zero latency all seeds give the same numbers.
std::vector<BaselineRow> baselines(const EventLog& log, const SimConfig& base, const std::vector<std::uint64_t>& seeds);
std::string baselines_csv(const std::vector<BaselineRow>& rows);

std::vector<double> queried_per_event(const SimResult& result);

struct CdfPoint {
    double fraction_nodes = 0;   // queried / (n - 1)
    double fraction_events = 0;  // share of events with at most that fraction
};

std::vector<CdfPoint> queried_cdf(const std::vector<double>& queried, std::size_t activity_count);
std::string cdf_csv(const std::vector<CdfPoint>& points);

struct AveragePoint {
    std::size_t events = 0;  // index one past the window's last event
    double mean = 0;
};

// Trailing mean over `window` events sampled every `step` events. Throws
// std::invalid_argument when window or step is 0 or the window exceeds the series.
std::vector<AveragePoint> moving_average(const std::vector<double>& values, std::size_t window, std::size_t step);
// Event count of the first sample after which every consecutive slope, in nodes per 100 events,
// stays below threshold. nullopt if the series never settles.
std::optional<std::size_t> stabilization_point(const std::vector<AveragePoint>& series, double threshold);
std::string moving_average_csv(const std::vector<AveragePoint>& series, std::size_t window, std::size_t step,
                               std::size_t activity_count);

struct BatchPoint {
    std::size_t batch_size = 0;
    double mean_queried = 0;
    double normalized = 0;          // mean_queried / (n - 1)
    double messages_per_event = 0;  // Phase-1 messages over all events
};

std::vector<BatchPoint> batch_sweep(const EventLog& log, const SimConfig& base, const std::vector<std::size_t>& sizes);
std::string batch_sweep_csv(const std::vector<BatchPoint>& points);

struct FitnessPoint {
    std::size_t events = 0;
    double fraction = 0;  // events / total events
    double fitness = 0;
};

// Collects every `interval` events during the run and scores each snapshot
// against the final footprint. The last point is the final collection.
std::vector<FitnessPoint> fitness_curve(const EventLog& log, const SimConfig& base, std::size_t interval,
                                        const FitnessMetric& metric = fitness);
std::string fitness_csv(const std::vector<FitnessPoint>& points);

struct ActivityRow {
    std::string activity;
    std::size_t occurrences = 0;
    double mean_queried = 0;
    std::size_t trace_starts = 0;  // cases starting with this activity
    bool start = false;
};

std::vector<ActivityRow> activity_breakdown(const EventLog& log, const SimResult& result);
std::string activity_csv(const std::vector<ActivityRow>& rows, std::size_t case_count);

struct DatasetStats {
    std::size_t events = 0;
    std::size_t activities = 0;
    std::size_t start_activities = 0;
    std::size_t cases = 0;
    double mean_length = 0;
    std::size_t self_loops = 0;
    double mean_predecessors = 0;  // distinct predecessors per activity
    double sd_predecessors = 0;
    // Per activity: share of its predecessor occurrences taken by its most
    // frequent predecessor; averaged over activities that have one.
    double mean_mfp_ratio = 0;
    double sd_mfp_ratio = 0;
};

DatasetStats dataset_stats(const EventLog& log);
std::string stats_csv(const DatasetStats& s);

} // namespace edgeminer
