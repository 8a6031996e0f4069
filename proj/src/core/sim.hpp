#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include "collector.hpp"
#include "errors.hpp"
#include "event_model.hpp"
#include "node.hpp"

namespace edgeminer {

struct LatencyModel {
    enum class Kind { zero, fixed, uniform };

    Kind kind = Kind::zero;
    Timestamp lo = 0;  // fixed delay, or uniform lower bound (us)
    Timestamp hi = 0;
    std::optional<std::uint64_t> seed;  // uniform only; falls back to SimConfig::seed

    static LatencyModel zero() { return {}; }
    static LatencyModel fixed(Timestamp d) { return {Kind::fixed, d, d, std::nullopt}; }
    static LatencyModel uniform(Timestamp lo, Timestamp hi, std::optional<std::uint64_t> seed = std::nullopt) {
        return {Kind::uniform, lo, hi, seed};
    }
    // "zero", "fixed:<us>", "uniform:<lo>:<hi>[:<seed>]"
    static LatencyModel parse(const std::string& text);
    std::string to_string() const;
};

struct SimConfig {
    Strategy strategy = Strategy::mfp;
    std::size_t batch_size = 1;
    LatencyModel latency;
    std::optional<Timestamp> window_age;
    std::optional<std::size_t> window_events;
    std::optional<Timestamp> end_timeout;  // default: 2x the log's p99 within-case gap
    std::uint64_t seed = 0;
    bool fifo = true;                       // per-channel FIFO delivery
    bool record_trace = true;
    std::size_t snapshot_interval = 0;      // collect every k injected events; 0 = never
    std::uint32_t max_searches = 1000;
    Timestamp replay_offset = 0;            // added to every event timestamp

    // Test hook: per-message delay replacing the latency model when it returns a value.
    std::function<std::optional<Timestamp>(const Message&)> latency_override;
};

struct TraceRecord {
    Timestamp time = 0;  // delivery time
    NodeId src = 0;
    NodeId dst = 0;
    MessageKind kind = MessageKind::pred_query;
    std::int64_t case_index = -1;
    std::uint32_t items = 0;

    bool operator==(const TraceRecord&) const = default;
};

struct MessageTotals {
    std::array<std::uint64_t, 6> by_kind{};

    std::uint64_t operator[](MessageKind k) const { return by_kind[static_cast<std::size_t>(k)]; }
    std::uint64_t phase1() const { return by_kind[0] + by_kind[1] + by_kind[2] + by_kind[3]; }
    std::uint64_t phase2() const { return by_kind[4] + by_kind[5]; }

    bool operator==(const MessageTotals&) const = default;
};

struct Snapshot {
    std::size_t events_processed = 0;
    MergedFM fm;
};

struct SimResult {
    std::size_t activity_count = 0;
    MergedFM fm;                         // final collection
    std::vector<PartialFM> partials;     // final node columns, by activity
    std::vector<std::size_t> stored;     // final store size per node
    std::vector<EventMetrics> events;    // indexed like log.events()
    std::vector<TraceRecord> trace;
    std::vector<Snapshot> snapshots;
    MessageTotals totals;
    std::uint64_t final_collect_messages = 0;
    std::uint64_t dropped = 0;
    Timestamp end_timeout = 0;
    Timestamp final_time = 0;
};

// 2x the 99th-percentile within-case inter-event gap; at least 1us.
Timestamp default_end_timeout(const EventLog& log);

// Single-threaded discrete-event replay of a log over n activity nodes plus a collector.
class Simulation {
public:
    Simulation(const EventLog& log, SimConfig config);

    // Processes the next scheduled injection or delivery; false when nothing is left.
    bool step();
    // Processes everything scheduled before the (k+1)-th injection.
    void run_until_injected(std::size_t k);
    // Phase 2 at the current virtual time; processes whatever is due until all n answers arrive.
    MergedFM collect();
    // Drains, flushes partial batches, lets end flags settle, and collects a final time.
    SimResult finish();

    Timestamp now() const noexcept { return now_; }
    std::size_t injected() const noexcept { return next_event_; }
    const std::vector<Node>& nodes() const noexcept { return nodes_; }
    const MessageTotals& totals() const noexcept { return totals_; }
    const std::vector<TraceRecord>& trace() const noexcept { return trace_; }
    const std::vector<EventMetrics>& metrics() const noexcept { return metrics_; }

private:
    struct Scheduled {
        Timestamp time;
        NodeId dst;
        NodeId src;
        std::uint64_t seq;
        Message message;
    };
    struct Later {
        bool operator()(const Scheduled& a, const Scheduled& b) const {
            if (a.time != b.time) return a.time > b.time;
            if (a.dst != b.dst) return a.dst > b.dst;
            if (a.src != b.src) return a.src > b.src;
            return a.seq > b.seq;
        }
    };

    void send(std::vector<Message>& outbox);
    Timestamp delay(const Message& m);
    void deliver(Scheduled item);
    void inject();
    bool injection_first() const;
    [[noreturn]] void rethrow_with_case(const SimulationError& e) const;

    const EventLog& log_;
    SimConfig config_;
    std::size_t n_;
    NodeId collector_id_;
    NodeId environment_id_;
    std::vector<EventMetrics> metrics_;
    std::vector<std::optional<ActivityId>> truth_;  // oracle strategy only
    std::vector<Node> nodes_;
    Collector collector_;

    std::priority_queue<Scheduled, std::vector<Scheduled>, Later> queue_;
    std::vector<Timestamp> channel_last_;
    std::mt19937_64 latency_rng_;
    std::uint64_t seq_ = 0;
    std::size_t next_event_ = 0;
    Timestamp now_ = 0;

    MessageTotals totals_;
    std::vector<TraceRecord> trace_;
    std::vector<Snapshot> snapshots_;
    std::map<std::uint64_t, std::size_t> snapshot_tags_;
    std::optional<std::uint64_t> awaited_;
    std::optional<MergedFM> awaited_result_;
};

SimResult run(const EventLog& log, const SimConfig& config);

// Lower-bound baseline cost per event: 0 for trace starts and self-loop
// predecessors, 1 otherwise.
std::vector<int> oracle_strategy_cost(const EventLog& log);

// time_us,src,dst,variant,case_id (collector is node n).
void write_trace_csv(std::ostream& out, const SimResult& result, const EventLog& log);
// "EMTRACE1", u64 record count, then per record little-endian
// i64 time, u32 src, u32 dst, u8 kind, i64 case, u32 items.
void write_trace_binary(std::ostream& out, const std::vector<TraceRecord>& trace);
std::vector<TraceRecord> read_trace_binary(std::istream& in);

} // namespace edgeminer
