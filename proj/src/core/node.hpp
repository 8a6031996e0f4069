#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "messages.hpp"

namespace edgeminer {

enum class Strategy { query_all, mfp, oracle };

std::string_view to_string(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view s);

// Reference to an event at another node of the same case.
struct Link {
    ActivityId activity = 0;
    Timestamp timestamp = 0;

    bool operator==(const Link&) const = default;
};

enum class SearchState : std::uint8_t {
    idle,
    batched,        // waiting in the batch buffer
    querying,       // member of an in-flight query round
    resolved,       // predecessor set
    start_flagged   // all nodes answered empty
};

struct LocalEvent {
    CaseIndex case_index = 0;
    Timestamp timestamp = 0;
    std::uint64_t seq = 0;
    std::optional<Link> predecessor;
    std::optional<Link> successor;
    SearchState state = SearchState::idle;
    bool end_flagged = false;
    std::uint32_t searches = 0;
};

enum class Resolution : std::uint8_t { unresolved, self_loop, network, start };

// Per-event instrumentation, indexed by Event::seq. Batched queries and
// responses are split evenly over the events they carry.
struct EventMetrics {
    double queried = 0.0;
    double messages = 0.0;
    std::uint32_t corrections = 0;
    std::uint32_t searches = 0;
    Resolution resolution = Resolution::unresolved;
    std::optional<ActivityId> predecessor;
};

struct NodeConfig {
    Strategy strategy = Strategy::mfp;
    std::size_t batch_size = 1;
    std::optional<Timestamp> window_age;       // discard resolved events older than this
    std::optional<std::size_t> window_events;  // keep at most this many events
    Timestamp end_timeout = 0;
    std::uint32_t max_searches = 1000;  // per event; exceeding it aborts
};

// Oracle strategy only: the true predecessor activity of an event, or nullopt
// for a trace start.
using PredecessorHint = std::function<std::optional<ActivityId>(CaseIndex, Timestamp)>;

class Node {
public:
    using Outbox = std::vector<Message>;

    Node(ActivityId id, std::size_t activity_count, NodeConfig config,
         std::span<EventMetrics> metrics = {}, PredecessorHint hint = {});

    ActivityId id() const noexcept { return id_; }

    // Stores e and starts its predecessor search: own store first, then the
    // batch buffer; a full buffer launches a query round.
    void on_local_event(const Event& e, Timestamp now, Outbox& out);

    // Per item: the latest same-case event below the queried timestamp, offered
    // only if it has no successor yet or its successor is later than the query.
    PredResponse on_query(const PredQuery& q) const;

    void on_response(NodeId from, const PredResponse& r, Timestamp now, Outbox& out);
    void on_chosen_notify(NodeId from, const ChosenNotify& m, Timestamp now, Outbox& out);
    void on_correction(NodeId from, const CorrectionNotify& m, Timestamp now, Outbox& out);

    // Dispatches any protocol message addressed to this node.
    void on_message(const Message& m, Timestamp now, Outbox& out);

    // Other nodes by descending predecessor count, ties by ascending id.
    // A preferred node, if given, is moved to the front.
    std::vector<ActivityId> mfp_order(std::optional<ActivityId> preferred = std::nullopt) const;

    void apply_window(Timestamp now);
    void flag_end_events(Timestamp now);
    // Launches a round for a partially filled batch.
    void flush(Timestamp now, Outbox& out);

    bool idle() const noexcept { return batch_.empty() && rounds_.empty(); }

    PartialFM partial() const;
    const std::vector<Count>& counts() const noexcept { return counts_; }

    const LocalEvent* find(CaseIndex c, Timestamp t) const;
    std::size_t stored() const noexcept { return stored_; }
    std::size_t batched() const noexcept { return batch_.size(); }
    std::size_t open_rounds() const noexcept { return rounds_.size(); }
    // Late or stale notifications that were ignored.
    std::uint64_t dropped() const noexcept { return dropped_; }

private:
    using Key = std::pair<CaseIndex, Timestamp>;

    struct Round {
        bool query_all = false;
        std::vector<Key> members;
        std::vector<ActivityId> order;  // sequential rounds
        std::size_t next = 0;
        std::size_t awaiting = 0;                      // query-all rounds
        std::map<Key, Link> best;                      // query-all rounds
    };

    LocalEvent* lookup(CaseIndex c, Timestamp t);
    const LocalEvent* latest_below(CaseIndex c, Timestamp t) const;
    EventMetrics* metric(const LocalEvent& ev);

    void begin_search(LocalEvent& ev, Timestamp now, Outbox& out);
    bool try_self(LocalEvent& ev, Outbox& out);
    void launch_round(std::vector<Key> members, Outbox& out);
    void start_sequential(std::vector<Key> members, std::vector<ActivityId> order, Outbox& out);
    void send_query(std::uint64_t round_id, Round& round, NodeId dst, Outbox& out);
    void accept(LocalEvent& ev, Link pred, Outbox& out);
    void flag_start(LocalEvent& ev);
    void link_successor(LocalEvent& pred, Link claimant, Outbox& out);
    void correct(NodeId target, CaseIndex c, Timestamp successor_ts, Timestamp predecessor_ts, Outbox& out);
    void apply_correction(NodeId from, const CorrectionNotify& m, bool remote, Outbox& out);

    ActivityId id_;
    std::size_t n_;
    NodeConfig config_;
    std::span<EventMetrics> metrics_;
    PredecessorHint hint_;

    std::unordered_map<CaseIndex, std::map<Timestamp, LocalEvent>> store_;
    std::deque<Key> arrivals_;       // arrival (= timestamp) order
    std::size_t end_cursor_ = 0;     // arrivals_[0, end_cursor_) already checked for end flags
    std::size_t stored_ = 0;

    std::vector<Count> counts_;
    std::uint64_t start_events_ = 0;
    std::uint64_t end_events_ = 0;

    std::vector<Key> batch_;
    std::map<std::uint64_t, Round> rounds_;
    std::uint64_t next_round_ = 0;
    std::uint64_t dropped_ = 0;
};

} // namespace edgeminer
