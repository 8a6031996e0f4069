#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "footprint.hpp"

namespace edgeminer {

using CaseIndex = std::uint32_t;

struct Event {
    CaseIndex case_index = 0;
    ActivityId activity = 0;
    Timestamp timestamp = 0;   // microseconds since epoch
    std::uint64_t seq = 0;     // position in the canonical (timestamp, ingestion) order

    bool operator==(const Event&) const = default;
};

// One row as read from a file, before ids are assigned.
struct RawEvent {
    std::string case_id;
    std::string activity;
    Timestamp timestamp = 0;
};

// Dense, gap-free mapping between activity names and ids.
class ActivityTable {
public:
    ActivityId intern(std::string_view name);
    std::optional<ActivityId> find(std::string_view name) const;
    const std::string& name(ActivityId id) const { return names_.at(id); }
    const std::vector<std::string>& names() const noexcept { return names_; }
    std::size_t size() const noexcept { return names_.size(); }

    bool operator==(const ActivityTable& other) const { return names_ == other.names_; }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, ActivityId> ids_;
};

// Immutable event log. Events are kept in (timestamp, seq) order; activity and
// case ids are assigned in first-seen order over that canonical sequence, so
// any row permutation of the same input yields the same log.
class EventLog {
public:
    EventLog() = default;

    static EventLog from_raw(std::vector<RawEvent> raw);

    const std::vector<Event>& events() const noexcept { return events_; }
    const ActivityTable& activities() const noexcept { return activities_; }
    std::size_t activity_count() const noexcept { return activities_.size(); }
    std::size_t case_count() const noexcept { return case_names_.size(); }
    const std::string& case_name(CaseIndex c) const { return case_names_.at(c); }
    const std::vector<std::string>& case_names() const noexcept { return case_names_; }

    // Indices into events(), timestamp-ordered.
    std::span<const std::size_t> trace(CaseIndex c) const { return traces_.at(c); }

    // Copy with the given timestamps replaced (indexed like events()); tables are kept.
    EventLog with_timestamps(const std::vector<Timestamp>& timestamps) const;

    bool operator==(const EventLog& other) const = default;

private:
    void rebuild(std::vector<Event> unordered);

    std::vector<Event> events_;
    ActivityTable activities_;
    std::vector<std::string> case_names_;
    std::vector<std::vector<std::size_t>> traces_;
};

enum class TiePolicy { reject, tiebreak };

struct TieViolation {
    std::string case_id;
    Timestamp timestamp = 0;
};

struct Perturbation {
    std::string case_id;
    std::uint64_t seq = 0;
    Timestamp original = 0;
    Timestamp adjusted = 0;
};

struct ValidationReport {
    std::vector<TieViolation> violations;
    std::vector<Perturbation> perturbations;

    bool empty() const noexcept { return violations.empty() && perturbations.empty(); }
};

// Same-case timestamp collisions, one entry per colliding (case, timestamp) pair.
std::vector<TieViolation> find_ties(const EventLog& log);

struct ValidatedLog {
    EventLog log;
    ValidationReport report;
};

// reject: throws ValidationError listing every colliding pair.
// tiebreak: bumps each colliding event to previous + 1us in seq order.
ValidatedLog validate_log(EventLog log, TiePolicy policy);

// The centralized reference footprint: counts every adjacent pair of every trace.
MergedFM central_footprint(const EventLog& log);

// For each event (indexed like log.events()), the activity of its true
// predecessor in its trace, or nullopt for trace starts.
std::vector<std::optional<ActivityId>> true_predecessors(const EventLog& log);

enum class Relation {
    causality,          // a -> b
    reverse_causality,  // b -> a
    parallel,           // a || b
    no_succession       // a # b
};

bool directly_follows(const MergedFM& fm, ActivityId a, ActivityId b);
Relation relation(const MergedFM& fm, ActivityId a, ActivityId b);
std::string_view to_string(Relation r);

} // namespace edgeminer
