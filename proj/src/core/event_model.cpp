#include "event_model.hpp"

#include <algorithm>
#include <sstream>

#include "errors.hpp"

namespace edgeminer {

ActivityId ActivityTable::intern(std::string_view name) {
    auto key = std::string(name);
    if (auto it = ids_.find(key); it != ids_.end()) return it->second;
    const auto id = static_cast<ActivityId>(names_.size());
    names_.push_back(key);
    ids_.emplace(std::move(key), id);
    return id;
}

std::optional<ActivityId> ActivityTable::find(std::string_view name) const {
    if (auto it = ids_.find(std::string(name)); it != ids_.end()) return it->second;
    return std::nullopt;
}

EventLog EventLog::from_raw(std::vector<RawEvent> raw) {
    std::vector<std::size_t> order(raw.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return raw[a].timestamp < raw[b].timestamp;
    });

    EventLog log;
    std::unordered_map<std::string, CaseIndex> case_ids;
    std::vector<Event> events;
    events.reserve(raw.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        auto& r = raw[order[pos]];
        Event e;
        e.activity = log.activities_.intern(r.activity);
        auto [it, inserted] =
            case_ids.try_emplace(r.case_id, static_cast<CaseIndex>(log.case_names_.size()));
        if (inserted) log.case_names_.push_back(std::move(r.case_id));
        e.case_index = it->second;
        e.timestamp = r.timestamp;
        e.seq = pos;
        events.push_back(e);
    }
    log.rebuild(std::move(events));
    return log;
}

void EventLog::rebuild(std::vector<Event> events) {
    std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
        if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
        return a.seq < b.seq;
    });
    traces_.assign(case_names_.size(), {});
    for (std::size_t i = 0; i < events.size(); ++i) {
        events[i].seq = i;
        traces_[events[i].case_index].push_back(i);
    }
    events_ = std::move(events);
}

EventLog EventLog::with_timestamps(const std::vector<Timestamp>& timestamps) const {
    EventLog copy;
    copy.activities_ = activities_;
    copy.case_names_ = case_names_;
    std::vector<Event> events = events_;
    for (std::size_t i = 0; i < events.size(); ++i) events[i].timestamp = timestamps.at(i);
    copy.rebuild(std::move(events));
    return copy;
}

std::vector<TieViolation> find_ties(const EventLog& log) {
    std::vector<TieViolation> out;
    for (CaseIndex c = 0; c < log.case_count(); ++c) {
        auto trace = log.trace(c);
        for (std::size_t k = 1; k < trace.size(); ++k) {
            const auto prev = log.events()[trace[k - 1]].timestamp;
            const auto cur = log.events()[trace[k]].timestamp;
            // Report a run of equal stamps once.
            if (cur == prev && (k < 2 || log.events()[trace[k - 2]].timestamp != cur)) {
                out.push_back({log.case_name(c), cur});
            }
        }
    }
    return out;
}

ValidatedLog validate_log(EventLog log, TiePolicy policy) {
    ValidatedLog result;
    result.report.violations = find_ties(log);
    if (result.report.violations.empty()) {
        result.log = std::move(log);
        return result;
    }
    if (policy == TiePolicy::reject) {
        std::ostringstream msg;
        msg << result.report.violations.size() << " same-case timestamp collision(s):";
        for (const auto& v : result.report.violations)
            msg << " (" << v.case_id << ", " << v.timestamp << ")";
        throw ValidationError(msg.str());
    }

    std::vector<Timestamp> stamps(log.events().size());
    for (const auto& e : log.events()) stamps[e.seq] = e.timestamp;
    for (CaseIndex c = 0; c < log.case_count(); ++c) {
        auto trace = log.trace(c);
        for (std::size_t k = 1; k < trace.size(); ++k) {
            const auto prev = stamps[trace[k - 1]];
            auto& cur = stamps[trace[k]];
            if (cur <= prev) {
                result.report.perturbations.push_back(
                    {log.case_name(c), log.events()[trace[k]].seq, cur, prev + 1});
                cur = prev + 1;
            }
        }
    }
    result.log = log.with_timestamps(stamps);
    return result;
}

MergedFM central_footprint(const EventLog& log) {
    MergedFM fm(log.activity_count());
    const auto& events = log.events();
    for (CaseIndex c = 0; c < log.case_count(); ++c) {
        auto trace = log.trace(c);
        if (trace.empty()) continue;
        fm.starts().insert(events[trace.front()].activity);
        fm.ends().insert(events[trace.back()].activity);
        for (std::size_t k = 1; k < trace.size(); ++k) {
            ++fm.at(events[trace[k - 1]].activity, events[trace[k]].activity);
        }
    }
    return fm;
}

std::vector<std::optional<ActivityId>> true_predecessors(const EventLog& log) {
    std::vector<std::optional<ActivityId>> out(log.events().size());
    for (CaseIndex c = 0; c < log.case_count(); ++c) {
        auto trace = log.trace(c);
        for (std::size_t k = 1; k < trace.size(); ++k)
            out[trace[k]] = log.events()[trace[k - 1]].activity;
    }
    return out;
}

bool directly_follows(const MergedFM& fm, ActivityId a, ActivityId b) {
    return fm.at(a, b) > 0;
}

Relation relation(const MergedFM& fm, ActivityId a, ActivityId b) {
    const bool ab = directly_follows(fm, a, b);
    const bool ba = directly_follows(fm, b, a);
    if (ab && !ba) return Relation::causality;
    if (!ab && ba) return Relation::reverse_causality;
    if (ab && ba) return Relation::parallel;
    return Relation::no_succession;
}

std::string_view to_string(Relation r) {
    switch (r) {
    case Relation::causality: return "causality";
    case Relation::reverse_causality: return "reverse_causality";
    case Relation::parallel: return "parallel";
    case Relation::no_succession: return "no_succession";
    }
    return "?";
}

} // namespace edgeminer
