#include "node.hpp"

#include <algorithm>
#include <numeric>

#include "errors.hpp"

namespace edgeminer {

std::string_view to_string(Strategy s) {
    switch (s) {
    case Strategy::query_all: return "query_all";
    case Strategy::mfp: return "mfp";
    case Strategy::oracle: return "oracle";
    }
    return "?";
}

std::optional<Strategy> parse_strategy(std::string_view s) {
    if (s == "query_all" || s == "query-all" || s == "naive") return Strategy::query_all;
    if (s == "mfp") return Strategy::mfp;
    if (s == "oracle") return Strategy::oracle;
    return std::nullopt;
}

std::string_view to_string(MessageKind kind) {
    switch (kind) {
    case MessageKind::pred_query: return "PredQuery";
    case MessageKind::pred_response: return "PredResponse";
    case MessageKind::chosen_notify: return "ChosenNotify";
    case MessageKind::correction_notify: return "CorrectionNotify";
    case MessageKind::fm_request: return "FMRequest";
    case MessageKind::fm_response: return "FMResponse";
    }
    return "?";
}

std::optional<CaseIndex> message_case(const Message& m) {
    struct Visitor {
        std::optional<CaseIndex> operator()(const PredQuery& q) const {
            if (q.items.empty()) return std::nullopt;
            return q.items.front().case_index;
        }
        std::optional<CaseIndex> operator()(const PredResponse& r) const {
            if (r.candidates.empty()) return std::nullopt;
            return r.candidates.front().case_index;
        }
        std::optional<CaseIndex> operator()(const ChosenNotify& c) const { return c.case_index; }
        std::optional<CaseIndex> operator()(const CorrectionNotify& c) const { return c.case_index; }
        std::optional<CaseIndex> operator()(const FMRequest&) const { return std::nullopt; }
        std::optional<CaseIndex> operator()(const FMResponse&) const { return std::nullopt; }
    };
    return std::visit(Visitor{}, m.payload);
}

Node::Node(ActivityId id, std::size_t activity_count, NodeConfig config, std::span<EventMetrics> metrics,
           PredecessorHint hint)
    : id_(id), n_(activity_count), config_(config), metrics_(metrics), hint_(std::move(hint)),
      counts_(activity_count, 0) {
    if (id >= activity_count) throw std::invalid_argument("node id out of range");
    if (config_.batch_size == 0) throw std::invalid_argument("batch size must be at least 1");
    if (config_.strategy == Strategy::oracle && !hint_)
        throw std::invalid_argument("oracle strategy needs a predecessor hint");
}

LocalEvent* Node::lookup(CaseIndex c, Timestamp t) {
    auto it = store_.find(c);
    if (it == store_.end()) return nullptr;
    auto jt = it->second.find(t);
    return jt == it->second.end() ? nullptr : &jt->second;
}

const LocalEvent* Node::find(CaseIndex c, Timestamp t) const {
    auto it = store_.find(c);
    if (it == store_.end()) return nullptr;
    auto jt = it->second.find(t);
    return jt == it->second.end() ? nullptr : &jt->second;
}

const LocalEvent* Node::latest_below(CaseIndex c, Timestamp t) const {
    auto it = store_.find(c);
    if (it == store_.end()) return nullptr;
    auto jt = it->second.lower_bound(t);
    if (jt == it->second.begin()) return nullptr;
    return &std::prev(jt)->second;
}

EventMetrics* Node::metric(const LocalEvent& ev) {
    return ev.seq < metrics_.size() ? &metrics_[ev.seq] : nullptr;
}

void Node::on_local_event(const Event& e, Timestamp now, Outbox& out) {
    if (e.activity != id_)
        throw ProtocolError("node " + std::to_string(id_) + " received event of activity " +
                            std::to_string(e.activity));
    auto [it, inserted] = store_[e.case_index].try_emplace(e.timestamp);
    if (!inserted)
        throw ProtocolError("node " + std::to_string(id_) + ": duplicate event (case " +
                            std::to_string(e.case_index) + ", t=" + std::to_string(e.timestamp) + ")");
    LocalEvent& ev = it->second;
    ev.case_index = e.case_index;
    ev.timestamp = e.timestamp;
    ev.seq = e.seq;
    arrivals_.emplace_back(e.case_index, e.timestamp);
    ++stored_;

    begin_search(ev, now, out);
    flag_end_events(now);
    apply_window(now);
}

void Node::begin_search(LocalEvent& ev, Timestamp now, Outbox& out) {
    (void)now;
    if (++ev.searches > config_.max_searches) {
        throw SimulationError("rectification did not converge: event t=" + std::to_string(ev.timestamp) +
                              " of case #" + std::to_string(ev.case_index) + " at node " + std::to_string(id_) +
                              " searched " + std::to_string(ev.searches - 1) + " times");
    }
    if (auto* m = metric(ev)) m->searches = ev.searches;
    if (try_self(ev, out)) return;

    if (config_.strategy == Strategy::oracle && !hint_(ev.case_index, ev.timestamp)) {
        flag_start(ev);
        return;
    }
    ev.state = SearchState::batched;
    batch_.emplace_back(ev.case_index, ev.timestamp);
    if (batch_.size() >= config_.batch_size) {
        auto members = std::move(batch_);
        batch_.clear();
        launch_round(std::move(members), out);
    }
}

bool Node::try_self(LocalEvent& ev, Outbox& out) {
    const LocalEvent* below = latest_below(ev.case_index, ev.timestamp);
    if (!below) return false;
    if (below->successor && below->successor->timestamp < ev.timestamp) return false;

    LocalEvent* pred = lookup(below->case_index, below->timestamp);
    ev.predecessor = Link{id_, pred->timestamp};
    ev.state = SearchState::resolved;
    ++counts_[id_];
    if (auto* m = metric(ev)) {
        m->resolution = Resolution::self_loop;
        m->predecessor = id_;
    }
    link_successor(*pred, Link{id_, ev.timestamp}, out);
    return true;
}

void Node::flush(Timestamp now, Outbox& out) {
    (void)now;
    if (batch_.empty()) return;
    auto members = std::move(batch_);
    batch_.clear();
    launch_round(std::move(members), out);
}

void Node::launch_round(std::vector<Key> members, Outbox& out) {
    for (const auto& key : members) lookup(key.first, key.second)->state = SearchState::querying;

    if (config_.strategy == Strategy::query_all) {
        if (n_ == 1) {
            for (const auto& key : members) flag_start(*lookup(key.first, key.second));
            return;
        }
        const auto round_id = next_round_++;
        Round& round = rounds_[round_id];
        round.query_all = true;
        round.members = std::move(members);
        round.awaiting = n_ - 1;
        for (ActivityId dst = 0; dst < n_; ++dst)
            if (dst != id_) send_query(round_id, round, dst, out);
        return;
    }

    if (config_.strategy == Strategy::oracle) {
        // One sequential round per hinted predecessor node, that node first.
        std::map<ActivityId, std::vector<Key>> groups;
        for (const auto& key : members) {
            auto hint = hint_(key.first, key.second);
            if (!hint) {
                flag_start(*lookup(key.first, key.second));
            } else {
                groups[*hint].push_back(key);
            }
        }
        for (auto& [hint, group] : groups) start_sequential(std::move(group), mfp_order(hint), out);
        return;
    }

    start_sequential(std::move(members), mfp_order(), out);
}

void Node::start_sequential(std::vector<Key> members, std::vector<ActivityId> order, Outbox& out) {
    if (order.empty()) {
        for (const auto& key : members) flag_start(*lookup(key.first, key.second));
        return;
    }
    const auto round_id = next_round_++;
    Round& round = rounds_[round_id];
    round.members = std::move(members);
    round.order = std::move(order);
    send_query(round_id, round, round.order.front(), out);
}

void Node::send_query(std::uint64_t round_id, Round& round, NodeId dst, Outbox& out) {
    PredQuery q;
    q.round = round_id;
    q.items.reserve(round.members.size());
    const double share = 1.0 / static_cast<double>(round.members.size());
    for (const auto& key : round.members) {
        q.items.push_back({key.first, key.second});
        if (auto* m = metric(*lookup(key.first, key.second))) {
            m->queried += share;
            m->messages += share;
        }
    }
    Message msg;
    msg.src = id_;
    msg.dst = dst;
    msg.payload = std::move(q);
    out.push_back(std::move(msg));
}

PredResponse Node::on_query(const PredQuery& q) const {
    PredResponse r;
    r.round = q.round;
    r.candidates.reserve(q.items.size());
    for (const auto& item : q.items) {
        Candidate c{item.case_index, item.timestamp, std::nullopt};
        if (const LocalEvent* below = latest_below(item.case_index, item.timestamp)) {
            if (!below->successor || below->successor->timestamp >= item.timestamp)
                c.predecessor = below->timestamp;
        }
        r.candidates.push_back(c);
    }
    return r;
}

void Node::on_response(NodeId from, const PredResponse& r, Timestamp now, Outbox& out) {
    (void)now;
    auto it = rounds_.find(r.round);
    if (it == rounds_.end()) {
        ++dropped_;
        return;
    }
    Round& round = it->second;
    const double share = r.candidates.empty() ? 0.0 : 1.0 / static_cast<double>(r.candidates.size());
    for (const auto& c : r.candidates) {
        if (LocalEvent* ev = lookup(c.case_index, c.query_timestamp)) {
            if (auto* m = metric(*ev)) m->messages += share;
        }
    }

    if (round.query_all) {
        for (const auto& c : r.candidates) {
            if (!c.predecessor) continue;
            const Key key{c.case_index, c.query_timestamp};
            auto [bt, inserted] = round.best.try_emplace(key, Link{from, *c.predecessor});
            if (!inserted && bt->second.timestamp < *c.predecessor) bt->second = Link{from, *c.predecessor};
        }
        if (--round.awaiting > 0) return;
        Round done = std::move(round);
        rounds_.erase(it);
        for (const auto& key : done.members) {
            LocalEvent* ev = lookup(key.first, key.second);
            if (auto bt = done.best.find(key); bt != done.best.end()) {
                accept(*ev, bt->second, out);
            } else {
                flag_start(*ev);
            }
        }
        return;
    }

    if (round.next >= round.order.size() || round.order[round.next] != from) {
        ++dropped_;
        return;
    }
    std::vector<Key> remaining;
    std::vector<std::pair<Key, Link>> found;
    for (const auto& key : round.members) {
        auto ct = std::find_if(r.candidates.begin(), r.candidates.end(), [&](const Candidate& c) {
            return c.case_index == key.first && c.query_timestamp == key.second;
        });
        if (ct != r.candidates.end() && ct->predecessor) {
            found.emplace_back(key, Link{from, *ct->predecessor});
        } else {
            remaining.push_back(key);
        }
    }
    round.members = std::move(remaining);
    ++round.next;
    const auto round_id = it->first;
    if (round.members.empty()) {
        rounds_.erase(it);
    } else if (round.next == round.order.size()) {
        auto members = std::move(round.members);
        rounds_.erase(it);
        for (const auto& key : members) flag_start(*lookup(key.first, key.second));
    } else {
        send_query(round_id, round, round.order[round.next], out);
    }
    // Accept last: accepting can re-enter the state machine through local corrections.
    for (auto& [key, link] : found) accept(*lookup(key.first, key.second), link, out);
}

void Node::accept(LocalEvent& ev, Link pred, Outbox& out) {
    ev.predecessor = pred;
    ev.state = SearchState::resolved;
    ++counts_[pred.activity];
    if (auto* m = metric(ev)) {
        m->resolution = Resolution::network;
        m->predecessor = pred.activity;
        m->messages += 1.0;
    }
    Message msg;
    msg.src = id_;
    msg.dst = pred.activity;
    msg.payload = ChosenNotify{ev.case_index, pred.timestamp, ev.timestamp};
    out.push_back(std::move(msg));
}

void Node::flag_start(LocalEvent& ev) {
    ev.state = SearchState::start_flagged;
    ++start_events_;
    if (auto* m = metric(ev)) {
        m->resolution = Resolution::start;
        m->predecessor.reset();
    }
}

void Node::on_chosen_notify(NodeId from, const ChosenNotify& m, Timestamp now, Outbox& out) {
    (void)now;
    LocalEvent* pred = lookup(m.case_index, m.predecessor_timestamp);
    if (!pred) {
        if (config_.window_age || config_.window_events) {
            ++dropped_;
            return;
        }
        throw ProtocolError("node " + std::to_string(id_) + ": successor claim for unknown event (case #" +
                            std::to_string(m.case_index) + ", t=" + std::to_string(m.predecessor_timestamp) + ")");
    }
    link_successor(*pred, Link{from, m.successor_timestamp}, out);
}

void Node::link_successor(LocalEvent& pred, Link claimant, Outbox& out) {
    if (!pred.successor) {
        pred.successor = claimant;
        if (pred.end_flagged) {
            pred.end_flagged = false;
            --end_events_;
        }
        return;
    }
    if (*pred.successor == claimant) return;
    if (claimant.timestamp < pred.successor->timestamp) {
        const Link displaced = *pred.successor;
        pred.successor = claimant;
        correct(displaced.activity, pred.case_index, displaced.timestamp, pred.timestamp, out);
    } else {
        correct(claimant.activity, pred.case_index, claimant.timestamp, pred.timestamp, out);
    }
}

void Node::correct(NodeId target, CaseIndex c, Timestamp successor_ts, Timestamp predecessor_ts, Outbox& out) {
    CorrectionNotify note{c, successor_ts, predecessor_ts};
    if (target == id_) {
        apply_correction(id_, note, false, out);
        return;
    }
    Message msg;
    msg.src = id_;
    msg.dst = target;
    msg.payload = note;
    out.push_back(std::move(msg));
}

void Node::on_correction(NodeId from, const CorrectionNotify& m, Timestamp now, Outbox& out) {
    (void)now;
    apply_correction(from, m, true, out);
}

void Node::apply_correction(NodeId from, const CorrectionNotify& m, bool remote, Outbox& out) {
    LocalEvent* ev = lookup(m.case_index, m.successor_timestamp);
    if (!ev || !ev->predecessor || *ev->predecessor != Link{from, m.predecessor_timestamp}) {
        ++dropped_;
        return;
    }
    if (counts_[from] == 0) {
        throw InvariantViolation("node " + std::to_string(id_) + ": predecessor count for activity " +
                                 std::to_string(from) + " would drop below zero");
    }
    --counts_[from];
    ev->predecessor.reset();
    ev->state = SearchState::idle;
    if (auto* metric_slot = metric(*ev)) {
        metric_slot->corrections += 1;
        if (remote) metric_slot->messages += 1.0;
        metric_slot->resolution = Resolution::unresolved;
        metric_slot->predecessor.reset();
    }
    begin_search(*ev, 0, out);
}

void Node::on_message(const Message& m, Timestamp now, Outbox& out) {
    switch (m.kind()) {
    case MessageKind::pred_query: {
        Message reply;
        reply.src = id_;
        reply.dst = m.src;
        reply.payload = on_query(std::get<PredQuery>(m.payload));
        out.push_back(std::move(reply));
        break;
    }
    case MessageKind::pred_response:
        on_response(m.src, std::get<PredResponse>(m.payload), now, out);
        break;
    case MessageKind::chosen_notify:
        on_chosen_notify(m.src, std::get<ChosenNotify>(m.payload), now, out);
        break;
    case MessageKind::correction_notify:
        on_correction(m.src, std::get<CorrectionNotify>(m.payload), now, out);
        break;
    case MessageKind::fm_request: {
        flag_end_events(now);
        Message reply;
        reply.src = id_;
        reply.dst = m.src;
        reply.payload = FMResponse{std::get<FMRequest>(m.payload).request, partial()};
        out.push_back(std::move(reply));
        break;
    }
    case MessageKind::fm_response:
        throw ProtocolError("activity node " + std::to_string(id_) + " received a footprint response");
    }
}

std::vector<ActivityId> Node::mfp_order(std::optional<ActivityId> preferred) const {
    std::vector<ActivityId> order;
    order.reserve(n_ ? n_ - 1 : 0);
    for (ActivityId a = 0; a < n_; ++a)
        if (a != id_) order.push_back(a);
    std::stable_sort(order.begin(), order.end(),
                     [&](ActivityId a, ActivityId b) { return counts_[a] > counts_[b]; });
    if (preferred && *preferred != id_) {
        auto it = std::find(order.begin(), order.end(), *preferred);
        if (it != order.end()) std::rotate(order.begin(), it, it + 1);
    }
    return order;
}

void Node::flag_end_events(Timestamp now) {
    while (end_cursor_ < arrivals_.size()) {
        const auto& key = arrivals_[end_cursor_];
        if (now - key.second <= config_.end_timeout) break;
        if (LocalEvent* ev = lookup(key.first, key.second); ev && !ev->successor && !ev->end_flagged) {
            ev->end_flagged = true;
            ++end_events_;
        }
        ++end_cursor_;
    }
}

void Node::apply_window(Timestamp now) {
    if (!config_.window_age && !config_.window_events) return;
    // Stops at the first event still searching or not yet checked for an end flag.
    while (!arrivals_.empty()) {
        const auto key = arrivals_.front();
        LocalEvent* ev = lookup(key.first, key.second);
        const bool too_old = config_.window_age && now - key.second > *config_.window_age;
        const bool too_many = config_.window_events && stored_ > *config_.window_events;
        if (!too_old && !too_many) break;
        if (ev->state != SearchState::resolved && ev->state != SearchState::start_flagged) break;
        if (end_cursor_ == 0) break;
        auto cs = store_.find(key.first);
        cs->second.erase(key.second);
        if (cs->second.empty()) store_.erase(cs);
        arrivals_.pop_front();
        --end_cursor_;
        --stored_;
    }
}

PartialFM Node::partial() const {
    PartialFM p;
    p.owner = id_;
    p.counts = counts_;
    p.is_start = start_events_ > 0;
    p.is_end = end_events_ > 0;
    return p;
}

} // namespace edgeminer
