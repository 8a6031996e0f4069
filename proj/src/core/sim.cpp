#include "sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "csv_util.hpp"
#include "errors.hpp"

namespace edgeminer {

LatencyModel LatencyModel::parse(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream in(text);
    for (std::string part; std::getline(in, part, ':');) parts.push_back(part);
    auto number = [&](const std::string& s) {
        try {
            std::size_t used = 0;
            const long long v = std::stoll(s, &used);
            if (used != s.size() || v < 0) throw std::invalid_argument(s);
            return static_cast<Timestamp>(v);
        } catch (const std::exception&) {
            throw std::invalid_argument("latency: bad number '" + s + "' in '" + text + "'");
        }
    };
    if (parts.size() == 1 && (parts[0] == "zero" || parts[0] == "0")) return zero();
    if (parts.size() == 2 && parts[0] == "fixed") return fixed(number(parts[1]));
    if ((parts.size() == 3 || parts.size() == 4) && parts[0] == "uniform") {
        auto m = uniform(number(parts[1]), number(parts[2]));
        if (m.lo > m.hi) throw std::invalid_argument("latency: uniform needs lo <= hi");
        if (parts.size() == 4) m.seed = static_cast<std::uint64_t>(number(parts[3]));
        return m;
    }
    throw std::invalid_argument("latency: expected zero, fixed:<us> or uniform:<lo>:<hi>[:<seed>], got '" + text +
                                "'");
}

std::string LatencyModel::to_string() const {
    switch (kind) {
    case Kind::zero: return "zero";
    case Kind::fixed: return "fixed:" + std::to_string(lo);
    case Kind::uniform:
        return "uniform:" + std::to_string(lo) + ":" + std::to_string(hi) +
               (seed ? ":" + std::to_string(*seed) : std::string());
    }
    return "?";
}

Timestamp default_end_timeout(const EventLog& log) {
    std::vector<Timestamp> gaps;
    for (CaseIndex c = 0; c < log.case_count(); ++c) {
        auto trace = log.trace(c);
        for (std::size_t k = 1; k < trace.size(); ++k)
            gaps.push_back(log.events()[trace[k]].timestamp - log.events()[trace[k - 1]].timestamp);
    }
    if (gaps.empty()) return 1;
    std::sort(gaps.begin(), gaps.end());
    const auto rank = static_cast<std::size_t>(std::ceil(0.99 * static_cast<double>(gaps.size()))) - 1;
    return std::max<Timestamp>(1, 2 * gaps[std::min(rank, gaps.size() - 1)]);
}

Simulation::Simulation(const EventLog& log, SimConfig config)
    : log_(log),
      config_(std::move(config)),
      n_(log.activity_count()),
      collector_id_(static_cast<NodeId>(log.activity_count())),
      environment_id_(static_cast<NodeId>(log.activity_count() + 1)),
      metrics_(log.events().size()),
      collector_(static_cast<NodeId>(log.activity_count()), log.activity_count()),
      channel_last_((log.activity_count() + 1) * (log.activity_count() + 1), 0),
      latency_rng_(config_.latency.seed.value_or(config_.seed)) {
    if (config_.batch_size == 0) throw SimulationError("batch size must be at least 1");
    if (config_.latency.lo > config_.latency.hi) throw SimulationError("latency bounds: lo > hi");
    if (!config_.end_timeout) config_.end_timeout = default_end_timeout(log);

    PredecessorHint hint;
    if (config_.strategy == Strategy::oracle) {
        truth_ = true_predecessors(log);
        hint = [this](CaseIndex c, Timestamp t) -> std::optional<ActivityId> {
            const Timestamp original = t - config_.replay_offset;
            auto trace = log_.trace(c);
            auto it = std::lower_bound(trace.begin(), trace.end(), original, [&](std::size_t idx, Timestamp v) {
                return log_.events()[idx].timestamp < v;
            });
            if (it == trace.end() || log_.events()[*it].timestamp != original) return std::nullopt;
            return truth_[*it];
        };
    }

    NodeConfig nc;
    nc.strategy = config_.strategy;
    nc.batch_size = config_.batch_size;
    nc.window_age = config_.window_age;
    nc.window_events = config_.window_events;
    nc.end_timeout = *config_.end_timeout;
    nc.max_searches = config_.max_searches;
    nodes_.reserve(n_);
    for (ActivityId a = 0; a < n_; ++a) nodes_.emplace_back(a, n_, nc, std::span<EventMetrics>(metrics_), hint);

    if (!log.events().empty()) now_ = log.events().front().timestamp + config_.replay_offset;
}

Timestamp Simulation::delay(const Message& m) {
    if (config_.latency_override) {
        if (auto d = config_.latency_override(m)) return *d;
    }
    switch (config_.latency.kind) {
    case LatencyModel::Kind::zero: return 0;
    case LatencyModel::Kind::fixed: return config_.latency.lo;
    case LatencyModel::Kind::uniform:
        return std::uniform_int_distribution<Timestamp>(config_.latency.lo, config_.latency.hi)(latency_rng_);
    }
    return 0;
}

void Simulation::send(std::vector<Message>& outbox) {
    for (auto& m : outbox) {
        m.send_time = now_;
        Timestamp at = now_ + delay(m);
        if (config_.fifo) {
            auto& last = channel_last_[m.src * (n_ + 1) + m.dst];
            at = std::max(at, last);
            last = at;
        }
        m.delivery_time = at;
        m.seq = seq_++;
        totals_.by_kind[static_cast<std::size_t>(m.kind())] += 1;
        const NodeId dst = m.dst;
        const NodeId src = m.src;
        const auto seq = m.seq;
        queue_.push(Scheduled{at, dst, src, seq, std::move(m)});
    }
    outbox.clear();
}

bool Simulation::injection_first() const {
    if (next_event_ >= log_.events().size()) return false;
    if (queue_.empty()) return true;
    const auto& e = log_.events()[next_event_];
    const Timestamp t = e.timestamp + config_.replay_offset;
    const auto& top = queue_.top();
    if (t != top.time) return t < top.time;
    if (e.activity != top.dst) return e.activity < top.dst;
    return false;  // environment id sorts after every real sender
}

void Simulation::rethrow_with_case(const SimulationError& e) const {
    std::string what = e.what();
    const auto marker = what.find("case #");
    if (marker != std::string::npos) {
        const auto start = marker + 6;
        const auto stop = what.find(' ', start);
        const auto idx = std::stoul(what.substr(start, stop - start));
        if (idx < log_.case_count()) what += " [case id '" + log_.case_name(static_cast<CaseIndex>(idx)) + "']";
    }
    throw SimulationError(what);
}

void Simulation::inject() {
    Event e = log_.events()[next_event_++];
    e.timestamp += config_.replay_offset;
    now_ = std::max(now_, e.timestamp);
    std::vector<Message> outbox;
    try {
        nodes_[e.activity].on_local_event(e, now_, outbox);
    } catch (const SimulationError& err) {
        rethrow_with_case(err);
    }
    send(outbox);
    if (config_.snapshot_interval > 0 && next_event_ % config_.snapshot_interval == 0) {
        const auto id = collector_.request(outbox);
        snapshot_tags_[id] = next_event_;
        send(outbox);
    }
}

void Simulation::deliver(Scheduled item) {
    now_ = std::max(now_, item.time);
    Message& m = item.message;
    if (config_.record_trace) {
        const auto c = message_case(m);
        std::uint32_t items = 1;
        if (const auto* q = std::get_if<PredQuery>(&m.payload)) items = static_cast<std::uint32_t>(q->items.size());
        if (const auto* r = std::get_if<PredResponse>(&m.payload))
            items = static_cast<std::uint32_t>(r->candidates.size());
        trace_.push_back({item.time, m.src, m.dst, m.kind(), c ? static_cast<std::int64_t>(*c) : -1, items});
    }
    if (m.dst == collector_id_) {
        const auto& response = std::get<FMResponse>(m.payload);
        if (auto merged = collector_.on_response(m.src, response)) {
            if (awaited_ && *awaited_ == response.request) {
                awaited_result_ = std::move(*merged);
            } else if (auto tag = snapshot_tags_.find(response.request); tag != snapshot_tags_.end()) {
                snapshots_.push_back({tag->second, std::move(*merged)});
                snapshot_tags_.erase(tag);
            }
        }
        return;
    }
    std::vector<Message> outbox;
    try {
        nodes_.at(m.dst).on_message(m, now_, outbox);
    } catch (const SimulationError& err) {
        rethrow_with_case(err);
    }
    send(outbox);
}

bool Simulation::step() {
    if (injection_first()) {
        inject();
        return true;
    }
    if (queue_.empty()) return false;
    Scheduled item = queue_.top();
    queue_.pop();
    deliver(std::move(item));
    return true;
}

void Simulation::run_until_injected(std::size_t k) {
    k = std::min(k, log_.events().size());
    while (next_event_ < k || (!queue_.empty() && !injection_first())) {
        if (next_event_ >= k && injection_first()) break;
        if (!step()) break;
    }
}

MergedFM Simulation::collect() {
    std::vector<Message> outbox;
    const auto id = collector_.request(outbox);
    awaited_ = id;
    awaited_result_.reset();
    send(outbox);
    while (!awaited_result_) {
        if (!step()) collector_.fail_if_incomplete(id);
    }
    awaited_.reset();
    MergedFM fm = std::move(*awaited_result_);
    awaited_result_.reset();
    return fm;
}

SimResult Simulation::finish() {
    for (;;) {
        while (step()) {
        }
        std::vector<Message> outbox;
        for (auto& node : nodes_) {
            try {
                node.flush(now_, outbox);
            } catch (const SimulationError& err) {
                rethrow_with_case(err);
            }
        }
        if (outbox.empty() && queue_.empty()) break;
        send(outbox);
    }
    for (const auto& node : nodes_) {
        if (!node.idle()) throw SimulationError("node " + std::to_string(node.id()) + " did not quiesce");
    }

    Timestamp last = now_;
    if (!log_.events().empty()) last = std::max(last, log_.events().back().timestamp + config_.replay_offset);
    now_ = last + *config_.end_timeout + 1;
    for (auto& node : nodes_) node.flag_end_events(now_);

    const auto before = totals_.phase2();
    SimResult result;
    result.fm = n_ > 0 ? collect() : MergedFM(0);
    result.final_collect_messages = totals_.phase2() - before;
    result.activity_count = n_;
    for (const auto& node : nodes_) {
        result.partials.push_back(node.partial());
        result.stored.push_back(node.stored());
        result.dropped += node.dropped();
    }
    result.events = metrics_;
    result.trace = trace_;
    result.snapshots = snapshots_;
    std::sort(result.snapshots.begin(), result.snapshots.end(),
              [](const Snapshot& a, const Snapshot& b) { return a.events_processed < b.events_processed; });
    result.totals = totals_;
    result.end_timeout = *config_.end_timeout;
    result.final_time = now_;
    return result;
}

SimResult run(const EventLog& log, const SimConfig& config) {
    Simulation sim(log, config);
    return sim.finish();
}

std::vector<int> oracle_strategy_cost(const EventLog& log) {
    const auto truth = true_predecessors(log);
    std::vector<int> cost(log.events().size(), 0);
    for (std::size_t i = 0; i < cost.size(); ++i)
        cost[i] = truth[i] && *truth[i] != log.events()[i].activity ? 1 : 0;
    return cost;
}

void write_trace_csv(std::ostream& out, const SimResult& result, const EventLog& log) {
    out << "time_us,src,dst,variant,case_id\n";
    for (const auto& r : result.trace) {
        out << r.time << ',' << r.src << ',' << r.dst << ',' << to_string(r.kind) << ',';
        if (r.case_index >= 0) out << csv_escape(log.case_name(static_cast<CaseIndex>(r.case_index)));
        out << '\n';
    }
}

namespace {

template <typename T>
void put(std::ostream& out, T v) {
    unsigned char bytes[sizeof(T)];
    auto u = static_cast<std::make_unsigned_t<T>>(v);
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        bytes[i] = static_cast<unsigned char>(u & 0xFF);
        u = static_cast<decltype(u)>(u >> 8);
    }
    out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
    unsigned char bytes[sizeof(T)];
    if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw ParseError("trace: truncated binary trace");
    std::make_unsigned_t<T> u = 0;
    for (std::size_t i = sizeof(T); i-- > 0;) u = static_cast<decltype(u)>((u << 8) | bytes[i]);
    return static_cast<T>(u);
}

constexpr char kTraceMagic[8] = {'E', 'M', 'T', 'R', 'A', 'C', 'E', '1'};

} // namespace

void write_trace_binary(std::ostream& out, const std::vector<TraceRecord>& trace) {
    out.write(kTraceMagic, sizeof(kTraceMagic));
    put<std::uint64_t>(out, trace.size());
    for (const auto& r : trace) {
        put<std::int64_t>(out, r.time);
        put<std::uint32_t>(out, r.src);
        put<std::uint32_t>(out, r.dst);
        put<std::uint8_t>(out, static_cast<std::uint8_t>(r.kind));
        put<std::int64_t>(out, r.case_index);
        put<std::uint32_t>(out, r.items);
    }
}

std::vector<TraceRecord> read_trace_binary(std::istream& in) {
    char magic[sizeof(kTraceMagic)];
    if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kTraceMagic, sizeof(magic)) != 0)
        throw ParseError("trace: bad magic");
    const auto count = get<std::uint64_t>(in);
    std::vector<TraceRecord> trace;
    trace.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(count, 1u << 20)));
    for (std::uint64_t i = 0; i < count; ++i) {
        TraceRecord r;
        r.time = get<std::int64_t>(in);
        r.src = get<std::uint32_t>(in);
        r.dst = get<std::uint32_t>(in);
        const auto kind = get<std::uint8_t>(in);
        if (kind > static_cast<std::uint8_t>(MessageKind::fm_response)) throw ParseError("trace: bad message kind");
        r.kind = static_cast<MessageKind>(kind);
        r.case_index = get<std::int64_t>(in);
        r.items = get<std::uint32_t>(in);
        trace.push_back(r);
    }
    return trace;
}

} // namespace edgeminer
