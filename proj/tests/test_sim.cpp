#include <doctest.h>

#include <sstream>

#include "oracle.hpp"
#include "scenarios.hpp"
#include "sim.hpp"
#include "synthetic.hpp"

using namespace edgeminer;

namespace {

EventLog toy() { return scenarios::make_log({{"c", "a", 10}, {"c", "b", 20}}); }

bool matches_oracle(const EventLog& log, const SimResult& r) {
    return oracle::view(r.fm, log.activities().names()) == oracle::footprint(oracle::rows_of(log));
}

std::string trace_csv(const EventLog& log, const SimResult& r) {
    std::ostringstream out;
    write_trace_csv(out, r, log);
    return out.str();
}

} // namespace

TEST_SUITE("sim_network") {

// a asks b and finds nothing, b asks a: five Phase-1 messages in all. The
// oracle strategy knows a starts its trace and skips the first query.
TEST_CASE("<a,b>: b asks a once") {
    const auto log = toy();
    for (auto s : {Strategy::query_all, Strategy::mfp, Strategy::oracle}) {
        SimConfig c;
        c.strategy = s;
        const auto r = run(log, c);
        CHECK(r.fm.at(0, 1) == 1);
        CHECK(r.fm.total() == 1);
        CHECK(r.fm.starts() == std::set<ActivityId>{0});
        CHECK(r.fm.ends() == std::set<ActivityId>{1});
        const std::uint64_t queries = s == Strategy::oracle ? 1 : 2;
        CHECK(r.totals[MessageKind::pred_query] == queries);
        CHECK(r.totals[MessageKind::pred_response] == queries);
        CHECK(r.totals[MessageKind::chosen_notify] == 1);
        CHECK(r.totals[MessageKind::correction_notify] == 0);
        CHECK(r.events[1].resolution == Resolution::network);
        CHECK(r.events[1].messages == 3.0);
        CHECK(r.events[0].resolution == Resolution::start);
    }
}

TEST_CASE("latency model parsing") {
    CHECK(LatencyModel::parse("zero").kind == LatencyModel::Kind::zero);
    const auto f = LatencyModel::parse("fixed:7");
    CHECK(f.kind == LatencyModel::Kind::fixed);
    CHECK(f.lo == 7);
    const auto u = LatencyModel::parse("uniform:1:50000:9");
    CHECK(u.hi == 50000);
    CHECK(u.seed == 9u);
    CHECK(LatencyModel::parse(u.to_string()).to_string() == u.to_string());
    CHECK_THROWS(LatencyModel::parse("uniform:5:1"));
    CHECK_THROWS(LatencyModel::parse("gaussian"));
}

TEST_CASE("oracle strategy cost") {
    CHECK(oracle_strategy_cost(scenarios::make_log({{"c", "a", 1}, {"c", "a", 2}})) == std::vector<int>{0, 0});
    CHECK(oracle_strategy_cost(toy()) == std::vector<int>{0, 1});
}

TEST_CASE("random logs agree with the oracle") {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        const auto log = generate_synthetic(SyntheticSpec::uniform(1 + seed % 8, 1 + seed % 11, 12, seed));
        for (auto s : {Strategy::query_all, Strategy::mfp, Strategy::oracle}) {
            SimConfig c;
            c.strategy = s;
            c.batch_size = 1 + seed % 4;
            c.latency = seed % 2 ? LatencyModel::uniform(0, 50'000) : LatencyModel::zero();
            c.seed = seed;
            const auto r = run(log, c);
            CHECK(matches_oracle(log, r));
            CHECK(r.totals[MessageKind::pred_query] == r.totals[MessageKind::pred_response]);
            CHECK(r.final_collect_messages == 2 * log.activity_count());
            for (std::size_t k = 1; k < r.trace.size(); ++k) REQUIRE(r.trace[k - 1].time <= r.trace[k].time);
        }
    }
}

TEST_CASE("non-FIFO channels still converge") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto log = generate_synthetic(SyntheticSpec::uniform(6, 20, 15, seed));
        SimConfig c;
        c.latency = LatencyModel::uniform(0, 500'000);
        c.fifo = false;
        c.seed = seed;
        CHECK(matches_oracle(log, run(log, c)));
    }
}

TEST_CASE("zero latency with batch 1 needs no corrections") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto log = generate_synthetic(SyntheticSpec::uniform(5, 15, 10, seed));
        for (auto s : {Strategy::query_all, Strategy::mfp}) {
            SimConfig c;
            c.strategy = s;
            CHECK(run(log, c).totals[MessageKind::correction_notify] == 0);
        }
    }
}

TEST_CASE("deterministic trace") {
    const auto log = generate_synthetic(SyntheticSpec::uniform(6, 25, 12, 4));
    SimConfig c;
    c.latency = LatencyModel::uniform(0, 50'000);
    c.seed = 11;
    c.batch_size = 3;
    const auto a = run(log, c);
    const auto b = run(log, c);
    CHECK(a.trace == b.trace);
    CHECK(trace_csv(log, a) == trace_csv(log, b));
    c.seed = 12;
    CHECK(run(log, c).trace != a.trace);
}

TEST_CASE("binary trace") {
    const auto log = generate_synthetic(SyntheticSpec::uniform(4, 10, 8, 2));
    const auto r = run(log, {});
    std::stringstream buf;
    write_trace_binary(buf, r.trace);
    CHECK(read_trace_binary(buf) == r.trace);

    std::stringstream bad("NOTATRACE");
    CHECK_THROWS_AS(read_trace_binary(bad), ParseError);
    std::string bytes;
    {
        std::ostringstream out;
        write_trace_binary(out, r.trace);
        bytes = out.str();
    }
    std::stringstream cut(bytes.substr(0, bytes.size() - 3));
    CHECK_THROWS_AS(read_trace_binary(cut), ParseError);
}

TEST_CASE("trace CSV header and collector id") {
    const auto log = toy();
    const auto text = trace_csv(log, run(log, {}));
    CHECK(text.rfind("time_us,src,dst,variant,case_id\n", 0) == 0);
    CHECK(text.find(",2,0,FMRequest,") != std::string::npos);
}

TEST_CASE("collect mid-run is idempotent and costs 2n messages") {
    const auto log = generate_synthetic(SyntheticSpec::uniform(5, 10, 10, 8));
    Simulation sim(log, {});
    sim.run_until_injected(log.events().size() / 2);
    const auto before = sim.totals().phase2();
    const auto a = sim.collect();
    const auto b = sim.collect();
    CHECK(a == b);
    CHECK(sim.totals().phase2() - before == 4 * log.activity_count());
    CHECK(a.total() <= central_footprint(log).total());
    const auto r = sim.finish();
    CHECK(matches_oracle(log, r));
}

TEST_CASE("snapshots") {
    const auto log = generate_synthetic(SyntheticSpec::uniform(4, 12, 10, 6));
    SimConfig c;
    c.snapshot_interval = 10;
    const auto r = run(log, c);
    REQUIRE(r.snapshots.size() == log.events().size() / 10);
    for (std::size_t k = 1; k < r.snapshots.size(); ++k) {
        CHECK(r.snapshots[k - 1].events_processed < r.snapshots[k].events_processed);
        CHECK(r.snapshots[k - 1].fm.total() <= r.snapshots[k].fm.total());
    }
    CHECK(r.fm == run(log, {}).fm);
}

TEST_CASE("a window covering the whole log changes nothing") {
    const auto log = generate_synthetic(SyntheticSpec::uniform(5, 30, 12, 3));
    const Timestamp span = log.events().back().timestamp - log.events().front().timestamp;
    SimConfig c;
    c.window_age = span + 1;
    CHECK(run(log, c).fm == run(log, {}).fm);
    c.window_age.reset();
    c.window_events = log.events().size();
    CHECK(run(log, c).fm == run(log, {}).fm);
}

TEST_CASE("small windows evict stored events") {
    const auto log = generate_synthetic(SyntheticSpec::uniform(3, 40, 10, 5));
    SimConfig c;
    c.window_events = 5;
    const auto r = run(log, c);
    std::size_t kept = 0;
    for (auto s : r.stored) kept += s;
    CHECK(kept < log.events().size() / 2);
}

TEST_CASE("replay offset") {
    const auto log = generate_synthetic(SyntheticSpec::uniform(4, 10, 8, 1));
    SimConfig c;
    c.replay_offset = 5'000'000;
    c.strategy = Strategy::oracle;
    CHECK(run(log, c).fm == run(log, {}).fm);
}

TEST_CASE("rectification scenarios") {
    for (const auto& s : scenarios::all()) {
        CAPTURE(s.name);
        const auto r = run(s.log, s.config);
        CHECK(r.totals[MessageKind::correction_notify] >= 1);
        CHECK(matches_oracle(s.log, r));
    }
}

TEST_CASE("watchdog names the case") {
    auto s = scenarios::all().front();
    s.config.max_searches = 1;
    try {
        run(s.log, s.config);
        FAIL("expected SimulationError");
    } catch (const SimulationError& e) {
        CHECK(std::string(e.what()).find("case id 'x'") != std::string::npos);
    }
}

TEST_CASE("configuration errors") {
    const auto log = toy();
    SimConfig c;
    c.batch_size = 0;
    CHECK_THROWS(run(log, c));
    c.batch_size = 1;
    c.latency = {LatencyModel::Kind::uniform, 10, 5, std::nullopt};
    CHECK_THROWS(run(log, c));
}

TEST_CASE("default end timeout") {
    CHECK(default_end_timeout(toy()) == 20);
    CHECK(default_end_timeout(scenarios::make_log({{"c", "a", 1}})) == 1);
}

}
