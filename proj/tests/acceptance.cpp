// Acceptance gate: one PASS/FAIL/SKIP line per criterion. Exits nonzero on any FAIL.
// Real-log checks look for files under $EDGEMINER_DATA_DIR, else <source>/data.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "alpha.hpp"
#include "experiments.hpp"
#include "log_io.hpp"
#include "oracle.hpp"
#include "scenarios.hpp"
#include "synthetic.hpp"

#ifndef EDGEMINER_SOURCE_DIR
#define EDGEMINER_SOURCE_DIR "."
#endif

using namespace edgeminer;
namespace fs = std::filesystem;

namespace {

enum class Verdict { pass, fail, skip };

struct Line {
    Verdict verdict;
    std::string detail;
};

int failures = 0;

void report(const std::string& name, const Line& line) {
    static const char* tags[] = {"PASS", "FAIL", "SKIP"};
    std::cout << tags[static_cast<int>(line.verdict)] << "  " << name;
    if (!line.detail.empty()) std::cout << "  (" << line.detail << ")";
    std::cout << std::endl;
    if (line.verdict == Verdict::fail) ++failures;
}

Line verdict(bool ok, std::string detail) { return {ok ? Verdict::pass : Verdict::fail, std::move(detail)}; }

std::string fmt(double v, int digits = 2) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(digits) << v;
    return out.str();
}

bool matches_oracle(const EventLog& log, const MergedFM& fm) {
    return oracle::view(fm, log.activities().names()) == oracle::footprint(oracle::rows_of(log));
}

// The corpus behind the equivalence, window and fitness checks.
EventLog corpus_log(std::uint64_t seed) {
    std::mt19937_64 rng(seed * 7919 + 17);
    const std::size_t n = 1 + rng() % 12;
    const std::size_t cases = 1 + rng() % 50;
    auto spec = SyntheticSpec::uniform(n, cases, 1 + rng() % 20, seed);
    spec.min_length = 1;
    return generate_synthetic(spec);
}

// ---- real logs ----

fs::path data_dir() {
    if (const char* env = std::getenv("EDGEMINER_DATA_DIR"); env && *env) return env;
    return fs::path(EDGEMINER_SOURCE_DIR) / "data";
}

struct Dataset {
    std::string label;
    std::string stem;
};

const Dataset sepsis{"Sepsis", "sepsis"};
const Dataset hospital{"Hospital", "hospital_log"};
const Dataset factories{"Smart Factories", "smart_factories"};
const Dataset bpic{"BPIC-2017", "bpic2017"};
const Dataset traffic{"Road Traffic Fine", "road_traffic_fine"};

std::optional<fs::path> locate(const Dataset& d) {
    for (const char* ext : {".xes", ".xes.gz", ".csv"}) {
        const auto p = data_dir() / (d.stem + ext);
        if (fs::exists(p)) return p;
    }
    return std::nullopt;
}

std::map<std::string, EventLog> loaded;

const EventLog* dataset(const Dataset& d) {
    if (auto it = loaded.find(d.stem); it != loaded.end()) return &it->second;
    const auto path = locate(d);
    if (!path) return nullptr;
    ReadOptions opt;
    opt.tie_policy = TiePolicy::tiebreak;
    return &loaded.emplace(d.stem, read_log_file(path->string(), opt).log).first->second;
}

Line absent(const Dataset& d) {
    return {Verdict::skip, d.label + " log not found in " + data_dir().string() + "; see scripts/fetch_datasets.sh"};
}

// ---- criteria ----

void oracle_equivalence() {
    const auto t0 = std::chrono::steady_clock::now();
    std::size_t runs = 0, mismatches = 0;
    std::string first_bad;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const auto log = corpus_log(seed);
        const auto expected = oracle::footprint(oracle::rows_of(log));
        for (auto strategy : {Strategy::query_all, Strategy::mfp})
            for (bool latent : {false, true})
                for (std::size_t batch : {1, 5, 40}) {
                    SimConfig c;
                    c.strategy = strategy;
                    c.batch_size = batch;
                    c.latency = latent ? LatencyModel::uniform(0, 50'000) : LatencyModel::zero();
                    c.seed = seed;
                    c.record_trace = false;
                    const auto r = run(log, c);
                    ++runs;
                    if (oracle::view(r.fm, log.activities().names()) != expected) {
                        if (!mismatches)
                            first_bad = "seed " + std::to_string(seed) + " " + std::string(to_string(strategy)) +
                                        " batch " + std::to_string(batch);
                        ++mismatches;
                    }
                }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report("oracle equivalence: 1000 logs x 2 strategies x 2 latencies x 3 batch sizes",
           verdict(mismatches == 0 && secs < 300,
                   std::to_string(runs) + " runs, " + std::to_string(mismatches) + " mismatches" +
                       (first_bad.empty() ? "" : ", first " + first_bad) + ", " + fmt(secs, 1) + " s"));
}

void rectification() {
    bool ok = true;
    std::string detail;
    for (const auto& s : scenarios::all()) {
        const auto r = run(s.log, s.config);
        const auto corrections = r.totals[MessageKind::correction_notify];
        const bool good = corrections >= 1 && matches_oracle(s.log, r.fm) && s.log.events().size() >= 3 &&
                          s.log.events().size() <= 6;
        ok = ok && good;
        if (!detail.empty()) detail += "; ";
        detail += s.name + ": " + std::to_string(corrections) + " corrections" + (good ? "" : " BAD");
    }
    report("rectification: adversarial delays correct and converge", verdict(ok, detail));
}

// Mean Phase-1 messages over network-resolved, uncorrected events of a
// zero-latency query_all run, plus whether every one equals 2(n-1)+1.
std::pair<double, bool> naive_cost(const EventLog& log) {
    SimConfig c;
    c.strategy = Strategy::query_all;
    c.record_trace = false;
    const auto r = run(log, c);
    const double expected = 2.0 * static_cast<double>(log.activity_count() - 1) + 1.0;
    double sum = 0;
    std::size_t count = 0;
    bool exact = true;
    for (const auto& m : r.events) {
        if (m.resolution != Resolution::network || m.corrections) continue;
        sum += m.messages;
        ++count;
        exact = exact && m.messages == expected;
    }
    return {count ? sum / static_cast<double>(count) : expected, exact};
}

void message_formula() {
    bool ok = true;
    std::size_t checked = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto log = corpus_log(seed);
        if (log.activity_count() < 2) continue;
        ok = ok && naive_cost(log).second;
        ++checked;
    }
    report("message formula: query_all, zero latency costs 2(n-1)+1 per network-resolved event",
           verdict(ok, std::to_string(checked) + " synthetic logs"));
    for (const auto& [d, expected] : {std::pair{sepsis, 31.0}, std::pair{hospital, 1247.0}}) {
        const auto* log = dataset(d);
        const std::string name = "message formula: " + d.label + " = " + fmt(expected, 0);
        if (!log) {
            report(name, absent(d));
            continue;
        }
        const auto [mean, exact] = naive_cost(*log);
        report(name, verdict(exact && mean == expected, "mean " + fmt(mean)));
    }
}

void mfp_reduction() {
    const auto log = generate_synthetic(SyntheticSpec::skewed(16, 0.8, 200, 5, 30, 2024));
    const auto rows = baselines(log, {}, {1});
    report("MFP reduction: skewed synthetic log (n=16, weight 0.8) >= 60%",
           verdict(rows[1].reduction >= 60.0, "query_all " + fmt(rows[0].mean) + ", mfp " + fmt(rows[1].mean) +
                                                  ", reduction " + fmt(rows[1].reduction) + "%"));
    for (const auto& [d, expected] : {std::pair{sepsis, 81.30}, std::pair{factories, 92.15}, std::pair{hospital, 96.13}}) {
        const std::string name = "MFP reduction: " + d.label + " within 5pp of " + fmt(expected) + "%";
        const auto* real = dataset(d);
        if (!real) {
            report(name, absent(d));
            continue;
        }
        const auto r = baselines(*real, {}, {0});
        report(name, verdict(std::abs(r[1].reduction - expected) <= 5.0, "reduction " + fmt(r[1].reduction) + "%"));
    }
}

void batching() {
    const auto log = generate_synthetic(SyntheticSpec::uniform(12, 200, 20, 77));
    const auto pts = batch_sweep(log, {}, {1, 40});
    report("batching: synthetic batch 40 <= 0.5 x batch 1 (normalized queried nodes)",
           verdict(pts[1].normalized <= 0.5 * pts[0].normalized,
                   "batch 1 " + fmt(pts[0].normalized, 4) + ", batch 40 " + fmt(pts[1].normalized, 4)));
    for (const auto& d : {traffic, sepsis, factories, bpic, hospital}) {
        const std::string name = "batching: " + d.label + " at batch 40 < 2.5% of nodes";
        const auto* real = dataset(d);
        if (!real) {
            report(name, absent(d));
            continue;
        }
        const auto p = batch_sweep(*real, {}, {40});
        report(name, verdict(p[0].normalized < 0.025, fmt(100 * p[0].normalized) + "%"));
    }
}

std::optional<std::size_t> events_to_fitness(const std::vector<FitnessPoint>& curve, double level) {
    for (const auto& p : curve)
        if (p.fitness >= level) return p.events;
    return std::nullopt;
}

void fitness_convergence() {
    bool ok = true;
    std::size_t logs = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto log = corpus_log(seed);
        const auto curve = fitness_curve(log, {}, std::max<std::size_t>(1, log.events().size() / 10));
        ok = ok && !curve.empty() && curve.back().fitness == 1.0;
        ++logs;
    }
    for (const auto& s : scenarios::all()) {
        SimConfig c = s.config;
        const auto curve = fitness_curve(s.log, c, 1);
        ok = ok && curve.back().fitness == 1.0;
        ++logs;
    }
    report("fitness: final fitness exactly 1.0", verdict(ok, std::to_string(logs) + " logs"));

    for (const auto& d : {sepsis, bpic}) {
        const std::string name = "fitness: " + d.label + " >= 0.9 within 5% of events";
        const auto* real = dataset(d);
        if (!real) {
            report(name, absent(d));
            continue;
        }
        const auto total = real->events().size();
        const auto curve = fitness_curve(*real, {}, std::max<std::size_t>(1, total / 200));
        const auto at = events_to_fitness(curve, 0.9);
        report(name, verdict(at && *at <= total / 20 && curve.back().fitness == 1.0,
                             at ? "0.9 at event " + std::to_string(*at) + " of " + std::to_string(total) : "never"));
    }
    {
        const std::string name = "fitness: BPIC-2017 >= 0.9 by event 200";
        const auto* real = dataset(bpic);
        if (!real) {
            report(name, absent(bpic));
        } else {
            const auto curve = fitness_curve(*real, {}, 10);
            const auto at = events_to_fitness(curve, 0.9);
            report(name, verdict(at && *at <= 200, at ? "0.9 at event " + std::to_string(*at) : "never"));
        }
    }
}

// A net in name space, built either from the miner's output or from the
// brute-force pair set.
struct NamedNet {
    std::set<std::string> places;
    std::set<std::tuple<std::string, std::string>> arcs;  // (from, to)
    bool operator==(const NamedNet&) const = default;
};

std::string label(const oracle::NameSet& a, const oracle::NameSet& b) {
    auto side = [](const oracle::NameSet& s) {
        std::string out = "{";
        for (const auto& x : s) out += (out.size() > 1 ? "," : "") + x;
        return out + "}";
    };
    return "p_(" + side(a) + "," + side(b) + ")";
}

NamedNet expected_net(const oracle::Footprint& fp) {
    std::set<std::string> acts(fp.starts.begin(), fp.starts.end());
    acts.insert(fp.ends.begin(), fp.ends.end());
    for (const auto& [k, v] : fp.counts) acts.insert({k.first, k.second});
    NamedNet net;
    net.places = {"i_L", "o_L"};
    for (const auto& s : fp.starts) net.arcs.insert({"i_L", s});
    for (const auto& e : fp.ends) net.arcs.insert({e, "o_L"});
    for (const auto& [a, b] : oracle::alpha_pairs(fp, {acts.begin(), acts.end()})) {
        const auto p = label(a, b);
        net.places.insert(p);
        for (const auto& x : a) net.arcs.insert({x, p});
        for (const auto& y : b) net.arcs.insert({p, y});
    }
    return net;
}

NamedNet named(const PetriNet& net, const std::vector<std::string>& names) {
    NamedNet out;
    for (const auto& p : net.places) out.places.insert(p.name);
    for (const auto& a : net.arcs) {
        const auto& p = net.places[a.place].name;
        const auto& t = names[a.transition];
        if (a.direction == Arc::Direction::place_to_transition)
            out.arcs.insert({p, t});
        else
            out.arcs.insert({t, p});
    }
    return out;
}

void alpha_miner() {
    std::vector<RawEvent> raw;
    Timestamp t = 0;
    int c = 0;
    for (const std::string w : {"abcd", "acbd", "aed"}) {
        for (char a : w) raw.push_back({"L1-" + std::to_string(c), std::string(1, a), ++t});
        ++c;
    }
    const auto l1 = validate_log(EventLog::from_raw(raw), TiePolicy::reject).log;
    const auto& names = l1.activities().names();
    const auto net = alpha(central_footprint(l1), names);
    const auto want = expected_net(oracle::footprint(oracle::rows_of(l1)));
    const bool l1_ok = named(net, names) == want && want.places.size() == 6;
    report("alpha: L1 net equals exhaustive enumeration",
           verdict(l1_ok, std::to_string(net.places.size()) + " places, " + std::to_string(net.arcs.size()) + " arcs"));

    std::mt19937_64 rng(99);
    std::size_t same = 0, agree = 0;
    const std::size_t total = 200;
    for (std::size_t k = 0; k < total; ++k) {
        const std::size_t n = 2 + rng() % 9;
        MergedFM fm(n);
        std::vector<std::string> nm;
        for (std::size_t i = 0; i < n; ++i) nm.push_back(synthetic_activity_name(i));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (rng() % 4 == 0) fm.at(i, j) = 1 + rng() % 50;
        fm.starts().insert(static_cast<ActivityId>(rng() % n));
        fm.ends().insert(static_cast<ActivityId>(rng() % n));
        const auto a = alpha(fm, nm);
        const auto b = alpha(binarize(fm), nm);
        same += named(a, nm) == named(b, nm) && a.maximal_pairs == b.maximal_pairs;
        agree += named(a, nm) == expected_net(oracle::view(fm, nm));
    }
    report("alpha: alpha(fm) = alpha(binarize(fm)) on 200 random FMs",
           verdict(same == total && agree == total,
                   std::to_string(same) + " invariant, " + std::to_string(agree) + " equal to enumeration"));
}

void stabilization() {
    const std::string name = "stabilization: Hospital window 200 step 100 settles below 0.5 within 4000 events";
    const auto* real = dataset(hospital);
    if (!real) {
        report(name, absent(hospital));
        return;
    }
    const auto r = run(*real, {});
    const auto series = moving_average(queried_per_event(r), 200, 100);
    const auto at = stabilization_point(series, 0.5);
    report(name, verdict(at && *at <= 4000, at ? "settles at " + std::to_string(*at) : "never settles"));
}

void sliding_window() {
    bool ok = true;
    std::size_t logs = 0;
    auto check = [&](const EventLog& log, SimConfig c) {
        c.record_trace = false;
        const auto plain = run(log, c).fm;
        const Timestamp span = log.events().back().timestamp - log.events().front().timestamp;
        SimConfig by_age = c;
        by_age.window_age = span + 1;
        SimConfig by_count = c;
        by_count.window_events = log.events().size();
        ok = ok && run(log, by_age).fm == plain && run(log, by_count).fm == plain;
        ++logs;
    };
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        SimConfig c;
        c.latency = seed % 2 ? LatencyModel::uniform(0, 50'000) : LatencyModel::zero();
        c.batch_size = 1 + seed % 5;
        c.seed = seed;
        check(corpus_log(seed), c);
    }
    for (const auto& s : scenarios::all()) check(s.log, s.config);
    for (const auto& d : {sepsis, factories}) {
        if (const auto* real = dataset(d)) check(*real, {});
    }
    report("sliding window: window covering the log leaves the FM unchanged", verdict(ok, std::to_string(logs) + " logs"));
}

void determinism() {
    const auto log = generate_synthetic(SyntheticSpec::uniform(8, 60, 20, 5));
    SimConfig c;
    c.latency = LatencyModel::uniform(0, 50'000);
    c.batch_size = 5;
    c.seed = 42;
    auto outputs = [&] {
        const auto s = summarize_run(log, c);
        std::ostringstream trace, bin;
        write_trace_csv(trace, s.result, log);
        write_trace_binary(bin, s.result.trace);
        return std::vector<std::string>{trace.str(),
                                        bin.str(),
                                        summary_csv(s, log, c),
                                        baselines_csv(baselines(log, c, {1, 2})),
                                        cdf_csv(queried_cdf(queried_per_event(s.result), log.activity_count())),
                                        batch_sweep_csv(batch_sweep(log, c, {1, 10})),
                                        fitness_csv(fitness_curve(log, c, 50)),
                                        activity_csv(activity_breakdown(log, s.result), log.case_count())};
    };
    const auto a = outputs();
    const auto b = outputs();
    std::size_t bytes = 0;
    for (const auto& s : a) bytes += s.size();
    report("determinism: identical traces and CSV outputs across runs",
           verdict(a == b && a[0].size() > 100, std::to_string(a.size()) + " outputs, " + std::to_string(bytes) + " bytes"));
}

} // namespace

int main() {
    std::cout << "data directory: " << data_dir().string() << '\n';
    const std::vector<std::function<void()>> checks = {oracle_equivalence, rectification, message_formula,
                                                       mfp_reduction,      batching,      fitness_convergence,
                                                       alpha_miner,        stabilization, sliding_window,
                                                       determinism};
    for (const auto& check : checks) {
        try {
            check();
        } catch (const std::exception& e) {
            report("unexpected error", {Verdict::fail, e.what()});
        }
    }
    std::cout << (failures ? "acceptance: FAILED" : "acceptance: ok") << std::endl;
    return failures ? 1 : 0;
}
