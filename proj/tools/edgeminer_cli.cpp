// Experiment harness over the EdgeMiner C API.

#include <edgeminer/edgeminer.h>

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <functional>
#include <memory>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

struct CliError {
    em_status status;
    std::string message;
};

void check(em_status s) {
    if (s != EM_OK) throw CliError{s, em_last_error()};
}

// Owns a char* returned by the library.
std::string take(char* s) {
    std::string out = s ? s : "";
    em_string_free(s);
    return out;
}

struct LogOptions {
    std::string path;
    std::string format;
    std::string case_column;
    std::string activity_column;
    std::string timestamp_column;
    std::string tie_policy = "reject";
};

struct SimOptions {
    std::string config_file;
    std::optional<std::string> strategy;
    std::optional<std::string> batch_size;
    std::optional<std::string> seed;
    std::optional<std::string> latency;
    std::optional<std::string> window;
    std::optional<std::string> window_events;
    std::optional<std::string> end_timeout;
};

struct Handles {
    em_log* log = nullptr;
    em_config* config = nullptr;

    Handles() = default;
    Handles(const Handles&) = delete;
    Handles& operator=(const Handles&) = delete;
    ~Handles() {
        em_log_free(log);
        em_config_free(config);
    }
};

void add_log_options(CLI::App* cmd, LogOptions& o) {
    cmd->add_option("--log", o.path, "Event log (.xes, .csv, optionally .gz)")->required();
    cmd->add_option("--format", o.format, "Force the log format")->check(CLI::IsMember({"xes", "csv"}));
    cmd->add_option("--case-column", o.case_column, "CSV case column (default case_id)");
    cmd->add_option("--activity-column", o.activity_column, "CSV activity column (default activity)");
    cmd->add_option("--timestamp-column", o.timestamp_column, "CSV timestamp column (default timestamp_us)");
    cmd->add_option("--tie-policy", o.tie_policy, "Equal same-case timestamps: reject or tiebreak")
        ->check(CLI::IsMember({"reject", "tiebreak"}));
}

void add_sim_options(CLI::App* cmd, SimOptions& o) {
    cmd->add_option("--config", o.config_file, "key = value config file; flags override it");
    cmd->add_option("--strategy", o.strategy, "query_all, mfp or oracle");
    cmd->add_option("--batch-size", o.batch_size, "Events per query round");
    cmd->add_option("--seed", o.seed, "Seed for the latency draw");
    cmd->add_option("--latency", o.latency, "zero, fixed:<us> or uniform:<lo>:<hi>[:<seed>] (synthetic)");
    cmd->add_option("--window", o.window, "Sliding window age in microseconds");
    cmd->add_option("--window-events", o.window_events, "Sliding window size in events per node");
    cmd->add_option("--end-timeout", o.end_timeout, "Quiet time in microseconds before an event counts as a trace end");
}

void open(Handles& h, const LogOptions& lo, const SimOptions* so) {
    em_read_options r{};
    r.format = lo.format.empty() ? nullptr : lo.format.c_str();
    r.case_column = lo.case_column.empty() ? nullptr : lo.case_column.c_str();
    r.activity_column = lo.activity_column.empty() ? nullptr : lo.activity_column.c_str();
    r.timestamp_column = lo.timestamp_column.empty() ? nullptr : lo.timestamp_column.c_str();
    r.tiebreak = lo.tie_policy == "tiebreak";
    check(em_log_read_file(lo.path.c_str(), &r, &h.log));
    if (const auto p = em_log_perturbation_count(h.log); p > 0)
        std::cerr << "note: " << p << " timestamps moved by +1us to break same-case ties\n";

    h.config = em_config_create();
    if (!h.config) throw CliError{EM_ERR_INTERNAL, "out of memory"};
    if (!so) return;
    if (!so->config_file.empty()) check(em_config_load_file(h.config, so->config_file.c_str()));
    auto set = [&](const char* key, const std::optional<std::string>& v) {
        if (v) check(em_config_set(h.config, key, v->c_str()));
    };
    set("strategy", so->strategy);
    set("batch_size", so->batch_size);
    set("seed", so->seed);
    set("latency", so->latency);
    set("window", so->window);
    set("window_events", so->window_events);
    set("end_timeout", so->end_timeout);
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f || !(f << text)) throw CliError{EM_ERR_IO, "cannot write " + path};
}

em_fm* mined_fm(const Handles& h, bool central) {
    em_fm* fm = nullptr;
    if (central) {
        check(em_fm_central(h.log, &fm));
        return fm;
    }
    em_result* r = nullptr;
    check(em_simulate(h.log, h.config, &r));
    const em_status s = em_result_fm(r, &fm);
    em_result_free(r);
    check(s);
    return fm;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"EdgeMiner: distributed footprint-matrix construction, simulated"};
    app.require_subcommand(1);
    app.set_version_flag("--version", em_version());

    LogOptions lo;
    SimOptions so;
    std::string out;
    bool equal = true;
    std::function<void()> action;

    auto* run = app.add_subcommand("run", "Replay a log and compare the collected footprint with the oracle");
    std::string trace_csv, trace_bin, fm_csv, fm_json;
    add_log_options(run, lo);
    add_sim_options(run, so);
    run->add_option("--out", out, "Summary CSV (default stdout)");
    run->add_option("--trace-csv", trace_csv, "Write the message trace as CSV");
    run->add_option("--trace-bin", trace_bin, "Write the message trace in binary form");
    run->add_option("--fm-csv", fm_csv, "Write the collected footprint as CSV");
    run->add_option("--fm-json", fm_json, "Write the collected footprint as JSON");
    run->callback([&] {
        action = [&] {
            Handles h;
            open(h, lo, &so);
            em_result* r = nullptr;
            check(em_simulate(h.log, h.config, &r));
            std::unique_ptr<em_result, decltype(&em_result_free)> guard(r, em_result_free);
            em_totals t{};
            check(em_result_totals(r, &t));
            equal = em_result_matches_oracle(r) == 1;
            double messages = 0;
            std::size_t network = 0;
            for (std::size_t i = 0; i < em_result_event_count(r); ++i) {
                em_event_metrics m{};
                check(em_result_event(r, i, &m));
                if (m.resolution == EM_NETWORK) {
                    messages += m.messages;
                    ++network;
                }
            }
            const auto phase1 = t.pred_query + t.pred_response + t.chosen_notify + t.correction_notify;
            std::fprintf(stderr,
                         "FM == oracle: %s; messages: %llu (query %llu, response %llu, notify %llu, correction %llu); "
                         "per network-resolved event: %.2f\n",
                         equal ? "true" : "false", static_cast<unsigned long long>(phase1),
                         static_cast<unsigned long long>(t.pred_query), static_cast<unsigned long long>(t.pred_response),
                         static_cast<unsigned long long>(t.chosen_notify),
                         static_cast<unsigned long long>(t.correction_notify),
                         network ? messages / static_cast<double>(network) : 0.0);
            char* s = nullptr;
            check(em_result_summary_csv(r, &s));
            emit(take(s), out);
            if (!trace_csv.empty()) {
                check(em_result_trace_csv(r, &s));
                emit(take(s), trace_csv);
            }
            if (!trace_bin.empty()) check(em_result_trace_binary(r, trace_bin.c_str()));
            if (!fm_csv.empty() || !fm_json.empty()) {
                em_fm* fm = nullptr;
                check(em_result_fm(r, &fm));
                std::unique_ptr<em_fm, decltype(&em_fm_free)> fm_guard(fm, em_fm_free);
                if (!fm_csv.empty()) {
                    check(em_fm_to_csv(fm, &s));
                    emit(take(s), fm_csv);
                }
                if (!fm_json.empty()) {
                    check(em_fm_to_json(fm, &s));
                    emit(take(s), fm_json);
                }
            }
        };
    });

    auto* base = app.add_subcommand("baselines", "Mean queried nodes per event for query_all, mfp and oracle");
    std::vector<std::uint64_t> seeds;
    add_log_options(base, lo);
    add_sim_options(base, so);
    base->add_option("--seeds", seeds, "One run per seed (default: --seed)")->delimiter(',');
    base->add_option("--out", out, "CSV output (default stdout)");
    base->callback([&] {
        action = [&] {
            Handles h;
            open(h, lo, &so);
            char* s = nullptr;
            check(em_exp_baselines(h.log, h.config, seeds.data(), seeds.size(), &s));
            emit(take(s), out);
        };
    });

    auto* cdf = app.add_subcommand("cdf", "CDF of the fraction of nodes queried per event");
    add_log_options(cdf, lo);
    add_sim_options(cdf, so);
    cdf->add_option("--out", out, "CSV output (default stdout)");
    cdf->callback([&] {
        action = [&] {
            Handles h;
            open(h, lo, &so);
            char* s = nullptr;
            check(em_exp_cdf(h.log, h.config, &s));
            emit(take(s), out);
        };
    });

    auto* ma = app.add_subcommand("moving-average", "Moving average of queried nodes per event");
    std::vector<std::size_t> windows{200};
    std::vector<std::size_t> steps{100};
    double threshold = 0.5;
    add_log_options(ma, lo);
    add_sim_options(ma, so);
    ma->add_option("--windows", windows, "Window sizes in events")->delimiter(',');
    ma->add_option("--steps", steps, "Step per window size, in events")->delimiter(',');
    ma->add_option("--threshold", threshold, "Stabilization slope, nodes per 100 events");
    ma->add_option("--out", out, "CSV output (default stdout)");
    ma->callback([&] {
        action = [&] {
            if (windows.size() != steps.size()) throw CliError{EM_ERR_ARGUMENT, "--windows and --steps differ in length"};
            Handles h;
            open(h, lo, &so);
            char* s = nullptr;
            check(em_exp_moving_average(h.log, h.config, windows.data(), steps.data(), windows.size(), &s));
            emit(take(s), out);
            for (std::size_t k = 0; k < windows.size(); ++k) {
                std::int64_t at = -1;
                check(em_exp_stabilization(h.log, h.config, windows[k], steps[k], threshold, &at));
                std::cerr << "window " << windows[k] << " step " << steps[k] << ": ";
                if (at < 0) {
                    std::cerr << "no stabilization\n";
                } else {
                    std::cerr << "stable below " << threshold << " nodes/100 events after " << at << " events\n";
                }
            }
        };
    });

    auto* sweep = app.add_subcommand("batch-sweep", "Mean queried nodes per event against batch size");
    std::vector<std::size_t> sizes{1, 2, 5, 10, 20, 40};
    add_log_options(sweep, lo);
    add_sim_options(sweep, so);
    sweep->add_option("--sizes", sizes, "Batch sizes")->delimiter(',');
    sweep->add_option("--out", out, "CSV output (default stdout)");
    sweep->callback([&] {
        action = [&] {
            Handles h;
            open(h, lo, &so);
            char* s = nullptr;
            check(em_exp_batch_sweep(h.log, h.config, sizes.data(), sizes.size(), &s));
            emit(take(s), out);
        };
    });

    auto* fit = app.add_subcommand("fitness-curve", "Fitness of intermediate collections against the final footprint");
    std::size_t interval = 0;
    add_log_options(fit, lo);
    add_sim_options(fit, so);
    fit->add_option("--interval", interval, "Collect every this many events (default 1% of the log)");
    fit->add_option("--out", out, "CSV output (default stdout)");
    fit->callback([&] {
        action = [&] {
            Handles h;
            open(h, lo, &so);
            std::size_t every = interval;
            if (every == 0) every = std::max<std::size_t>(1, em_log_event_count(h.log) / 100);
            char* s = nullptr;
            check(em_exp_fitness_curve(h.log, h.config, every, &s));
            emit(take(s), out);
        };
    });

    auto* act = app.add_subcommand("activity-breakdown", "Per-activity mean queried nodes and occurrences");
    add_log_options(act, lo);
    add_sim_options(act, so);
    act->add_option("--out", out, "CSV output (default stdout)");
    act->callback([&] {
        action = [&] {
            Handles h;
            open(h, lo, &so);
            char* s = nullptr;
            check(em_exp_activity_breakdown(h.log, h.config, &s));
            emit(take(s), out);
        };
    });

    auto* stats = app.add_subcommand("stats", "Dataset properties");
    add_log_options(stats, lo);
    stats->add_option("--out", out, "CSV output (default stdout)");
    stats->callback([&] {
        action = [&] {
            Handles h;
            open(h, lo, nullptr);
            char* s = nullptr;
            check(em_exp_stats(h.log, &s));
            emit(take(s), out);
        };
    });

    bool central = false;
    auto* alpha = app.add_subcommand("alpha", "Alpha miner on the collected footprint");
    std::string net_format = "dot";
    add_log_options(alpha, lo);
    add_sim_options(alpha, so);
    alpha->add_option("--net-format", net_format, "dot or pnml")->check(CLI::IsMember({"dot", "pnml"}));
    alpha->add_flag("--central", central, "Use the centralized footprint instead of a simulated run");
    alpha->add_option("--out", out, "Output file (default stdout)");
    alpha->callback([&] {
        action = [&] {
            Handles h;
            open(h, lo, &so);
            em_fm* fm = mined_fm(h, central);
            std::unique_ptr<em_fm, decltype(&em_fm_free)> fm_guard(fm, em_fm_free);
            em_net* net = nullptr;
            check(em_alpha(fm, &net));
            std::unique_ptr<em_net, decltype(&em_net_free)> net_guard(net, em_net_free);
            char* s = nullptr;
            check(net_format == "pnml" ? em_net_to_pnml(net, &s) : em_net_to_dot(net, &s));
            emit(take(s), out);
        };
    });

    auto* dfg = app.add_subcommand("dfg", "Directly-follows graph of the collected footprint as DOT");
    add_log_options(dfg, lo);
    add_sim_options(dfg, so);
    dfg->add_flag("--central", central, "Use the centralized footprint instead of a simulated run");
    dfg->add_option("--out", out, "Output file (default stdout)");
    dfg->callback([&] {
        action = [&] {
            Handles h;
            open(h, lo, &so);
            em_fm* fm = mined_fm(h, central);
            std::unique_ptr<em_fm, decltype(&em_fm_free)> fm_guard(fm, em_fm_free);
            char* s = nullptr;
            check(em_fm_dfg_dot(fm, &s));
            emit(take(s), out);
        };
    });

    auto* dep = app.add_subcommand("dependency", "Dependency measures of the collected footprint as CSV");
    add_log_options(dep, lo);
    add_sim_options(dep, so);
    dep->add_flag("--central", central, "Use the centralized footprint instead of a simulated run");
    dep->add_option("--out", out, "Output file (default stdout)");
    dep->callback([&] {
        action = [&] {
            Handles h;
            open(h, lo, &so);
            em_fm* fm = mined_fm(h, central);
            std::unique_ptr<em_fm, decltype(&em_fm_free)> fm_guard(fm, em_fm_free);
            char* s = nullptr;
            check(em_fm_dependency_csv(fm, &s));
            emit(take(s), out);
        };
    });

    auto* gen = app.add_subcommand("generate", "Write a synthetic log as case_id,activity,timestamp_us CSV");
    std::size_t activities = 5, cases = 10, min_length = 1, max_length = 10;
    std::uint64_t gen_seed = 0;
    std::optional<double> skew;
    gen->add_option("--activities", activities, "Number of activities")->check(CLI::PositiveNumber);
    gen->add_option("--cases", cases, "Number of cases");
    gen->add_option("--min-length", min_length, "Shortest trace");
    gen->add_option("--max-length", max_length, "Longest trace");
    gen->add_option("--seed", gen_seed, "Generator seed");
    gen->add_option("--skew", skew, "Weight of the dominant successor i -> i+1 (default: uniform)")
        ->check(CLI::Range(0.0, 1.0));
    gen->add_option("--out", out, "CSV output (default stdout)");
    gen->callback([&] {
        action = [&] {
            em_log* log = nullptr;
            if (skew) {
                check(em_log_generate_skewed(activities, *skew, cases, min_length, max_length, gen_seed, &log));
            } else {
                em_synthetic_spec spec{activities, cases, min_length, max_length, nullptr, gen_seed};
                check(em_log_generate(&spec, &log));
            }
            std::unique_ptr<em_log, decltype(&em_log_free)> guard(log, em_log_free);
            char* s = nullptr;
            check(em_log_to_csv(log, &s));
            emit(take(s), out);
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    try {
        action();
    } catch (const CliError& e) {
        std::cerr << "error (" << em_status_name(e.status) << "): " << e.message << '\n';
        return 2;
    }
    return equal ? 0 : 1;
}
