#include "edgeminer/edgeminer.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include "alpha.hpp"
#include "collector.hpp"
#include "config.hpp"
#include "errors.hpp"
#include "experiments.hpp"
#include "log_io.hpp"
#include "synthetic.hpp"

using namespace edgeminer;

struct em_log {
    std::shared_ptr<const EventLog> log;
    std::size_t perturbations = 0;
};

struct em_config {
    SimConfig config;
};

struct em_result {
    std::shared_ptr<const EventLog> log;
    SimConfig config;
    RunSummary summary;
};

struct em_fm {
    MergedFM fm;
    std::vector<std::string> names;
};

struct em_net {
    PetriNet net;
    std::vector<std::string> names;
};

namespace {

thread_local std::string last_error;

em_status fail(em_status status, const std::string& message) {
    last_error = message;
    return status;
}

// Runs f, mapping exceptions onto status codes.
template <typename F>
em_status guarded(F&& f) {
    try {
        f();
        last_error.clear();
        return EM_OK;
    } catch (const IoError& e) {
        return fail(EM_ERR_IO, e.what());
    } catch (const ParseError& e) {
        return fail(EM_ERR_PARSE, e.what());
    } catch (const ValidationError& e) {
        return fail(EM_ERR_VALIDATION, e.what());
    } catch (const MergeError& e) {
        return fail(EM_ERR_MERGE, e.what());
    } catch (const ProtocolError& e) {
        return fail(EM_ERR_PROTOCOL, e.what());
    } catch (const InvariantViolation& e) {
        return fail(EM_ERR_INVARIANT, e.what());
    } catch (const SimulationError& e) {
        return fail(EM_ERR_SIMULATION, e.what());
    } catch (const MiningError& e) {
        return fail(EM_ERR_MINING, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(EM_ERR_ARGUMENT, e.what());
    } catch (const std::bad_alloc&) {
        return fail(EM_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(EM_ERR_INTERNAL, e.what());
    }
}

char* dup(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.data(), s.size() + 1);
    return out;
}

void require(const void* p, const char* what) {
    if (!p) throw std::invalid_argument(std::string(what) + " is null");
}

ReadOptions read_options(const em_read_options* o) {
    ReadOptions r;
    if (!o) return r;
    if (o->format) {
        const std::string f = o->format;
        if (f == "xes") {
            r.format = LogFormat::xes;
        } else if (f == "csv") {
            r.format = LogFormat::csv;
        } else {
            throw std::invalid_argument("unknown log format '" + f + "'");
        }
    }
    if (o->case_column) r.mapping.case_column = o->case_column;
    if (o->activity_column) r.mapping.activity_column = o->activity_column;
    if (o->timestamp_column) r.mapping.timestamp_column = o->timestamp_column;
    r.tie_policy = o->tiebreak ? TiePolicy::tiebreak : TiePolicy::reject;
    return r;
}

em_log* wrap(LoadedLog loaded) {
    auto* h = new em_log;
    h->perturbations = loaded.report.perturbations.size();
    h->log = std::make_shared<const EventLog>(std::move(loaded.log));
    return h;
}

em_fm* wrap(MergedFM fm, std::vector<std::string> names) {
    return new em_fm{std::move(fm), std::move(names)};
}

const SimConfig& config_of(const em_config* c) {
    static const SimConfig defaults;
    return c ? c->config : defaults;
}

} // namespace

extern "C" {

const char* em_last_error(void) { return last_error.c_str(); }

const char* em_status_name(em_status status) {
    switch (status) {
    case EM_OK: return "ok";
    case EM_ERR_ARGUMENT: return "invalid argument";
    case EM_ERR_IO: return "i/o error";
    case EM_ERR_PARSE: return "parse error";
    case EM_ERR_VALIDATION: return "validation error";
    case EM_ERR_MERGE: return "merge error";
    case EM_ERR_PROTOCOL: return "protocol error";
    case EM_ERR_INVARIANT: return "invariant violation";
    case EM_ERR_SIMULATION: return "simulation error";
    case EM_ERR_MINING: return "mining error";
    case EM_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* em_version(void) { return "0.1.0"; }

void em_string_free(char* s) { std::free(s); }

em_status em_log_read_file(const char* path, const em_read_options* options, em_log** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = wrap(read_log_file(path, read_options(options)));
    });
}

em_status em_log_read_buffer(const char* data, size_t size, const em_read_options* options, em_log** out) {
    return guarded([&] {
        require(data, "data");
        require(out, "out");
        const auto opts = read_options(options);
        if (!opts.format) throw std::invalid_argument("em_log_read_buffer needs options->format");
        std::istringstream in(std::string(data, size));
        *out = wrap(read_log(in, *opts.format, opts));
    });
}

em_status em_log_generate(const em_synthetic_spec* spec, em_log** out) {
    return guarded([&] {
        require(spec, "spec");
        require(out, "out");
        SyntheticSpec s = SyntheticSpec::uniform(spec->activities, spec->cases, spec->max_length, spec->seed);
        s.min_length = spec->min_length;
        if (spec->transitions)
            s.transitions.assign(spec->transitions, spec->transitions + spec->activities * spec->activities);
        *out = wrap(LoadedLog{generate_synthetic(s), {}});
    });
}

em_status em_log_generate_skewed(size_t activities, double dominant, size_t cases, size_t min_length,
                                 size_t max_length, uint64_t seed, em_log** out) {
    return guarded([&] {
        require(out, "out");
        const auto s = SyntheticSpec::skewed(activities, dominant, cases, min_length, max_length, seed);
        *out = wrap(LoadedLog{generate_synthetic(s), {}});
    });
}

void em_log_free(em_log* log) { delete log; }

size_t em_log_event_count(const em_log* log) { return log ? log->log->events().size() : 0; }
size_t em_log_activity_count(const em_log* log) { return log ? log->log->activity_count() : 0; }
size_t em_log_case_count(const em_log* log) { return log ? log->log->case_count() : 0; }

const char* em_log_activity_name(const em_log* log, size_t activity) {
    if (!log || activity >= log->log->activity_count()) return nullptr;
    return log->log->activities().name(static_cast<ActivityId>(activity)).c_str();
}

const char* em_log_case_name(const em_log* log, size_t case_index) {
    if (!log || case_index >= log->log->case_count()) return nullptr;
    return log->log->case_name(static_cast<CaseIndex>(case_index)).c_str();
}

em_status em_log_event(const em_log* log, size_t index, uint32_t* case_index, uint32_t* activity,
                       int64_t* timestamp_us) {
    return guarded([&] {
        require(log, "log");
        if (index >= log->log->events().size()) throw std::invalid_argument("event index out of range");
        const auto& e = log->log->events()[index];
        if (case_index) *case_index = e.case_index;
        if (activity) *activity = e.activity;
        if (timestamp_us) *timestamp_us = e.timestamp;
    });
}

size_t em_log_perturbation_count(const em_log* log) { return log ? log->perturbations : 0; }

em_status em_log_to_csv(const em_log* log, char** out) {
    return guarded([&] {
        require(log, "log");
        require(out, "out");
        *out = dup(to_canonical_csv(*log->log));
    });
}

em_config* em_config_create(void) {
    try {
        return new em_config;
    } catch (const std::bad_alloc&) {
        return nullptr;
    }
}

void em_config_free(em_config* config) { delete config; }

em_status em_config_set(em_config* config, const char* key, const char* value) {
    return guarded([&] {
        require(config, "config");
        require(key, "key");
        require(value, "value");
        apply_setting(config->config, key, value);
    });
}

em_status em_config_load_file(em_config* config, const char* path) {
    return guarded([&] {
        require(config, "config");
        require(path, "path");
        load_config_file(config->config, path);
    });
}

em_status em_simulate(const em_log* log, const em_config* config, em_result** out) {
    return guarded([&] {
        require(log, "log");
        require(out, "out");
        auto r = std::make_unique<em_result>();
        r->log = log->log;
        r->config = config_of(config);
        r->summary = summarize_run(*r->log, r->config);
        *out = r.release();
    });
}

void em_result_free(em_result* result) { delete result; }

em_status em_result_totals(const em_result* result, em_totals* out) {
    return guarded([&] {
        require(result, "result");
        require(out, "out");
        const auto& r = result->summary.result;
        const auto& t = r.totals;
        out->pred_query = t[MessageKind::pred_query];
        out->pred_response = t[MessageKind::pred_response];
        out->chosen_notify = t[MessageKind::chosen_notify];
        out->correction_notify = t[MessageKind::correction_notify];
        out->fm_request = t[MessageKind::fm_request];
        out->fm_response = t[MessageKind::fm_response];
        out->final_collect = r.final_collect_messages;
        out->dropped = r.dropped;
        out->end_timeout_us = r.end_timeout;
    });
}

int em_result_matches_oracle(const em_result* result) { return result && result->summary.equal ? 1 : 0; }

size_t em_result_event_count(const em_result* result) { return result ? result->summary.result.events.size() : 0; }

em_status em_result_event(const em_result* result, size_t index, em_event_metrics* out) {
    return guarded([&] {
        require(result, "result");
        require(out, "out");
        const auto& events = result->summary.result.events;
        if (index >= events.size()) throw std::invalid_argument("event index out of range");
        const auto& m = events[index];
        out->queried = m.queried;
        out->messages = m.messages;
        out->corrections = m.corrections;
        out->searches = m.searches;
        out->resolution = static_cast<em_resolution>(m.resolution);
        out->predecessor = m.predecessor ? static_cast<int64_t>(*m.predecessor) : -1;
    });
}

em_status em_result_fm(const em_result* result, em_fm** out) {
    return guarded([&] {
        require(result, "result");
        require(out, "out");
        *out = wrap(result->summary.result.fm, result->log->activities().names());
    });
}

em_status em_result_summary_csv(const em_result* result, char** out) {
    return guarded([&] {
        require(result, "result");
        require(out, "out");
        *out = dup(summary_csv(result->summary, *result->log, result->config));
    });
}

em_status em_result_trace_csv(const em_result* result, char** out) {
    return guarded([&] {
        require(result, "result");
        require(out, "out");
        std::ostringstream s;
        write_trace_csv(s, result->summary.result, *result->log);
        *out = dup(s.str());
    });
}

em_status em_result_trace_binary(const em_result* result, const char* path) {
    return guarded([&] {
        require(result, "result");
        require(path, "path");
        std::ofstream f(path, std::ios::binary);
        if (!f) throw IoError(std::string("cannot write ") + path);
        write_trace_binary(f, result->summary.result.trace);
        if (!f) throw IoError(std::string("write failed: ") + path);
    });
}

em_status em_fm_central(const em_log* log, em_fm** out) {
    return guarded([&] {
        require(log, "log");
        require(out, "out");
        *out = wrap(central_footprint(*log->log), log->log->activities().names());
    });
}

em_status em_fm_from_json(const char* json, em_fm** out) {
    return guarded([&] {
        require(json, "json");
        require(out, "out");
        std::vector<std::string> names;
        auto fm = from_json(json, &names);
        *out = wrap(std::move(fm), std::move(names));
    });
}

void em_fm_free(em_fm* fm) { delete fm; }

size_t em_fm_size(const em_fm* fm) { return fm ? fm->fm.size() : 0; }

uint64_t em_fm_count(const em_fm* fm, size_t row, size_t col) {
    if (!fm || row >= fm->fm.size() || col >= fm->fm.size()) return 0;
    return fm->fm.at(row, col);
}

int em_fm_is_start(const em_fm* fm, size_t activity) {
    return fm && fm->fm.starts().count(static_cast<ActivityId>(activity)) ? 1 : 0;
}

int em_fm_is_end(const em_fm* fm, size_t activity) {
    return fm && fm->fm.ends().count(static_cast<ActivityId>(activity)) ? 1 : 0;
}

int em_fm_equal(const em_fm* a, const em_fm* b) { return a && b && a->fm == b->fm ? 1 : 0; }

em_status em_fm_binarize(const em_fm* fm, em_fm** out) {
    return guarded([&] {
        require(fm, "fm");
        require(out, "out");
        *out = wrap(binarize(fm->fm), fm->names);
    });
}

em_status em_fm_fitness(const em_fm* current, const em_fm* reference, double* out) {
    return guarded([&] {
        require(current, "current");
        require(reference, "reference");
        require(out, "out");
        *out = fitness(current->fm, reference->fm);
    });
}

em_status em_fm_to_csv(const em_fm* fm, char** out) {
    return guarded([&] {
        require(fm, "fm");
        require(out, "out");
        *out = dup(to_csv(fm->fm, fm->names));
    });
}

em_status em_fm_to_json(const em_fm* fm, char** out) {
    return guarded([&] {
        require(fm, "fm");
        require(out, "out");
        *out = dup(to_json(fm->fm, fm->names));
    });
}

em_status em_fm_dfg_dot(const em_fm* fm, char** out) {
    return guarded([&] {
        require(fm, "fm");
        require(out, "out");
        *out = dup(to_dot(build_dfg(fm->fm), fm->names));
    });
}

em_status em_fm_dependency_csv(const em_fm* fm, char** out) {
    return guarded([&] {
        require(fm, "fm");
        require(out, "out");
        *out = dup(dependency_csv(dependency_measures(fm->fm), fm->names));
    });
}

em_status em_alpha(const em_fm* fm, em_net** out) {
    return guarded([&] {
        require(fm, "fm");
        require(out, "out");
        *out = new em_net{alpha(fm->fm, fm->names), fm->names};
    });
}

void em_net_free(em_net* net) { delete net; }

size_t em_net_place_count(const em_net* net) { return net ? net->net.places.size() : 0; }

const char* em_net_place_name(const em_net* net, size_t index) {
    if (!net || index >= net->net.places.size()) return nullptr;
    return net->net.places[index].name.c_str();
}

size_t em_net_transition_count(const em_net* net) { return net ? net->net.transitions.size() : 0; }
size_t em_net_arc_count(const em_net* net) { return net ? net->net.arcs.size() : 0; }

em_status em_net_to_dot(const em_net* net, char** out) {
    return guarded([&] {
        require(net, "net");
        require(out, "out");
        *out = dup(to_dot(net->net, net->names));
    });
}

em_status em_net_to_pnml(const em_net* net, char** out) {
    return guarded([&] {
        require(net, "net");
        require(out, "out");
        *out = dup(to_pnml(net->net, net->names));
    });
}

em_status em_exp_baselines(const em_log* log, const em_config* config, const uint64_t* seeds, size_t seed_count,
                           char** out) {
    return guarded([&] {
        require(log, "log");
        require(out, "out");
        std::vector<std::uint64_t> s;
        if (seeds && seed_count) {
            s.assign(seeds, seeds + seed_count);
        } else {
            s.push_back(config_of(config).seed);
        }
        *out = dup(baselines_csv(baselines(*log->log, config_of(config), s)));
    });
}

em_status em_exp_cdf(const em_log* log, const em_config* config, char** out) {
    return guarded([&] {
        require(log, "log");
        require(out, "out");
        SimConfig c = config_of(config);
        c.record_trace = false;
        const auto r = run(*log->log, c);
        *out = dup(cdf_csv(queried_cdf(queried_per_event(r), log->log->activity_count())));
    });
}

em_status em_exp_moving_average(const em_log* log, const em_config* config, const size_t* windows,
                                const size_t* steps, size_t count, char** out) {
    return guarded([&] {
        require(log, "log");
        require(windows, "windows");
        require(steps, "steps");
        require(out, "out");
        SimConfig c = config_of(config);
        c.record_trace = false;
        const auto q = queried_per_event(run(*log->log, c));
        std::string csv;
        for (size_t k = 0; k < count; ++k) {
            auto part = moving_average_csv(moving_average(q, windows[k], steps[k]), windows[k], steps[k],
                                           log->log->activity_count());
            if (k > 0) part.erase(0, part.find('\n') + 1);
            csv += part;
        }
        *out = dup(csv);
    });
}

em_status em_exp_stabilization(const em_log* log, const em_config* config, size_t window, size_t step,
                               double threshold, int64_t* out) {
    return guarded([&] {
        require(log, "log");
        require(out, "out");
        SimConfig c = config_of(config);
        c.record_trace = false;
        const auto q = queried_per_event(run(*log->log, c));
        const auto p = stabilization_point(moving_average(q, window, step), threshold);
        *out = p ? static_cast<int64_t>(*p) : -1;
    });
}

em_status em_exp_batch_sweep(const em_log* log, const em_config* config, const size_t* sizes, size_t count,
                             char** out) {
    return guarded([&] {
        require(log, "log");
        require(sizes, "sizes");
        require(out, "out");
        *out = dup(batch_sweep_csv(batch_sweep(*log->log, config_of(config), {sizes, sizes + count})));
    });
}

em_status em_exp_fitness_curve(const em_log* log, const em_config* config, size_t interval, char** out) {
    return guarded([&] {
        require(log, "log");
        require(out, "out");
        *out = dup(fitness_csv(fitness_curve(*log->log, config_of(config), interval)));
    });
}

em_status em_exp_activity_breakdown(const em_log* log, const em_config* config, char** out) {
    return guarded([&] {
        require(log, "log");
        require(out, "out");
        SimConfig c = config_of(config);
        c.record_trace = false;
        const auto r = run(*log->log, c);
        *out = dup(activity_csv(activity_breakdown(*log->log, r), log->log->case_count()));
    });
}

em_status em_exp_stats(const em_log* log, char** out) {
    return guarded([&] {
        require(log, "log");
        require(out, "out");
        *out = dup(stats_csv(dataset_stats(*log->log)));
    });
}

} // extern "C"
