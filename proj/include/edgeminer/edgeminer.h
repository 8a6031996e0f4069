#ifndef EDGEMINER_EDGEMINER_H
#define EDGEMINER_EDGEMINER_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(EDGEMINER_BUILDING)
#    define EM_API __declspec(dllexport)
#  else
#    define EM_API __declspec(dllimport)
#  endif
#else
#  define EM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct em_log em_log;
typedef struct em_config em_config;
typedef struct em_result em_result;
typedef struct em_fm em_fm;
typedef struct em_net em_net;

typedef enum em_status {
    EM_OK = 0,
    EM_ERR_ARGUMENT = 1,
    EM_ERR_IO = 2,
    EM_ERR_PARSE = 3,
    EM_ERR_VALIDATION = 4,
    EM_ERR_MERGE = 5,
    EM_ERR_PROTOCOL = 6,
    EM_ERR_INVARIANT = 7,
    EM_ERR_SIMULATION = 8,
    EM_ERR_MINING = 9,
    EM_ERR_INTERNAL = 10
} em_status;

/* Message of the last failed call on this thread; "" after a success. */
EM_API const char* em_last_error(void);
EM_API const char* em_status_name(em_status status);
EM_API const char* em_version(void);
/* Frees strings returned through char** out parameters. */
EM_API void em_string_free(char* s);

/* ---- event logs ---- */

typedef struct em_read_options {
    const char* format;            /* "xes", "csv" or NULL to guess from the file name */
    const char* case_column;       /* CSV only; NULL keeps "case_id" */
    const char* activity_column;   /* NULL keeps "activity" */
    const char* timestamp_column;  /* NULL keeps "timestamp_us" */
    int tiebreak;                  /* nonzero: perturb equal same-case timestamps instead of failing */
} em_read_options;

EM_API em_status em_log_read_file(const char* path, const em_read_options* options, em_log** out);
/* options->format is required here. */
EM_API em_status em_log_read_buffer(const char* data, size_t size, const em_read_options* options, em_log** out);

/* Uniform first-order Markov log; transitions may be NULL for all-equal weights. */
typedef struct em_synthetic_spec {
    size_t activities;
    size_t cases;
    size_t min_length;
    size_t max_length;
    const double* transitions; /* activities * activities, row-major, or NULL */
    uint64_t seed;
} em_synthetic_spec;

EM_API em_status em_log_generate(const em_synthetic_spec* spec, em_log** out);
/* Activity i continues to i+1 (mod n) with probability dominant. */
EM_API em_status em_log_generate_skewed(size_t activities, double dominant, size_t cases, size_t min_length,
                                        size_t max_length, uint64_t seed, em_log** out);
EM_API void em_log_free(em_log* log);

EM_API size_t em_log_event_count(const em_log* log);
EM_API size_t em_log_activity_count(const em_log* log);
EM_API size_t em_log_case_count(const em_log* log);
/* Owned by the log. NULL when out of range. */
EM_API const char* em_log_activity_name(const em_log* log, size_t activity);
EM_API const char* em_log_case_name(const em_log* log, size_t case_index);
EM_API em_status em_log_event(const em_log* log, size_t index, uint32_t* case_index, uint32_t* activity,
                              int64_t* timestamp_us);
/* Timestamps changed by the tiebreak policy while reading. */
EM_API size_t em_log_perturbation_count(const em_log* log);
/* case_id,activity,timestamp_us */
EM_API em_status em_log_to_csv(const em_log* log, char** out);

/* ---- simulation config ---- */

EM_API em_config* em_config_create(void);
EM_API void em_config_free(em_config* config);
/* Keys: strategy, batch_size, latency, window, window_events, end_timeout,
   seed, fifo, record_trace, snapshot_interval, max_searches. */
EM_API em_status em_config_set(em_config* config, const char* key, const char* value);
EM_API em_status em_config_load_file(em_config* config, const char* path);

/* ---- simulation ---- */

EM_API em_status em_simulate(const em_log* log, const em_config* config, em_result** out);
EM_API void em_result_free(em_result* result);

typedef struct em_totals {
    uint64_t pred_query;
    uint64_t pred_response;
    uint64_t chosen_notify;
    uint64_t correction_notify;
    uint64_t fm_request;
    uint64_t fm_response;
    uint64_t final_collect;   /* messages of the closing collection */
    uint64_t dropped;         /* stale notifications ignored by nodes */
    int64_t end_timeout_us;
} em_totals;

typedef enum em_resolution {
    EM_UNRESOLVED = 0,
    EM_SELF_LOOP = 1,
    EM_NETWORK = 2,
    EM_START = 3
} em_resolution;

typedef struct em_event_metrics {
    double queried;        /* nodes queried, batched queries split evenly */
    double messages;       /* Phase-1 messages charged to the event */
    uint32_t corrections;
    uint32_t searches;
    em_resolution resolution;
    int64_t predecessor;   /* activity id, -1 for none */
} em_event_metrics;

EM_API em_status em_result_totals(const em_result* result, em_totals* out);
/* 1 when the collected footprint equals the centralized one. */
EM_API int em_result_matches_oracle(const em_result* result);
EM_API size_t em_result_event_count(const em_result* result);
EM_API em_status em_result_event(const em_result* result, size_t index, em_event_metrics* out);
/* Copy of the final merged footprint. */
EM_API em_status em_result_fm(const em_result* result, em_fm** out);
EM_API em_status em_result_summary_csv(const em_result* result, char** out);
/* time_us,src,dst,variant,case_id */
EM_API em_status em_result_trace_csv(const em_result* result, char** out);
EM_API em_status em_result_trace_binary(const em_result* result, const char* path);

/* ---- footprints ---- */

EM_API em_status em_fm_central(const em_log* log, em_fm** out);
EM_API em_status em_fm_from_json(const char* json, em_fm** out);
EM_API void em_fm_free(em_fm* fm);
EM_API size_t em_fm_size(const em_fm* fm);
EM_API uint64_t em_fm_count(const em_fm* fm, size_t row, size_t col);
EM_API int em_fm_is_start(const em_fm* fm, size_t activity);
EM_API int em_fm_is_end(const em_fm* fm, size_t activity);
EM_API int em_fm_equal(const em_fm* a, const em_fm* b);
EM_API em_status em_fm_binarize(const em_fm* fm, em_fm** out);
EM_API em_status em_fm_fitness(const em_fm* current, const em_fm* reference, double* out);
EM_API em_status em_fm_to_csv(const em_fm* fm, char** out);
EM_API em_status em_fm_to_json(const em_fm* fm, char** out);
EM_API em_status em_fm_dfg_dot(const em_fm* fm, char** out);
EM_API em_status em_fm_dependency_csv(const em_fm* fm, char** out);

/* ---- Alpha miner ---- */

EM_API em_status em_alpha(const em_fm* fm, em_net** out);
EM_API void em_net_free(em_net* net);
EM_API size_t em_net_place_count(const em_net* net);
EM_API const char* em_net_place_name(const em_net* net, size_t index);
EM_API size_t em_net_transition_count(const em_net* net);
EM_API size_t em_net_arc_count(const em_net* net);
EM_API em_status em_net_to_dot(const em_net* net, char** out);
EM_API em_status em_net_to_pnml(const em_net* net, char** out);

/* ---- experiments; each returns CSV with a header row ---- */

EM_API em_status em_exp_baselines(const em_log* log, const em_config* config, const uint64_t* seeds, size_t seed_count,
                                  char** out);
EM_API em_status em_exp_cdf(const em_log* log, const em_config* config, char** out);
EM_API em_status em_exp_moving_average(const em_log* log, const em_config* config, const size_t* windows,
                                       const size_t* steps, size_t count, char** out);
/* First event count after which the slope stays below threshold nodes per
   100 events; -1 if it never does. */
EM_API em_status em_exp_stabilization(const em_log* log, const em_config* config, size_t window, size_t step,
                                      double threshold, int64_t* out);
EM_API em_status em_exp_batch_sweep(const em_log* log, const em_config* config, const size_t* sizes, size_t count,
                                    char** out);
EM_API em_status em_exp_fitness_curve(const em_log* log, const em_config* config, size_t interval, char** out);
EM_API em_status em_exp_activity_breakdown(const em_log* log, const em_config* config, char** out);
EM_API em_status em_exp_stats(const em_log* log, char** out);

#ifdef __cplusplus
}
#endif

#endif
