#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "csv_util.hpp"

namespace edgeminer {

namespace {

struct MeanSd {
    double mean = 0;
    double sd = 0;  // sample standard deviation
};

MeanSd mean_sd(const std::vector<double>& v) {
    MeanSd r;
    if (v.empty()) return r;
    r.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0;
        for (double x : v) ss += (x - r.mean) * (x - r.mean);
        r.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    return r;
}

double others(std::size_t n) { return n > 1 ? static_cast<double>(n - 1) : 1.0; }

std::ostringstream csv_stream() {
    std::ostringstream out;
    out << std::setprecision(6) << std::fixed;
    return out;
}

} // namespace

std::vector<double> queried_per_event(const SimResult& result) {
    std::vector<double> q;
    q.reserve(result.events.size());
    for (const auto& m : result.events) q.push_back(m.queried);
    return q;
}

RunSummary summarize_run(const EventLog& log, const SimConfig& config) {
    RunSummary s;
    s.result = run(log, config);
    s.oracle = central_footprint(log);
    s.equal = s.result.fm == s.oracle;
    double messages = 0;
    double queried = 0;
    for (const auto& m : s.result.events) {
        queried += m.queried;
        if (m.resolution == Resolution::network) {
            ++s.network_events;
            messages += m.messages;
        }
    }
    if (s.network_events) s.mean_messages_network = messages / static_cast<double>(s.network_events);
    if (!s.result.events.empty()) s.mean_queried = queried / static_cast<double>(s.result.events.size());
    return s;
}

std::string summary_csv(const RunSummary& s, const EventLog& log, const SimConfig& config) {
    const auto& t = s.result.totals;
    std::size_t starts = 0;
    std::size_t self_loops = 0;
    std::uint64_t corrections = 0;
    for (const auto& m : s.result.events) {
        starts += m.resolution == Resolution::start;
        self_loops += m.resolution == Resolution::self_loop;
        corrections += m.corrections;
    }
    auto out = csv_stream();
    out << "key,value\n";
    out << "events," << log.events().size() << '\n';
    out << "activities," << log.activity_count() << '\n';
    out << "cases," << log.case_count() << '\n';
    out << "strategy," << to_string(config.strategy) << '\n';
    out << "batch_size," << config.batch_size << '\n';
    out << "latency," << config.latency.to_string() << '\n';
    out << "seed," << config.seed << '\n';
    out << "end_timeout_us," << s.result.end_timeout << '\n';
    out << "fm_equals_oracle," << (s.equal ? "true" : "false") << '\n';
    out << "messages_phase1," << t.phase1() << '\n';
    out << "pred_query," << t[MessageKind::pred_query] << '\n';
    out << "pred_response," << t[MessageKind::pred_response] << '\n';
    out << "chosen_notify," << t[MessageKind::chosen_notify] << '\n';
    out << "correction_notify," << t[MessageKind::correction_notify] << '\n';
    out << "messages_phase2," << t.phase2() << '\n';
    out << "final_collect_messages," << s.result.final_collect_messages << '\n';
    out << "start_events," << starts << '\n';
    out << "self_loop_events," << self_loops << '\n';
    out << "network_events," << s.network_events << '\n';
    out << "mean_messages_per_network_event," << s.mean_messages_network << '\n';
    out << "mean_queried_nodes_per_event," << s.mean_queried << '\n';
    out << "corrections_received," << corrections << '\n';
    out << "dropped_notifications," << s.result.dropped << '\n';
    return out.str();
}

std::vector<BaselineRow> baselines(const EventLog& log, const SimConfig& base, const std::vector<std::uint64_t>& seeds) {
    if (seeds.empty()) throw std::invalid_argument("baselines: no seeds");
    std::vector<BaselineRow> rows;
    for (auto strategy : {Strategy::query_all, Strategy::mfp, Strategy::oracle}) {
        std::vector<double> pooled;
        for (auto seed : seeds) {
            SimConfig c = base;
            c.strategy = strategy;
            c.seed = seed;
            c.record_trace = false;
            c.snapshot_interval = 0;
            const auto q = queried_per_event(run(log, c));
            pooled.insert(pooled.end(), q.begin(), q.end());
        }
        const auto ms = mean_sd(pooled);
        BaselineRow row;
        row.strategy = strategy;
        row.mean = ms.mean;
        row.stderr_ = pooled.empty() ? 0 : ms.sd / std::sqrt(static_cast<double>(pooled.size()));
        row.runs = seeds.size();
        rows.push_back(row);
    }
    const double reference = rows.front().mean;
    for (auto& row : rows) row.reduction = reference > 0 ? 100.0 * (1.0 - row.mean / reference) : 0.0;
    return rows;
}

std::string baselines_csv(const std::vector<BaselineRow>& rows) {
    auto out = csv_stream();
    out << "strategy,mean_queried_nodes_per_event,stderr,reduction_pct_vs_query_all,runs\n";
    for (const auto& r : rows)
        out << to_string(r.strategy) << ',' << r.mean << ',' << r.stderr_ << ',' << r.reduction << ',' << r.runs << '\n';
    return out.str();
}

std::vector<CdfPoint> queried_cdf(const std::vector<double>& queried, std::size_t activity_count) {
    std::vector<double> x;
    x.reserve(queried.size());
    const double scale = others(activity_count);
    for (double q : queried) x.push_back(q / scale);
    std::sort(x.begin(), x.end());
    std::vector<CdfPoint> points;
    const double total = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        // Values come from sums of 1/k shares; merge those equal up to rounding.
        if (i + 1 < x.size() && x[i + 1] - x[i] <= 1e-9) continue;
        points.push_back({x[i], static_cast<double>(i + 1) / total});
    }
    if (!points.empty()) points.back().fraction_events = 1.0;
    return points;
}

std::string cdf_csv(const std::vector<CdfPoint>& points) {
    auto out = csv_stream();
    out << "fraction_of_nodes_queried,fraction_of_events\n";
    for (const auto& p : points) out << p.fraction_nodes << ',' << p.fraction_events << '\n';
    return out.str();
}

std::vector<AveragePoint> moving_average(const std::vector<double>& values, std::size_t window, std::size_t step) {
    if (window == 0 || step == 0) throw std::invalid_argument("moving average: window and step must be positive");
    if (window > values.size())
        throw std::invalid_argument("moving average: window " + std::to_string(window) + " exceeds " +
                                    std::to_string(values.size()) + " events");
    std::vector<double> prefix(values.size() + 1, 0.0);
    for (std::size_t i = 0; i < values.size(); ++i) prefix[i + 1] = prefix[i] + values[i];
    std::vector<AveragePoint> series;
    for (std::size_t end = window; end <= values.size(); end += step)
        series.push_back({end, (prefix[end] - prefix[end - window]) / static_cast<double>(window)});
    return series;
}

std::optional<std::size_t> stabilization_point(const std::vector<AveragePoint>& series, double threshold) {
    if (series.empty()) return std::nullopt;
    std::size_t settled = 0;  // index of the first point of the trailing calm stretch
    for (std::size_t k = 1; k < series.size(); ++k) {
        const double span = static_cast<double>(series[k].events - series[k - 1].events);
        const double slope = std::abs(series[k].mean - series[k - 1].mean) / span * 100.0;
        if (slope >= threshold) settled = k;
    }
    if (settled + 1 == series.size() && series.size() > 1) return std::nullopt;
    return series[settled].events;
}

std::string moving_average_csv(const std::vector<AveragePoint>& series, std::size_t window, std::size_t step,
                               std::size_t activity_count) {
    auto out = csv_stream();
    out << "window,step,events,mean_queried_nodes,query_all_reference\n";
    const auto reference = activity_count > 0 ? activity_count - 1 : 0;
    for (const auto& p : series) out << window << ',' << step << ',' << p.events << ',' << p.mean << ',' << reference << '\n';
    return out.str();
}

std::vector<BatchPoint> batch_sweep(const EventLog& log, const SimConfig& base, const std::vector<std::size_t>& sizes) {
    std::vector<BatchPoint> points;
    for (auto size : sizes) {
        SimConfig c = base;
        c.batch_size = size;
        c.record_trace = false;
        c.snapshot_interval = 0;
        const auto r = run(log, c);
        BatchPoint p;
        p.batch_size = size;
        double queried = 0;
        double messages = 0;
        for (const auto& m : r.events) {
            queried += m.queried;
            messages += m.messages;
        }
        const double events = r.events.empty() ? 1.0 : static_cast<double>(r.events.size());
        p.mean_queried = queried / events;
        p.normalized = p.mean_queried / others(log.activity_count());
        p.messages_per_event = messages / events;
        points.push_back(p);
    }
    return points;
}

std::string batch_sweep_csv(const std::vector<BatchPoint>& points) {
    auto out = csv_stream();
    out << "batch_size,mean_queried_nodes_per_event,normalized_by_n_minus_1,messages_per_event\n";
    for (const auto& p : points)
        out << p.batch_size << ',' << p.mean_queried << ',' << p.normalized << ',' << p.messages_per_event << '\n';
    return out.str();
}

std::vector<FitnessPoint> fitness_curve(const EventLog& log, const SimConfig& base, std::size_t interval,
                                        const FitnessMetric& metric) {
    if (interval == 0) throw std::invalid_argument("fitness curve: interval must be positive");
    SimConfig c = base;
    c.snapshot_interval = interval;
    c.record_trace = false;
    const auto r = run(log, c);
    const double total = log.events().empty() ? 1.0 : static_cast<double>(log.events().size());
    std::vector<FitnessPoint> points;
    for (const auto& s : r.snapshots)
        points.push_back({s.events_processed, static_cast<double>(s.events_processed) / total, metric(s.fm, r.fm)});
    points.push_back({log.events().size(), 1.0, metric(r.fm, r.fm)});
    return points;
}

std::string fitness_csv(const std::vector<FitnessPoint>& points) {
    auto out = csv_stream();
    out << "events_processed,fraction_of_events,fitness\n";
    for (const auto& p : points) out << p.events << ',' << p.fraction << ',' << p.fitness << '\n';
    return out.str();
}

std::vector<ActivityRow> activity_breakdown(const EventLog& log, const SimResult& result) {
    const std::size_t n = log.activity_count();
    std::vector<ActivityRow> rows(n);
    std::vector<double> queried(n, 0.0);
    for (std::size_t i = 0; i < log.events().size(); ++i) {
        const auto a = log.events()[i].activity;
        ++rows[a].occurrences;
        queried[a] += result.events[i].queried;
    }
    for (CaseIndex c = 0; c < log.case_count(); ++c) {
        auto trace = log.trace(c);
        if (!trace.empty()) ++rows[log.events()[trace.front()].activity].trace_starts;
    }
    for (ActivityId a = 0; a < n; ++a) {
        rows[a].activity = log.activities().name(a);
        if (rows[a].occurrences) rows[a].mean_queried = queried[a] / static_cast<double>(rows[a].occurrences);
        rows[a].start = result.fm.starts().count(a) > 0;
    }
    std::sort(rows.begin(), rows.end(), [](const ActivityRow& x, const ActivityRow& y) { return x.activity < y.activity; });
    return rows;
}

std::string activity_csv(const std::vector<ActivityRow>& rows, std::size_t case_count) {
    auto out = csv_stream();
    out << "activity,occurrences,mean_queried_nodes,trace_starts,start_share_of_cases,start_activity\n";
    const double cases = case_count ? static_cast<double>(case_count) : 1.0;
    for (const auto& r : rows) {
        out << csv_escape(r.activity) << ',' << r.occurrences << ',' << r.mean_queried << ',' << r.trace_starts << ','
            << static_cast<double>(r.trace_starts) / cases << ',' << (r.start ? "true" : "false") << '\n';
    }
    return out.str();
}

DatasetStats dataset_stats(const EventLog& log) {
    DatasetStats s;
    s.events = log.events().size();
    s.activities = log.activity_count();
    s.cases = log.case_count();
    const auto fm = central_footprint(log);
    s.start_activities = fm.starts().size();
    if (s.cases) s.mean_length = static_cast<double>(s.events) / static_cast<double>(s.cases);
    std::vector<double> preds;
    std::vector<double> ratios;
    for (ActivityId b = 0; b < s.activities; ++b) {
        s.self_loops += fm.at(b, b);
        Count total = 0;
        Count top = 0;
        std::size_t distinct = 0;
        for (ActivityId a = 0; a < s.activities; ++a) {
            const auto c = fm.at(a, b);
            total += c;
            top = std::max(top, c);
            distinct += c > 0;
        }
        preds.push_back(static_cast<double>(distinct));
        if (total) ratios.push_back(static_cast<double>(top) / static_cast<double>(total));
    }
    const auto p = mean_sd(preds);
    const auto r = mean_sd(ratios);
    s.mean_predecessors = p.mean;
    s.sd_predecessors = p.sd;
    s.mean_mfp_ratio = r.mean;
    s.sd_mfp_ratio = r.sd;
    return s;
}

std::string stats_csv(const DatasetStats& s) {
    auto out = csv_stream();
    out << "events,activities,start_activities,cases,mean_trace_length,self_loops,mean_predecessors,sd_predecessors,"
           "mean_mfp_ratio,sd_mfp_ratio\n";
    out << s.events << ',' << s.activities << ',' << s.start_activities << ',' << s.cases << ',' << s.mean_length << ','
        << s.self_loops << ',' << s.mean_predecessors << ',' << s.sd_predecessors << ',' << s.mean_mfp_ratio << ','
        << s.sd_mfp_ratio << '\n';
    return out.str();
}

} // namespace edgeminer
