#pragma once

// Reference computations for tests. They work on plain names and strings and
// do not use the library's log model, so agreement is independent evidence.

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "event_model.hpp"

namespace oracle {

struct Row {
    std::string case_id;
    std::string activity;
    std::int64_t ts;
};

struct Footprint {
    std::map<std::pair<std::string, std::string>, std::uint64_t> counts;  // nonzero only
    std::set<std::string> starts;
    std::set<std::string> ends;

    bool operator==(const Footprint&) const = default;
};

inline Footprint footprint(const std::vector<Row>& rows) {
    std::map<std::string, std::vector<std::pair<std::int64_t, std::string>>> traces;
    for (const auto& r : rows) traces[r.case_id].emplace_back(r.ts, r.activity);
    Footprint fp;
    for (auto& [id, t] : traces) {
        std::sort(t.begin(), t.end());
        fp.starts.insert(t.front().second);
        fp.ends.insert(t.back().second);
        for (std::size_t k = 1; k < t.size(); ++k) ++fp.counts[{t[k - 1].second, t[k].second}];
    }
    return fp;
}

// Reads a MergedFM back into name space.
inline Footprint view(const edgeminer::MergedFM& fm, const std::vector<std::string>& names) {
    Footprint fp;
    for (std::size_t i = 0; i < fm.size(); ++i)
        for (std::size_t j = 0; j < fm.size(); ++j)
            if (fm.at(i, j)) fp.counts[{names[i], names[j]}] = fm.at(i, j);
    for (auto s : fm.starts()) fp.starts.insert(names[s]);
    for (auto e : fm.ends()) fp.ends.insert(names[e]);
    return fp;
}

inline std::vector<Row> rows_of(const edgeminer::EventLog& log) {
    std::vector<Row> rows;
    for (const auto& e : log.events())
        rows.push_back({log.case_name(e.case_index), log.activities().name(e.activity), e.timestamp});
    return rows;
}

using NameSet = std::set<std::string>;
using PairSet = std::set<std::pair<NameSet, NameSet>>;

// Exhaustive Alpha place pairs: every (A, B) over the occurring activities
// satisfying the place predicate, then the componentwise-maximal ones.
inline PairSet alpha_pairs(const Footprint& fp, const std::vector<std::string>& activities) {
    auto follows = [&](const std::string& a, const std::string& b) { return fp.counts.count({a, b}) > 0; };
    auto causal = [&](const std::string& a, const std::string& b) { return follows(a, b) && !follows(b, a); };
    auto unrelated = [&](const std::string& a, const std::string& b) { return !follows(a, b) && !follows(b, a); };
    const std::size_t n = activities.size();
    auto subset = [&](std::uint32_t mask) {
        NameSet s;
        for (std::size_t i = 0; i < n; ++i)
            if (mask >> i & 1) s.insert(activities[i]);
        return s;
    };
    auto internal_ok = [&](const NameSet& s) {
        for (const auto& x : s)
            for (const auto& y : s)
                if (!unrelated(x, y)) return false;
        return true;
    };
    std::vector<std::pair<NameSet, NameSet>> x_l;
    for (std::uint32_t am = 1; am < (1u << n); ++am) {
        const auto a = subset(am);
        if (!internal_ok(a)) continue;
        for (std::uint32_t bm = 1; bm < (1u << n); ++bm) {
            const auto b = subset(bm);
            if (!internal_ok(b)) continue;
            bool ok = true;
            for (const auto& x : a)
                for (const auto& y : b) ok = ok && causal(x, y);
            if (ok) x_l.emplace_back(a, b);
        }
    }
    PairSet y_l;
    for (const auto& p : x_l) {
        bool maximal = true;
        for (const auto& q : x_l) {
            if (p == q) continue;
            if (std::includes(q.first.begin(), q.first.end(), p.first.begin(), p.first.end()) &&
                std::includes(q.second.begin(), q.second.end(), p.second.begin(), p.second.end())) {
                maximal = false;
                break;
            }
        }
        if (maximal) y_l.insert(p);
    }
    return y_l;
}

} // namespace oracle
