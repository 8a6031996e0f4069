#include "footprint.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "csv_util.hpp"
#include "errors.hpp"

namespace edgeminer {

Count MergedFM::total() const {
    return std::accumulate(counts_.begin(), counts_.end(), Count{0});
}

std::size_t MergedFM::nonzero_cells() const {
    return static_cast<std::size_t>(
        std::count_if(counts_.begin(), counts_.end(), [](Count c) { return c > 0; }));
}

MergedFM merge_columns(std::span<const PartialFM> parts) {
    const std::size_t n = parts.size();
    std::vector<int> seen(n, 0);
    std::vector<ActivityId> strays;
    for (const auto& p : parts) {
        if (p.owner < n) {
            ++seen[p.owner];
        } else {
            strays.push_back(p.owner);
        }
    }
    std::ostringstream problems;
    for (std::size_t a = 0; a < n; ++a) {
        if (seen[a] == 0) problems << " missing " << a << ";";
        if (seen[a] > 1) problems << " duplicate " << a << ";";
    }
    for (auto s : strays) problems << " out-of-range " << s << ";";
    if (!problems.str().empty()) {
        throw MergeError("cannot merge partial footprints:" + problems.str());
    }

    MergedFM fm(n);
    for (const auto& p : parts) {
        if (p.counts.size() != n) {
            throw MergeError("partial footprint of owner " + std::to_string(p.owner) + " has " +
                             std::to_string(p.counts.size()) + " entries, expected " +
                             std::to_string(n));
        }
        for (std::size_t row = 0; row < n; ++row) fm.at(row, p.owner) = p.counts[row];
        if (p.is_start) fm.starts().insert(p.owner);
        if (p.is_end) fm.ends().insert(p.owner);
    }
    return fm;
}

std::vector<PartialFM> split_columns(const MergedFM& fm) {
    const std::size_t n = fm.size();
    std::vector<PartialFM> parts(n);
    for (std::size_t col = 0; col < n; ++col) {
        auto& p = parts[col];
        p.owner = static_cast<ActivityId>(col);
        p.counts.resize(n);
        for (std::size_t row = 0; row < n; ++row) p.counts[row] = fm.at(row, col);
        p.is_start = fm.starts().count(p.owner) > 0;
        p.is_end = fm.ends().count(p.owner) > 0;
    }
    return parts;
}

MergedFM binarize(const MergedFM& fm) {
    MergedFM out = fm;
    for (std::size_t i = 0; i < fm.size(); ++i)
        for (std::size_t j = 0; j < fm.size(); ++j) out.at(i, j) = fm.at(i, j) > 0 ? 1 : 0;
    return out;
}

double fitness(const MergedFM& current, const MergedFM& reference) {
    if (current.size() != reference.size()) {
        throw std::invalid_argument("fitness: dimension mismatch (" +
                                    std::to_string(current.size()) + " vs " +
                                    std::to_string(reference.size()) + ")");
    }
    std::size_t wanted = 0;
    std::size_t hit = 0;
    const auto& cur = current.raw();
    const auto& ref = reference.raw();
    for (std::size_t k = 0; k < ref.size(); ++k) {
        if (ref[k] == 0) continue;
        ++wanted;
        if (cur[k] > 0) ++hit;
    }
    if (wanted == 0) return 1.0;
    return static_cast<double>(hit) / static_cast<double>(wanted);
}

namespace {

void check_names(const MergedFM& fm, std::span<const std::string> names) {
    if (names.size() != fm.size()) {
        throw std::invalid_argument("footprint export: " + std::to_string(names.size()) +
                                    " names for " + std::to_string(fm.size()) + " activities");
    }
}

} // namespace

std::string to_csv(const MergedFM& fm, std::span<const std::string> names) {
    check_names(fm, names);
    std::ostringstream out;
    out << "predecessor";
    for (const auto& name : names) out << ',' << csv_escape(name);
    out << '\n';
    for (std::size_t i = 0; i < fm.size(); ++i) {
        out << csv_escape(names[i]);
        for (std::size_t j = 0; j < fm.size(); ++j) out << ',' << fm.at(i, j);
        out << '\n';
    }
    return out.str();
}

std::string to_json(const MergedFM& fm, std::span<const std::string> names) {
    check_names(fm, names);
    nlohmann::ordered_json doc;
    doc["n"] = fm.size();
    doc["names"] = std::vector<std::string>(names.begin(), names.end());
    auto rows = nlohmann::json::array();
    for (std::size_t i = 0; i < fm.size(); ++i) {
        std::vector<Count> row(fm.size());
        for (std::size_t j = 0; j < fm.size(); ++j) row[j] = fm.at(i, j);
        rows.push_back(std::move(row));
    }
    doc["counts"] = std::move(rows);
    auto name_set = [&](const std::set<ActivityId>& ids) {
        std::vector<std::string> out;
        for (auto id : ids) out.push_back(names[id]);
        return out;
    };
    doc["starts"] = name_set(fm.starts());
    doc["ends"] = name_set(fm.ends());
    return doc.dump();
}

MergedFM from_json(const std::string& text, std::vector<std::string>* names_out) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("footprint json: ") + e.what());
    }
    try {
        const auto n = doc.at("n").get<std::size_t>();
        const auto names = doc.at("names").get<std::vector<std::string>>();
        const auto& rows = doc.at("counts");
        if (names.size() != n || rows.size() != n) {
            throw ValidationError("footprint json: n does not match names/counts");
        }
        MergedFM fm(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto row = rows[i].get<std::vector<Count>>();
            if (row.size() != n) throw ValidationError("footprint json: ragged counts row");
            for (std::size_t j = 0; j < n; ++j) fm.at(i, j) = row[j];
        }
        auto lookup = [&](const std::string& name) {
            auto it = std::find(names.begin(), names.end(), name);
            if (it == names.end()) throw ValidationError("footprint json: unknown activity " + name);
            return static_cast<ActivityId>(it - names.begin());
        };
        for (const auto& s : doc.at("starts").get<std::vector<std::string>>())
            fm.starts().insert(lookup(s));
        for (const auto& e : doc.at("ends").get<std::vector<std::string>>())
            fm.ends().insert(lookup(e));
        if (names_out) *names_out = names;
        return fm;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("footprint json: ") + e.what());
    }
}

} // namespace edgeminer
