#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace edgeminer {

using ActivityId = std::uint32_t;
using Timestamp = std::int64_t;
using Count = std::uint64_t;

// One node's predecessor column: counts[l] is how often activity l directly
// preceded the owner.
struct PartialFM {
    ActivityId owner = 0;
    std::vector<Count> counts;
    bool is_start = false;
    bool is_end = false;

    bool operator==(const PartialFM&) const = default;
};

// n x n directly-follows counts; at(i, j) is how often j directly followed i.
class MergedFM {
public:
    MergedFM() = default;
    explicit MergedFM(std::size_t n) : n_(n), counts_(n * n, 0) {}

    std::size_t size() const noexcept { return n_; }

    Count at(std::size_t row, std::size_t col) const { return counts_[row * n_ + col]; }
    Count& at(std::size_t row, std::size_t col) { return counts_[row * n_ + col]; }

    const std::vector<Count>& raw() const noexcept { return counts_; }

    std::set<ActivityId>& starts() noexcept { return starts_; }
    const std::set<ActivityId>& starts() const noexcept { return starts_; }
    std::set<ActivityId>& ends() noexcept { return ends_; }
    const std::set<ActivityId>& ends() const noexcept { return ends_; }

    Count total() const;
    std::size_t nonzero_cells() const;

    bool operator==(const MergedFM&) const = default;

private:
    std::size_t n_ = 0;
    std::vector<Count> counts_;
    std::set<ActivityId> starts_;
    std::set<ActivityId> ends_;
};

// Concatenate one column per activity. Throws MergeError naming missing or
// duplicated owners.
MergedFM merge_columns(std::span<const PartialFM> parts);

// Column projection; merge_columns(split_columns(m)) == m.
std::vector<PartialFM> split_columns(const MergedFM& fm);

MergedFM binarize(const MergedFM& fm);

using FitnessMetric = std::function<double(const MergedFM& current, const MergedFM& reference)>;

// Share of the reference's nonzero cells that are also nonzero in current.
// 1.0 for an all-zero reference. Throws std::invalid_argument on size mismatch.
double fitness(const MergedFM& current, const MergedFM& reference);

// CSV: header row of activity names, one row per predecessor activity.
std::string to_csv(const MergedFM& fm, std::span<const std::string> names);
// {"n":..,"names":[..],"counts":[[..]..],"starts":[names],"ends":[names]}
std::string to_json(const MergedFM& fm, std::span<const std::string> names);
MergedFM from_json(const std::string& text, std::vector<std::string>* names = nullptr);

} // namespace edgeminer
