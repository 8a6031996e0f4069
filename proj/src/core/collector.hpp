#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "footprint.hpp"
#include "messages.hpp"

namespace edgeminer {

// Phase 2 actor: asks every activity node for its partial footprint and
// concatenates the answers once all n have arrived.
class Collector {
public:
    Collector(NodeId self, std::size_t activity_count) : self_(self), n_(activity_count) {}

    NodeId id() const noexcept { return self_; }

    // Appends n FMRequest messages; returns the request id.
    std::uint64_t request(std::vector<Message>& out);

    // Returns the merged footprint when this response completes its request.
    std::optional<MergedFM> on_response(NodeId from, const FMResponse& r);

    bool pending(std::uint64_t request) const { return open_.count(request) > 0; }
    // Throws MergeError naming the nodes that never answered.
    void fail_if_incomplete(std::uint64_t request) const;

private:
    NodeId self_;
    std::size_t n_;
    std::uint64_t next_ = 0;
    std::map<std::uint64_t, std::map<NodeId, PartialFM>> open_;
};

struct DfgEdge {
    // Activities are 0..n-1; source is n, sink is n+1.
    std::uint32_t from = 0;
    std::uint32_t to = 0;
    Count weight = 0;

    bool operator==(const DfgEdge&) const = default;
    auto operator<=>(const DfgEdge&) const = default;
};

struct DirectlyFollowsGraph {
    std::size_t activities = 0;
    std::vector<DfgEdge> edges;  // sorted

    std::uint32_t source() const noexcept { return static_cast<std::uint32_t>(activities); }
    std::uint32_t sink() const noexcept { return static_cast<std::uint32_t>(activities + 1); }
    bool has_edge(std::uint32_t from, std::uint32_t to) const;
};

DirectlyFollowsGraph build_dfg(const MergedFM& fm);
std::string to_dot(const DirectlyFollowsGraph& dfg, std::span<const std::string> names);

// Heuristics-miner dependency: (|a>b| - |b>a|) / (|a>b| + |b>a| + 1) off the
// diagonal and |a>a| / (|a>a| + 1) on it. Row-major n x n.
std::vector<double> dependency_measures(const MergedFM& fm);
std::string dependency_csv(const std::vector<double>& dependency, std::span<const std::string> names);

} // namespace edgeminer
