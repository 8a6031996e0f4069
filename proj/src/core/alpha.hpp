#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "footprint.hpp"

namespace edgeminer {

using ActivitySet = std::vector<ActivityId>;  // sorted, unique

struct Place {
    std::string name;
    ActivitySet inputs;   // A: transitions feeding the place
    ActivitySet outputs;  // B: transitions consuming from it
};

struct Arc {
    enum class Direction { place_to_transition, transition_to_place };
    Direction direction;
    std::size_t place;  // index into PetriNet::places
    ActivityId transition;

    bool operator==(const Arc&) const = default;
    auto operator<=>(const Arc&) const = default;
};

struct PetriNet {
    ActivitySet transitions;  // T_L
    // places[0] is i_L, places.back() is o_L, the rest are p_(A,B) in (A, B) order.
    std::vector<Place> places;
    std::vector<Arc> arcs;  // sorted
    std::vector<std::pair<ActivitySet, ActivitySet>> maximal_pairs;  // Y_L, sorted

    std::size_t source() const noexcept { return 0; }
    std::size_t sink() const noexcept { return places.size() - 1; }
};

struct AlphaOptions {
    std::size_t max_pairs = 1'000'000;  // abort beyond this many maximal pairs
};

// Runs the Alpha algorithm on the binary relations of fm. Throws MiningError
// if no activity occurs or the pair enumeration exceeds the cap.
PetriNet alpha(const MergedFM& fm, std::span<const std::string> names, const AlphaOptions& options = {});

std::string to_dot(const PetriNet& net, std::span<const std::string> names);
std::string to_pnml(const PetriNet& net, std::span<const std::string> names);

} // namespace edgeminer
