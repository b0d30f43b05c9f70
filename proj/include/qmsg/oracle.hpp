#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "qmsg/learner.hpp"
#include "qmsg/protocol.hpp"

namespace qmsg {

// Rows x, x' are adjacent iff some column is defined for both with differing
// values. Any deterministic one-way protocol must give adjacent rows
// different messages.
struct ConflictGraph {
    std::size_t vertex_count = 0;
    std::vector<std::vector<bool>> adjacent;

    bool edge(std::size_t a, std::size_t b) const { return adjacent[a][b]; }
    std::size_t edge_count() const;
};

ConflictGraph distinct_rows(const PartialFunction& f);

struct OneWayCost {
    std::size_t messages = 0;  // chromatic number (or greedy bound above the cap)
    std::size_t bits = 0;      // ceil(log2(messages))
    bool exact = false;        // false when the greedy fallback was used
};

// Exact deterministic one-way cost of f via branch-and-bound coloring of the
// conflict graph, with a greedy clique lower bound. Above `limit` rows the
// result is a greedy upper bound flagged exact=false.
OneWayCost exact_one_way_cost(const PartialFunction& f, std::size_t limit = 20);

// Chromatic number of an explicit graph (exposed for oracle cross-checks).
std::size_t chromatic_number(const ConflictGraph& g);

struct ValidationResult {
    bool ok = true;
    std::optional<std::pair<std::size_t, std::size_t>> counterexample;  // first bad (x, y)
};

// Exhaustively replays the compiled protocol on every defined cell.
ValidationResult validate_compiled(const DeterministicProtocol& det, const PartialFunction& f);

// Number of distinct serialized messages the compiled protocol uses; the
// chromatic number lower-bounds this for a correct protocol.
std::size_t distinct_message_count(const DeterministicProtocol& det);

}  // namespace qmsg
