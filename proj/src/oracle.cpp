#include "qmsg/oracle.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace qmsg {

std::size_t ConflictGraph::edge_count() const {
    std::size_t count = 0;
    for (std::size_t a = 0; a < vertex_count; ++a)
        for (std::size_t b = a + 1; b < vertex_count; ++b)
            if (adjacent[a][b]) ++count;
    return count;
}

ConflictGraph distinct_rows(const PartialFunction& f) {
    ConflictGraph g;
    g.vertex_count = f.x_count();
    g.adjacent.assign(f.x_count(), std::vector<bool>(f.x_count(), false));
    for (std::size_t a = 0; a < f.x_count(); ++a)
        for (std::size_t b = a + 1; b < f.x_count(); ++b)
            for (std::size_t y = 0; y < f.y_count(); ++y) {
                if (!f.defined(a, y) || !f.defined(b, y)) continue;
                if (f.value(a, y) != f.value(b, y)) {
                    g.adjacent[a][b] = true;
                    g.adjacent[b][a] = true;
                    break;
                }
            }
    return g;
}

namespace {

std::vector<std::size_t> degree_descending_order(const ConflictGraph& g) {
    std::vector<std::size_t> degree(g.vertex_count, 0);
    for (std::size_t v = 0; v < g.vertex_count; ++v)
        degree[v] = static_cast<std::size_t>(
            std::count(g.adjacent[v].begin(), g.adjacent[v].end(), true));
    std::vector<std::size_t> order(g.vertex_count);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return degree[a] > degree[b]; });
    return order;
}

// Greedy clique along the degree order; a lower bound for the coloring search.
std::size_t greedy_clique_size(const ConflictGraph& g, const std::vector<std::size_t>& order) {
    std::vector<std::size_t> clique;
    for (std::size_t v : order) {
        const bool fits = std::all_of(clique.begin(), clique.end(),
                                      [&](std::size_t u) { return g.edge(u, v); });
        if (fits) clique.push_back(v);
    }
    return clique.size();
}

std::size_t greedy_coloring_size(const ConflictGraph& g, const std::vector<std::size_t>& order) {
    std::vector<std::size_t> color(g.vertex_count, 0);
    std::size_t used = 0;
    for (std::size_t v : order) {
        std::set<std::size_t> blocked;
        for (std::size_t u = 0; u < g.vertex_count; ++u)
            if (g.edge(u, v) && color[u] != 0) blocked.insert(color[u]);
        std::size_t c = 1;
        while (blocked.count(c)) ++c;
        color[v] = c;
        used = std::max(used, c);
    }
    return used;
}

bool colorable_with(const ConflictGraph& g, const std::vector<std::size_t>& order,
                    std::vector<std::size_t>& color, std::size_t index, std::size_t k) {
    if (index == order.size()) return true;
    const std::size_t v = order[index];
    // Symmetry breaking: never open more than one fresh color at a time.
    std::size_t max_new = 1;
    for (std::size_t u = 0; u < index; ++u) max_new = std::max(max_new, color[order[u]] + 1);
    const std::size_t top = std::min(k, max_new);
    for (std::size_t c = 1; c <= top; ++c) {
        bool legal = true;
        for (std::size_t u = 0; u < g.vertex_count; ++u)
            if (color[u] == c && g.edge(u, v)) {
                legal = false;
                break;
            }
        if (!legal) continue;
        color[v] = c;
        if (colorable_with(g, order, color, index + 1, k)) return true;
        color[v] = 0;
    }
    return false;
}

}  // namespace

std::size_t chromatic_number(const ConflictGraph& g) {
    if (g.vertex_count == 0) return 0;
    const auto order = degree_descending_order(g);
    const std::size_t lower = std::max<std::size_t>(1, greedy_clique_size(g, order));
    const std::size_t upper = std::max<std::size_t>(1, greedy_coloring_size(g, order));
    for (std::size_t k = lower; k < upper; ++k) {
        std::vector<std::size_t> color(g.vertex_count, 0);
        if (colorable_with(g, order, color, 0, k)) return k;
    }
    return upper;
}

namespace {

std::size_t bits_for(std::size_t messages) {
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < messages) ++bits;
    return bits;
}

}  // namespace

OneWayCost exact_one_way_cost(const PartialFunction& f, std::size_t limit) {
    const ConflictGraph g = distinct_rows(f);
    OneWayCost cost;
    if (f.x_count() <= limit) {
        cost.messages = chromatic_number(g);
        cost.exact = true;
    } else {
        cost.messages = greedy_coloring_size(g, degree_descending_order(g));
        cost.exact = false;
    }
    cost.bits = bits_for(cost.messages);
    return cost;
}

ValidationResult validate_compiled(const DeterministicProtocol& det, const PartialFunction& f) {
    if (det.transcripts.size() != f.x_count() || det.measurements.size() != f.y_count())
        throw std::invalid_argument("validate_compiled: protocol and function dimensions differ");
    ValidationResult result;
    for (std::size_t x = 0; x < f.x_count(); ++x)
        for (std::size_t y = 0; y < f.y_count(); ++y) {
            if (!f.defined(x, y)) continue;
            const int expected = f.value(x, y) == CellValue::One ? 1 : 0;
            if (replay_decision(det, x, y) != expected) {
                result.ok = false;
                result.counterexample = {x, y};
                return result;
            }
        }
    return result;
}

std::size_t distinct_message_count(const DeterministicProtocol& det) {
    std::set<std::vector<std::uint8_t>> messages;
    for (const auto& transcript : det.transcripts)
        messages.insert(transcript_to_bits(transcript, det.m_bits, det.cfg));
    return messages.size();
}

}  // namespace qmsg
