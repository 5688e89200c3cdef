#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gsched/graph.hpp"

namespace gsched {

using UtilityVector = std::vector<double>;

struct Schedule {
    std::vector<NodeId> nodes;  // ascending
    int rounds_used = 0;        // synchronous rounds; LGS only
};

/// Local greedy solver simulated in synchronous rounds. Each round, every
/// node still in the residual graph compares its utility with its residual
/// neighbors; it joins the schedule if it beats all of them, with equal
/// utilities won by the larger node ID. Winners and their neighbors then
/// leave the residual graph.
Schedule lgs(const ConflictGraph& g, std::span<const double> u);

/// Sequential greedy: repeatedly take the best remaining node (ties to the
/// larger ID) and delete its closed neighborhood.
Schedule greedy_centralized(const ConflictGraph& g, std::span<const double> u);

inline constexpr int kExactDefaultCap = 40;

/// Maximum-weight independent set by branch and bound. Among optimal sets the
/// one whose 0/1 indicator vector (node 0 first) is lexicographically smallest
/// is returned. Requires u >= 0 and |V| <= cap (cap at most 64).
Schedule exact_mwis(const ConflictGraph& g, std::span<const double> u, int cap = kExactDefaultCap);

enum class UtilityKind { product, min };

UtilityVector baseline_utility(std::span<const std::int64_t> q, std::span<const std::int64_t> r, UtilityKind kind);

double schedule_weight(std::span<const double> u, std::span<const NodeId> nodes);

} // namespace gsched
