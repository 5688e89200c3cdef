#include "gsched/solvers.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "gsched/errors.hpp"

namespace gsched {

namespace {

void check_utilities(const ConflictGraph& g, std::span<const double> u) {
    if (static_cast<int>(u.size()) != g.node_count()) {
        throw std::invalid_argument("utility vector length does not match node count");
    }
    for (double x : u) {
        if (!std::isfinite(x)) throw std::invalid_argument("utility vector has a non-finite entry");
    }
}

// Strict total order used by both greedy solvers: utility first, then node ID.
bool beats(std::span<const double> u, NodeId a, NodeId b) {
    const double ua = u[static_cast<std::size_t>(a)];
    const double ub = u[static_cast<std::size_t>(b)];
    return ua > ub || (ua == ub && a > b);
}

} // namespace

Schedule lgs(const ConflictGraph& g, std::span<const double> u) {
    check_utilities(g, u);
    const int n = g.node_count();
    std::vector<char> alive(static_cast<std::size_t>(n), 1);
    int remaining = n;
    Schedule out;
    std::vector<NodeId> winners;
    while (remaining > 0) {
        ++out.rounds_used;
        winners.clear();
        for (NodeId v = 0; v < n; ++v) {
            if (!alive[static_cast<std::size_t>(v)]) continue;
            bool local_max = true;
            for (NodeId w : g.neighbors(v)) {
                if (alive[static_cast<std::size_t>(w)] && !beats(u, v, w)) {
                    local_max = false;
                    break;
                }
            }
            if (local_max) winners.push_back(v);
        }
        for (NodeId v : winners) {
            out.nodes.push_back(v);
            if (alive[static_cast<std::size_t>(v)]) {
                alive[static_cast<std::size_t>(v)] = 0;
                --remaining;
            }
            for (NodeId w : g.neighbors(v)) {
                if (alive[static_cast<std::size_t>(w)]) {
                    alive[static_cast<std::size_t>(w)] = 0;
                    --remaining;
                }
            }
        }
    }
    std::sort(out.nodes.begin(), out.nodes.end());
    return out;
}

Schedule greedy_centralized(const ConflictGraph& g, std::span<const double> u) {
    check_utilities(g, u);
    const int n = g.node_count();
    std::vector<NodeId> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) { return beats(u, a, b); });

    std::vector<char> blocked(static_cast<std::size_t>(n), 0);
    Schedule out;
    for (NodeId v : order) {
        if (blocked[static_cast<std::size_t>(v)]) continue;
        out.nodes.push_back(v);
        blocked[static_cast<std::size_t>(v)] = 1;
        for (NodeId w : g.neighbors(v)) blocked[static_cast<std::size_t>(w)] = 1;
    }
    std::sort(out.nodes.begin(), out.nodes.end());
    return out;
}

namespace {

using Mask = std::uint64_t;

class BranchAndBound {
public:
    BranchAndBound(const ConflictGraph& g, std::span<const double> u) : u_(u) {
        const int n = g.node_count();
        closed_.resize(static_cast<std::size_t>(n));
        open_.resize(static_cast<std::size_t>(n));
        for (NodeId v = 0; v < n; ++v) {
            Mask nbrs = 0;
            for (NodeId w : g.neighbors(v)) nbrs |= Mask{1} << w;
            open_[static_cast<std::size_t>(v)] = nbrs;
            closed_[static_cast<std::size_t>(v)] = nbrs | (Mask{1} << v);
        }
        double total = 0.0;
        for (double x : u) total += x;
        tol_ = 1e-9 * std::max(1.0, total);
    }

    double tolerance() const { return tol_; }

    /// Best achievable weight using only vertices of `candidates`.
    double solve(Mask candidates) {
        best_ = -1.0;
        search(candidates, 0.0);
        return best_;
    }

    Mask closed(NodeId v) const { return closed_[static_cast<std::size_t>(v)]; }
    double weight(NodeId v) const { return u_[static_cast<std::size_t>(v)]; }

private:
    double mask_weight(Mask m) const {
        double s = 0.0;
        while (m) {
            s += weight(std::countr_zero(m));
            m &= m - 1;
        }
        return s;
    }

    void search(Mask candidates, double current) {
        if (current > best_) best_ = current;
        if (!candidates) return;
        if (current + mask_weight(candidates) <= best_ + tol_) return;

        // Branch on the candidate with the most candidate neighbors.
        NodeId pivot = -1;
        int pivot_degree = -1;
        for (Mask m = candidates; m; m &= m - 1) {
            NodeId v = std::countr_zero(m);
            int d = std::popcount(open_[static_cast<std::size_t>(v)] & candidates);
            if (d > pivot_degree) {
                pivot_degree = d;
                pivot = v;
            }
        }
        if (pivot_degree == 0) {
            // No conflicts left among candidates; take them all.
            current += mask_weight(candidates);
            if (current > best_) best_ = current;
            return;
        }
        search(candidates & ~closed(pivot), current + weight(pivot));
        search(candidates & ~(Mask{1} << pivot), current);
    }

    std::span<const double> u_;
    std::vector<Mask> closed_;
    std::vector<Mask> open_;
    double best_ = -1.0;
    double tol_ = 0.0;
};

} // namespace

Schedule exact_mwis(const ConflictGraph& g, std::span<const double> u, int cap) {
    check_utilities(g, u);
    const int n = g.node_count();
    cap = std::min(cap, 64);
    if (n > cap) {
        throw SizeLimitError("exact MWIS limited to " + std::to_string(cap) + " nodes, graph has " + std::to_string(n));
    }
    for (double x : u) {
        if (x < 0.0) throw std::invalid_argument("exact MWIS requires non-negative utilities");
    }

    BranchAndBound bb(g, u);
    const Mask all = n == 64 ? ~Mask{0} : (Mask{1} << n) - 1;
    const double optimum = bb.solve(all);

    // Fix vertices in ID order, preferring exclusion whenever an optimal
    // completion still exists; this yields the lexicographically smallest indicator.
    Schedule out;
    Mask candidates = all;
    double fixed = 0.0;
    for (NodeId v = 0; v < n; ++v) {
        const Mask bit = Mask{1} << v;
        if (!(candidates & bit)) continue;
        const Mask without = candidates & ~bit;
        if (fixed + bb.solve(without) >= optimum - bb.tolerance()) {
            candidates = without;
        } else {
            out.nodes.push_back(v);
            fixed += bb.weight(v);
            candidates &= ~bb.closed(v);
        }
    }
    return out;
}

UtilityVector baseline_utility(std::span<const std::int64_t> q, std::span<const std::int64_t> r, UtilityKind kind) {
    if (q.size() != r.size()) throw std::invalid_argument("queue and rate vectors differ in length");
    UtilityVector u(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        const auto qi = static_cast<double>(q[i]);
        const auto ri = static_cast<double>(r[i]);
        u[i] = kind == UtilityKind::product ? qi * ri : std::min(qi, ri);
    }
    return u;
}

double schedule_weight(std::span<const double> u, std::span<const NodeId> nodes) {
    double s = 0.0;
    for (NodeId v : nodes) s += u[static_cast<std::size_t>(v)];
    return s;
}

} // namespace gsched
