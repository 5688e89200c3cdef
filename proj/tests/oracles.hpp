#pragma once

// Reference implementations used only by tests. They are deliberately naive
// and share no code with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "gsched/graph.hpp"

namespace oracle {

using Edges = std::vector<std::pair<int, int>>;

inline gsched::ConflictGraph make_graph(int n, const Edges& edges) { return gsched::ConflictGraph(n, edges); }

inline gsched::ConflictGraph path(int n) {
    Edges e;
    for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
    return make_graph(n, e);
}

inline gsched::ConflictGraph complete(int n) {
    Edges e;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
    return make_graph(n, e);
}

inline gsched::ConflictGraph edgeless(int n) { return make_graph(n, {}); }

// Adjacency matrix built straight from the edge list.
inline std::vector<std::vector<bool>> adjacency(const gsched::ConflictGraph& g) {
    const int n = g.node_count();
    std::vector<std::vector<bool>> a(n, std::vector<bool>(n, false));
    for (auto [i, j] : g.edges()) a[i][j] = a[j][i] = true;
    return a;
}

inline bool independent_mask(const std::vector<std::vector<bool>>& a, std::uint32_t mask) {
    const int n = static_cast<int>(a.size());
    for (int i = 0; i < n; ++i) {
        if (!(mask >> i & 1u)) continue;
        for (int j = i + 1; j < n; ++j)
            if ((mask >> j & 1u) && a[i][j]) return false;
    }
    return true;
}

// Best weight over all 2^n subsets.
inline double brute_force_mwis(const gsched::ConflictGraph& g, std::span<const double> u) {
    const auto a = adjacency(g);
    const int n = g.node_count();
    double best = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        if (!independent_mask(a, mask)) continue;
        double w = 0.0;
        for (int i = 0; i < n; ++i)
            if (mask >> i & 1u) w += u[i];
        best = std::max(best, w);
    }
    return best;
}

inline bool brute_independent(const gsched::ConflictGraph& g, const std::vector<int>& s) {
    const auto a = adjacency(g);
    for (std::size_t x = 0; x < s.size(); ++x)
        for (std::size_t y = x + 1; y < s.size(); ++y)
            if (s[x] == s[y] || a[s[x]][s[y]]) return false;
    return true;
}

inline bool brute_maximal(const gsched::ConflictGraph& g, const std::vector<int>& s) {
    if (!brute_independent(g, s)) return false;
    for (int v = 0; v < g.node_count(); ++v) {
        if (std::find(s.begin(), s.end(), v) != s.end()) continue;
        auto t = s;
        t.push_back(v);
        if (brute_independent(g, t)) return false;
    }
    return true;
}

// Union-find connectivity.
inline bool connected(const gsched::ConflictGraph& g) {
    const int n = g.node_count();
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    int components = n;
    for (auto [i, j] : g.edges()) {
        int a = find(i), b = find(j);
        if (a != b) {
            parent[a] = b;
            --components;
        }
    }
    return components <= 1;
}

// Numpy-style linear percentile, written from the definition.
inline double percentile(std::vector<double> x, double p) {
    std::sort(x.begin(), x.end());
    const double h = (static_cast<double>(x.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = static_cast<std::size_t>(std::ceil(h));
    return x[lo] + (h - std::floor(h)) * (x[hi] - x[lo]);
}

inline std::vector<double> distinct_utilities(int n, std::mt19937_64& rng) {
    std::vector<double> u(n);
    std::iota(u.begin(), u.end(), 1.0);
    std::shuffle(u.begin(), u.end(), rng);
    std::uniform_real_distribution<double> jitter(0.0, 0.5);
    for (double& x : u) x += jitter(rng);
    return u;
}

} // namespace oracle
