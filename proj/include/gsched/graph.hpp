#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gsched/rng.hpp"

namespace gsched {

using NodeId = int;

/// Undirected conflict graph over wireless links. Vertex i is link i; an edge
/// marks two links that cannot transmit in the same slot. Node IDs are the
/// dense range [0, node_count) and double as the tie-break identity in LGS.
///
/// Immutable once built: neighbor lists are sorted, duplicate-free, symmetric
/// and loop-free.
class ConflictGraph {
public:
    ConflictGraph() = default;

    /// Builds from an edge list. Duplicate edges are merged; self-loops and
    /// out-of-range endpoints throw std::invalid_argument.
    ConflictGraph(int node_count, std::span<const std::pair<NodeId, NodeId>> edges);

    int node_count() const { return static_cast<int>(adjacency_.size()); }
    std::size_t edge_count() const { return edge_count_; }
    const std::vector<NodeId>& neighbors(NodeId v) const { return adjacency_[static_cast<std::size_t>(v)]; }
    int degree(NodeId v) const { return static_cast<int>(neighbors(v).size()); }
    bool has_edge(NodeId a, NodeId b) const;

    /// Edges as (i, j) with i < j, sorted.
    std::vector<std::pair<NodeId, NodeId>> edges() const;
    std::vector<int> degrees() const;

    bool operator==(const ConflictGraph&) const = default;

private:
    std::vector<std::vector<NodeId>> adjacency_;
    std::size_t edge_count_ = 0;
};

using LaplacianMatrix = Eigen::MatrixXd;

ConflictGraph generate_star(int x);
ConflictGraph generate_er(int n, double p, Rng& rng);
ConflictGraph generate_ba(int n, int m, Rng& rng);
ConflictGraph generate_power_law_tree(int n, double gamma, Rng& rng);

/// I - D^{-1/2} A D^{-1/2}; rows and columns of isolated nodes are zero.
LaplacianMatrix normalized_laplacian(const ConflictGraph& g);

/// Peak-to-average degree ratio. Throws UndefinedMetricError on an edgeless graph.
double centralization(const ConflictGraph& g);

bool is_independent_set(const ConflictGraph& g, std::span<const NodeId> s);

/// True when no vertex outside `s` could be added while keeping independence.
bool is_maximal_independent_set(const ConflictGraph& g, std::span<const NodeId> s);

bool is_connected(const ConflictGraph& g);

// Edge-list text format:
//   nodes <V>
//   i j
//   ...
void write_edge_list(std::ostream& os, const ConflictGraph& g);
ConflictGraph read_edge_list(std::istream& is);

/// Named conflict-graph configurations used in the experiments:
///   Star<X>   star with X leaves (V = X + 1)
///   BA-m<X>   Barabasi-Albert, V = 70, m = X
///   BA-mix    Barabasi-Albert, V in {100,150,...,300}, m in {2,5,10,15,20}
///   ER        Erdos-Renyi, V = 50, p = 0.1
///   Tree      power-law tree, V = 50, gamma = 3
class GraphSpec {
public:
    enum class Model { star, ba, ba_mix, er, tree };

    static GraphSpec parse(const std::string& name);

    Model model() const { return model_; }
    int param() const { return param_; }
    const std::string& name() const { return name_; }

    ConflictGraph sample(Rng& rng) const;

private:
    Model model_ = Model::star;
    int param_ = 0;
    std::string name_;
};

} // namespace gsched
