#include "gsched/graph.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <ostream>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "gsched/errors.hpp"

namespace gsched {

ConflictGraph::ConflictGraph(int node_count, std::span<const std::pair<NodeId, NodeId>> edges) {
    if (node_count < 0) {
        throw std::invalid_argument("node count must be non-negative");
    }
    adjacency_.resize(static_cast<std::size_t>(node_count));
    for (const auto& [a, b] : edges) {
        if (a < 0 || b < 0 || a >= node_count || b >= node_count) {
            throw std::invalid_argument("edge endpoint out of range: " + std::to_string(a) + " " +
                                        std::to_string(b));
        }
        if (a == b) {
            throw std::invalid_argument("self-loop on node " + std::to_string(a));
        }
        adjacency_[static_cast<std::size_t>(a)].push_back(b);
        adjacency_[static_cast<std::size_t>(b)].push_back(a);
    }
    std::size_t half_edges = 0;
    for (auto& nbrs : adjacency_) {
        std::sort(nbrs.begin(), nbrs.end());
        nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
        half_edges += nbrs.size();
    }
    edge_count_ = half_edges / 2;
}

bool ConflictGraph::has_edge(NodeId a, NodeId b) const {
    const auto& nbrs = neighbors(a);
    return std::binary_search(nbrs.begin(), nbrs.end(), b);
}

std::vector<std::pair<NodeId, NodeId>> ConflictGraph::edges() const {
    std::vector<std::pair<NodeId, NodeId>> out;
    out.reserve(edge_count_);
    for (NodeId i = 0; i < node_count(); ++i) {
        for (NodeId j : neighbors(i)) {
            if (i < j) out.emplace_back(i, j);
        }
    }
    return out;
}

std::vector<int> ConflictGraph::degrees() const {
    std::vector<int> out(adjacency_.size());
    for (std::size_t i = 0; i < adjacency_.size(); ++i) out[i] = static_cast<int>(adjacency_[i].size());
    return out;
}

ConflictGraph generate_star(int x) {
    if (x < 1) throw std::invalid_argument("star needs at least one leaf");
    std::vector<std::pair<NodeId, NodeId>> edges;
    edges.reserve(static_cast<std::size_t>(x));
    for (NodeId leaf = 1; leaf <= x; ++leaf) edges.emplace_back(0, leaf);
    return ConflictGraph(x + 1, edges);
}

ConflictGraph generate_er(int n, double p, Rng& rng) {
    if (n < 1) throw std::invalid_argument("ER graph needs n >= 1");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("ER edge probability outside [0,1]");
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId i = 0; i < n; ++i) {
        for (NodeId j = i + 1; j < n; ++j) {
            if (coin(rng) < p) edges.emplace_back(i, j);
        }
    }
    return ConflictGraph(n, edges);
}

ConflictGraph generate_ba(int n, int m, Rng& rng) {
    if (m < 1) throw std::invalid_argument("BA graph needs m >= 1");
    if (m >= n) throw std::invalid_argument("BA graph needs m < n");

    std::vector<std::pair<NodeId, NodeId>> edges;
    edges.reserve(static_cast<std::size_t>((n - m) * m));
    // Every edge endpoint appears once here, so a uniform draw is degree-proportional.
    std::vector<NodeId> endpoints;
    std::vector<NodeId> targets;
    for (NodeId v = m; v < n; ++v) {
        targets.clear();
        if (endpoints.empty()) {
            // Seed nodes are isolated: attach uniformly, which with m seeds takes all of them.
            std::vector<NodeId> pool(static_cast<std::size_t>(v));
            for (NodeId i = 0; i < v; ++i) pool[static_cast<std::size_t>(i)] = i;
            std::shuffle(pool.begin(), pool.end(), rng);
            targets.assign(pool.begin(), pool.begin() + m);
        } else {
            std::uniform_int_distribution<std::size_t> pick(0, endpoints.size() - 1);
            while (static_cast<int>(targets.size()) < m) {
                NodeId t = endpoints[pick(rng)];
                if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
            }
        }
        for (NodeId t : targets) {
            edges.emplace_back(t, v);
            endpoints.push_back(t);
            endpoints.push_back(v);
        }
    }
    return ConflictGraph(n, edges);
}

ConflictGraph generate_power_law_tree(int n, double gamma, Rng& rng) {
    if (n < 2) throw std::invalid_argument("power-law tree needs n >= 2");
    if (!(gamma > 1.0)) throw std::invalid_argument("power-law exponent must exceed 1");

    // Target degrees from P(d) ~ d^-gamma on d = 1..n-1.
    std::vector<double> weights(static_cast<std::size_t>(n - 1));
    for (int d = 1; d <= n - 1; ++d) weights[static_cast<std::size_t>(d - 1)] = std::pow(d, -gamma);
    std::discrete_distribution<int> degree_dist(weights.begin(), weights.end());
    std::vector<int> budget(static_cast<std::size_t>(n));
    for (auto& b : budget) b = degree_dist(rng) + 1;

    std::vector<int> deg(static_cast<std::size_t>(n), 0);
    std::vector<std::pair<NodeId, NodeId>> edges;
    edges.reserve(static_cast<std::size_t>(n - 1));
    std::vector<double> attach(static_cast<std::size_t>(n));
    for (NodeId v = 1; v < n; ++v) {
        for (NodeId u = 0; u < v; ++u) {
            auto i = static_cast<std::size_t>(u);
            attach[i] = std::max(budget[i] - deg[i], 1);
        }
        std::discrete_distribution<NodeId> parent_dist(attach.begin(), attach.begin() + v);
        NodeId parent = parent_dist(rng);
        edges.emplace_back(parent, v);
        ++deg[static_cast<std::size_t>(parent)];
        ++deg[static_cast<std::size_t>(v)];
    }
    return ConflictGraph(n, edges);
}

LaplacianMatrix normalized_laplacian(const ConflictGraph& g) {
    const int n = g.node_count();
    LaplacianMatrix lap = LaplacianMatrix::Zero(n, n);
    std::vector<double> inv_sqrt(static_cast<std::size_t>(n), 0.0);
    for (NodeId v = 0; v < n; ++v) {
        if (g.degree(v) > 0) inv_sqrt[static_cast<std::size_t>(v)] = 1.0 / std::sqrt(static_cast<double>(g.degree(v)));
    }
    for (NodeId i = 0; i < n; ++i) {
        if (g.degree(i) == 0) continue;
        lap(i, i) = 1.0;
        for (NodeId j : g.neighbors(i)) {
            lap(i, j) = -inv_sqrt[static_cast<std::size_t>(i)] * inv_sqrt[static_cast<std::size_t>(j)];
        }
    }
    return lap;
}

double centralization(const ConflictGraph& g) {
    if (g.edge_count() == 0) throw UndefinedMetricError("centralization undefined on an edgeless graph");
    const auto deg = g.degrees();
    const double peak = *std::max_element(deg.begin(), deg.end());
    const double mean = 2.0 * static_cast<double>(g.edge_count()) / g.node_count();
    return peak / mean;
}

namespace {

std::vector<char> membership(const ConflictGraph& g, std::span<const NodeId> s) {
    std::vector<char> in(static_cast<std::size_t>(g.node_count()), 0);
    for (NodeId v : s) {
        if (v < 0 || v >= g.node_count()) throw std::invalid_argument("node id out of range: " + std::to_string(v));
        in[static_cast<std::size_t>(v)] = 1;
    }
    return in;
}

} // namespace

bool is_independent_set(const ConflictGraph& g, std::span<const NodeId> s) {
    const auto in = membership(g, s);
    for (NodeId v : s) {
        for (NodeId w : g.neighbors(v)) {
            if (in[static_cast<std::size_t>(w)]) return false;
        }
    }
    return true;
}

bool is_maximal_independent_set(const ConflictGraph& g, std::span<const NodeId> s) {
    if (!is_independent_set(g, s)) return false;
    const auto in = membership(g, s);
    for (NodeId v = 0; v < g.node_count(); ++v) {
        if (in[static_cast<std::size_t>(v)]) continue;
        const auto& nbrs = g.neighbors(v);
        bool blocked = std::any_of(nbrs.begin(), nbrs.end(), [&](NodeId w) { return in[static_cast<std::size_t>(w)] != 0; });
        if (!blocked) return false;
    }
    return true;
}

bool is_connected(const ConflictGraph& g) {
    const int n = g.node_count();
    if (n == 0) return true;
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::queue<NodeId> frontier;
    frontier.push(0);
    seen[0] = 1;
    int reached = 1;
    while (!frontier.empty()) {
        NodeId v = frontier.front();
        frontier.pop();
        for (NodeId w : g.neighbors(v)) {
            if (!seen[static_cast<std::size_t>(w)]) {
                seen[static_cast<std::size_t>(w)] = 1;
                ++reached;
                frontier.push(w);
            }
        }
    }
    return reached == n;
}

void write_edge_list(std::ostream& os, const ConflictGraph& g) {
    os << "nodes " << g.node_count() << '\n';
    for (const auto& [i, j] : g.edges()) os << i << ' ' << j << '\n';
}

ConflictGraph read_edge_list(std::istream& is) {
    std::string line;
    int line_no = 0;
    int n = -1;
    std::vector<std::pair<NodeId, NodeId>> edges;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        if (n < 0) {
            std::string tag;
            if (!(ls >> tag >> n) || tag != "nodes" || n < 0) {
                throw std::invalid_argument("edge list line " + std::to_string(line_no) + ": expected 'nodes <V>'");
            }
            continue;
        }
        NodeId a = 0;
        NodeId b = 0;
        if (!(ls >> a >> b)) {
            throw std::invalid_argument("edge list line " + std::to_string(line_no) + ": expected 'i j'");
        }
        edges.emplace_back(a, b);
    }
    if (n < 0) throw std::invalid_argument("edge list: missing 'nodes' header");
    return ConflictGraph(n, edges);
}

GraphSpec GraphSpec::parse(const std::string& name) {
    GraphSpec spec;
    spec.name_ = name;
    auto parse_suffix = [&](std::size_t prefix_len) {
        const std::string rest = name.substr(prefix_len);
        if (rest.empty() || !std::all_of(rest.begin(), rest.end(), [](unsigned char c) { return std::isdigit(c); })) {
            throw std::invalid_argument("unknown graph configuration: " + name);
        }
        return std::stoi(rest);
    };
    if (name == "BA-mix") {
        spec.model_ = Model::ba_mix;
    } else if (name == "ER") {
        spec.model_ = Model::er;
    } else if (name == "Tree") {
        spec.model_ = Model::tree;
    } else if (name.rfind("Star", 0) == 0) {
        spec.model_ = Model::star;
        spec.param_ = parse_suffix(4);
        if (spec.param_ < 1) throw std::invalid_argument("star needs at least one leaf: " + name);
    } else if (name.rfind("BA-m", 0) == 0) {
        spec.model_ = Model::ba;
        spec.param_ = parse_suffix(4);
        if (spec.param_ < 1 || spec.param_ >= 70) throw std::invalid_argument("BA-m needs 1 <= m < 70: " + name);
    } else {
        throw std::invalid_argument("unknown graph configuration: " + name);
    }
    return spec;
}

ConflictGraph GraphSpec::sample(Rng& rng) const {
    switch (model_) {
    case Model::star:
        return generate_star(param_);
    case Model::ba:
        return generate_ba(70, param_, rng);
    case Model::ba_mix: {
        static constexpr int sizes[] = {100, 150, 200, 250, 300};
        static constexpr int ms[] = {2, 5, 10, 15, 20};
        std::uniform_int_distribution<int> pick(0, 4);
        const int n = sizes[pick(rng)];
        const int m = ms[pick(rng)];
        return generate_ba(n, m, rng);
    }
    case Model::er:
        return generate_er(50, 0.1, rng);
    case Model::tree:
        return generate_power_law_tree(50, 3.0, rng);
    }
    throw std::logic_error("unreachable graph model");
}

} // namespace gsched
