#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <tuple>
#include <vector>

namespace exforce {

using NodeId = std::uint32_t;

struct Edge {
    NodeId to;
    double weight;

    friend bool operator==(const Edge&, const Edge&) = default;
};

using EdgeTuple = std::tuple<NodeId, NodeId, double>;

/// Immutable simple graph over dense node ids 0..n-1, CSR adjacency sorted by
/// neighbor id. Undirected graphs store each edge in both endpoint lists with
/// equal weight; directed graphs additionally keep an in-edge index. All
/// weights are positive; self-loops and parallel edges are rejected at
/// construction. Safe for unsynchronized concurrent reads.
class Graph {
public:
    Graph() = default;

    /// Builds a graph from unique edges. Undirected inputs list each edge
    /// once in either orientation. Throws std::invalid_argument on self-loops,
    /// duplicates, endpoints >= node_count, or weights <= 0.
    static Graph from_edges(std::size_t node_count, std::span<const EdgeTuple> edges,
                            bool directed = false, std::vector<std::string> labels = {});

    std::size_t node_count() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
    std::size_t edge_count() const { return edge_count_; }  // undirected edges counted once
    bool directed() const { return directed_; }

    /// Out-neighbors, sorted by id. Equals all neighbors for undirected graphs.
    std::span<const Edge> neighbors(NodeId u) const {
        return {adj_.data() + offsets_[u], adj_.data() + offsets_[u + 1]};
    }

    /// In-neighbors; identical to neighbors() for undirected graphs.
    std::span<const Edge> in_neighbors(NodeId u) const {
        if (!directed_) return neighbors(u);
        return {in_adj_.data() + in_offsets_[u], in_adj_.data() + in_offsets_[u + 1]};
    }

    std::size_t degree(NodeId u) const { return offsets_[u + 1] - offsets_[u]; }
    double weighted_degree(NodeId u) const { return weighted_degree_[u]; }

    bool has_edge(NodeId u, NodeId v) const;      // u -> v
    double edge_weight(NodeId u, NodeId v) const;  // 0 when absent

    std::size_t max_degree() const;

    /// Original input label; dense ids stringified when no labels were kept.
    std::string label(NodeId u) const;
    bool has_labels() const { return !labels_.empty(); }
    const std::vector<std::string>& labels() const { return labels_; }

    std::vector<EdgeTuple> edges() const;  // undirected: u < v once per edge

    friend bool operator==(const Graph&, const Graph&) = default;

private:
    std::vector<std::size_t> offsets_;
    std::vector<Edge> adj_;
    std::vector<std::size_t> in_offsets_;  // directed graphs only
    std::vector<Edge> in_adj_;
    std::vector<double> weighted_degree_;
    std::vector<std::string> labels_;
    std::size_t edge_count_ = 0;
    bool directed_ = false;
};

struct LoadOptions {
    bool weighted = false;
    bool directed = false;
};

struct LoadResult {
    Graph graph;
    std::size_t self_loops_dropped = 0;
    std::size_t duplicates_dropped = 0;
};

/// Parses a whitespace-separated edge list ("u v" or "u v w", '#' comments).
/// Self-loops are dropped and duplicate edges collapse keeping the first
/// occurrence; both are counted in the result. Labels are remapped to dense
/// ids in order of first appearance and retained on the graph.
/// Throws std::invalid_argument (with line number) on malformed lines,
/// non-positive weights, or input without edges.
LoadResult load_edge_list(std::istream& in, const LoadOptions& options = {});
LoadResult load_edge_list_file(const std::string& path, const LoadOptions& options = {});

/// Induced subgraph on the largest connected component (weak connectivity for
/// directed graphs), densely re-indexed in ascending original id order. Size
/// ties pick the component containing the smallest original id.
Graph giant_component(const Graph& g);

bool is_connected(const Graph& g);  // weak connectivity for directed graphs

/// BFS ball: the induced subgraph on nodes within `radius` hops of `center`,
/// plus the per-node weight of edges leaving the ball.
struct Ball {
    NodeId center = 0;  // id within subgraph
    int radius = 0;
    Graph subgraph;
    std::vector<double> boundary_degree;  // indexed by subgraph id
    std::vector<NodeId> parent_ids;       // subgraph id -> parent graph id
};

Ball ball(const Graph& g, NodeId center, int radius);

/// Largest adjacency eigenvalue of a connected undirected graph, estimated by
/// power iteration (all-ones start, spectral shift so bipartite graphs
/// converge) with a Rayleigh-quotient readout. Convergence is declared when
/// the max-norm change of successive normalized iterates drops below tol.
/// Throws std::runtime_error (reporting the last estimate) on non-convergence.
double largest_eigenvalue(const Graph& g, double tol = 1e-10, int max_iter = 100000);

struct GraphSummary {
    std::size_t nodes = 0;
    std::size_t edges = 0;
    std::size_t max_degree = 0;
    double lambda = 0.0;
};

GraphSummary summarize(const Graph& g);

}  // namespace exforce
