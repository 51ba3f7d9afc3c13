#include "exforce/expected_force.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "exforce/parallel.hpp"

namespace exforce {

namespace {

constexpr int kMaxTransmissions = 3;

/// Enumeration state shared by the metric and the cluster listing. Clusters
/// hold at most x+1 <= 4 nodes, so membership tests are linear scans.
struct Enumerator {
    const Graph& g;
    const std::vector<double>* boundary;  // extra outward weight per node, may be null
    bool weighted;
    int x;

    std::array<NodeId, kMaxTransmissions + 1> cluster{};
    std::array<std::pair<NodeId, NodeId>, kMaxTransmissions> sequence{};
    int size = 0;

    bool contains(NodeId v) const {
        for (int i = 0; i < size; ++i)
            if (cluster[i] == v) return true;
        return false;
    }

    /// Cluster degree: edges with exactly one endpoint inside (out-edges only
    /// when directed), counted or weight-summed, plus any boundary weight.
    double cluster_degree() const {
        double total = 0.0;
        for (int i = 0; i < size; ++i) {
            const NodeId v = cluster[i];
            total += weighted ? g.weighted_degree(v) : static_cast<double>(g.degree(v));
            if (boundary) total += (*boundary)[v];
        }
        // remove edges internal to the cluster: an undirected edge appears in
        // both endpoint degrees, a directed arc only in its source's
        for (int i = 0; i < size; ++i)
            for (int j = 0; j < size; ++j) {
                if (i == j || (!g.directed() && i > j)) continue;
                const double w = g.edge_weight(cluster[i], cluster[j]);
                if (w == 0.0) continue;
                total -= (weighted ? w : 1.0) * (g.directed() ? 1.0 : 2.0);
            }
        return total;
    }

    template <typename Emit>
    void run(NodeId seed, Emit&& emit) {
        cluster[0] = seed;
        size = 1;
        extend(0, 1.0, emit);
    }

    template <typename Emit>
    void extend(int depth, double weight, Emit&& emit) {
        if (depth == x) {
            emit(*this, weight);
            return;
        }
        for (int i = 0; i < size; ++i) {
            const NodeId u = cluster[i];
            for (const Edge& e : g.neighbors(u)) {
                if (contains(e.to)) continue;
                sequence[depth] = {u, e.to};
                cluster[size++] = e.to;
                extend(depth + 1, weighted ? weight * e.weight : 1.0, emit);
                --size;
            }
        }
    }
};

void check_options(const Graph& g, NodeId seed, const ExfOptions& opts) {
    if (seed >= g.node_count()) throw std::invalid_argument("invalid seed node id");
    if (opts.transmissions < 2 || opts.transmissions > kMaxTransmissions)
        throw std::invalid_argument("transmissions must be 2 or 3");
    if (opts.directed != g.directed())
        throw std::invalid_argument(g.directed()
                                        ? "graph is directed; set ExfOptions.directed"
                                        : "directed enumeration requires a directed graph");
}

double entropy_of_masses(const Graph& g, NodeId seed, const ExfOptions& opts,
                         const std::vector<double>* boundary) {
    check_options(g, seed, opts);
    double mass_total = 0.0;
    double mass_log = 0.0;
    Enumerator en{g, boundary, opts.weighted, opts.transmissions};
    en.run(seed, [&](const Enumerator& state, double weight) {
        const double q = weight * state.cluster_degree();
        if (q <= 0.0) return;  // zero-degree clusters carry no mass
        mass_total += q;
        mass_log += q * std::log(q);
    });
    if (mass_total <= 0.0) return 0.0;
    return std::log(mass_total) - mass_log / mass_total;
}

}  // namespace

std::vector<TransmissionCluster> enumerate_clusters(const Graph& g, NodeId seed,
                                                    const ExfOptions& opts) {
    check_options(g, seed, opts);
    std::vector<TransmissionCluster> out;
    Enumerator en{g, nullptr, opts.weighted, opts.transmissions};
    en.run(seed, [&](const Enumerator& state, double weight) {
        TransmissionCluster c;
        c.nodes.assign(state.cluster.begin(), state.cluster.begin() + state.size);
        c.sequence.assign(state.sequence.begin(), state.sequence.begin() + state.x);
        c.weight = weight;
        c.out_degree = state.cluster_degree();
        out.push_back(std::move(c));
    });
    return out;
}

double expected_force(const Graph& g, NodeId seed, const ExfOptions& opts) {
    return entropy_of_masses(g, seed, opts, nullptr);
}

double expected_force(const Ball& b, const ExfOptions& opts) {
    return entropy_of_masses(b.subgraph, b.center, opts, &b.boundary_degree);
}

double expected_force_modified(const Graph& g, NodeId seed, const ExfOptions& opts) {
    if (!(opts.alpha > 1.0))
        throw std::invalid_argument("expected_force_modified: alpha must be > 1");
    if (seed >= g.node_count()) throw std::invalid_argument("invalid seed node id");
    const auto deg = g.degree(seed);
    if (deg == 0) return 0.0;
    return std::log(opts.alpha * static_cast<double>(deg)) * expected_force(g, seed, opts);
}

std::vector<double> exf_all(const Graph& g, const ExfOptions& opts, std::size_t threads) {
    std::vector<double> scores(g.node_count(), 0.0);
    parallel_for(g.node_count(), threads, [&](std::size_t i) {
        scores[i] = expected_force(g, static_cast<NodeId>(i), opts);
    });
    return scores;
}

}  // namespace exforce
