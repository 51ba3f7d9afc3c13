#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "exforce/graph.hpp"

namespace exforce {

/// Parameters of the expected-force metric.
struct ExfOptions {
    int transmissions = 2;  // x, the number of transmission events; 2 or 3
    bool weighted = false;  // weight clusters by edge-weight products
    bool directed = false;  // restrict transmissions to out-edges
    double alpha = 2.0;     // degree rescale of the modified metric, must be > 1
};

/// One ordered x-transmission cluster grown from a seed: the infected node
/// set, the transmission edges in order, the sequence weight (1 when
/// unweighted, the product of the edge weights otherwise), and the cluster
/// degree: the count (or weight sum) of edges from cluster nodes to the
/// outside.
struct TransmissionCluster {
    std::vector<NodeId> nodes;  // seed first, then in infection order
    std::vector<std::pair<NodeId, NodeId>> sequence;
    double weight = 1.0;
    double out_degree = 0.0;
};

/// Enumerates every ordered sequence of x transmission events starting from
/// {seed}: step k infects the susceptible endpoint of any edge leaving the
/// current cluster. Seeds whose component is exhausted early yield fewer (or
/// zero) entries.
std::vector<TransmissionCluster> enumerate_clusters(const Graph& g, NodeId seed,
                                                    const ExfOptions& opts = {});

/// Expected force of a seed node: the entropy -sum(m_j ln m_j) of the
/// normalized cluster-degree masses m_j = w_j*d_j / sum_k(w_k*d_k) over all
/// enumerated clusters, with 0 ln 0 = 0. Returns 0 when no cluster has
/// outward edges (the seed exerts no further force).
double expected_force(const Graph& g, NodeId seed, const ExfOptions& opts = {});

/// Expected force evaluated on a ball around its center. Edges that leave the
/// ball enter cluster degrees through the ball's boundary weights, so a ball
/// of radius x (or larger) reproduces the full-graph value exactly.
double expected_force(const Ball& b, const ExfOptions& opts = {});

/// Degree-corrected variant ln(alpha * deg(seed)) * expected_force(seed);
/// zero for isolated seeds. Throws std::invalid_argument unless alpha > 1.
double expected_force_modified(const Graph& g, NodeId seed, const ExfOptions& opts = {});

/// Expected force of every node; identical to node-by-node calls regardless
/// of the worker count.
std::vector<double> exf_all(const Graph& g, const ExfOptions& opts = {},
                            std::size_t threads = 0);

}  // namespace exforce
