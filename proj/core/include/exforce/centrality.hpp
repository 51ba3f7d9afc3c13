#pragma once

#include <string>
#include <vector>

#include "exforce/graph.hpp"

namespace exforce {

/// One metric evaluated for every node.
struct NodeScores {
    std::string metric;
    std::vector<double> values;
};

/// Core decomposition: each node's score is the largest k such that it
/// survives iterative removal of all nodes with degree <= k. Edge weights are
/// ignored. Undirected graphs only.
std::vector<int> k_shell(const Graph& g);

/// Dominant adjacency eigenvector by power iteration, nonnegative and
/// normalized to max 1. Edge weights are ignored. Requires a connected
/// undirected graph; throws std::runtime_error (with the current iterate's
/// eigenvalue estimate) on non-convergence.
std::vector<double> eigenvector_centrality(const Graph& g, double tol = 1e-10,
                                           int max_iter = 100000);

}  // namespace exforce
