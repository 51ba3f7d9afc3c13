#pragma once

#include <cstddef>
#include <vector>

#include "exforce/graph.hpp"

namespace exforce::detail {

struct PowerIterationResult {
    std::vector<double> vector;  // max-norm 1, nonnegative
    double lambda = 0.0;         // Rayleigh quotient of the adjacency operator
    int iterations = 0;
    bool converged = false;
};

/// Power iteration on (A + I) with an all-ones start. The shift keeps the
/// iteration from oscillating on bipartite graphs and leaves eigenvectors
/// unchanged; lambda reports the eigenvalue of A itself. Edge weights are
/// ignored (unweighted adjacency operator).
PowerIterationResult power_iteration(const Graph& g, double tol, int max_iter);

}  // namespace exforce::detail
