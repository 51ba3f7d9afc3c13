#include "exforce/centrality.hpp"

#include <algorithm>
#include <stdexcept>

#include "power_iteration.hpp"

namespace exforce {

// Batagelj-Zaversnik bucket peeling, O(V + E).
std::vector<int> k_shell(const Graph& g) {
    if (g.directed()) throw std::invalid_argument("k_shell: undirected graphs only");
    const std::size_t n = g.node_count();
    std::vector<std::size_t> deg(n);
    std::size_t max_deg = 0;
    for (NodeId u = 0; u < n; ++u) {
        deg[u] = g.degree(u);
        max_deg = std::max(max_deg, deg[u]);
    }

    // nodes sorted by degree, with bucket starts and per-node positions
    std::vector<std::size_t> bucket_start(max_deg + 2, 0);
    for (NodeId u = 0; u < n; ++u) ++bucket_start[deg[u] + 1];
    for (std::size_t d = 1; d < bucket_start.size(); ++d) bucket_start[d] += bucket_start[d - 1];
    std::vector<NodeId> order(n);
    std::vector<std::size_t> pos(n);
    {
        std::vector<std::size_t> cursor(bucket_start.begin(), bucket_start.end() - 1);
        for (NodeId u = 0; u < n; ++u) {
            pos[u] = cursor[deg[u]]++;
            order[pos[u]] = u;
        }
    }

    std::vector<int> shell(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const NodeId u = order[i];
        shell[u] = static_cast<int>(deg[u]);
        for (const Edge& e : g.neighbors(u)) {
            const NodeId v = e.to;
            if (deg[v] <= deg[u]) continue;
            // move v to the front of its bucket, then shift it one bucket down
            const std::size_t swap_pos = bucket_start[deg[v]];
            const NodeId swapped = order[swap_pos];
            std::swap(order[pos[v]], order[swap_pos]);
            std::swap(pos[v], pos[swapped]);
            ++bucket_start[deg[v]];
            --deg[v];
        }
    }
    return shell;
}

std::vector<double> eigenvector_centrality(const Graph& g, double tol, int max_iter) {
    if (g.node_count() == 0) throw std::invalid_argument("eigenvector_centrality: empty graph");
    if (g.directed())
        throw std::invalid_argument("eigenvector_centrality: undirected graphs only");
    if (!is_connected(g))
        throw std::invalid_argument(
            "eigenvector_centrality: graph is disconnected; extract the giant component first");
    auto res = detail::power_iteration(g, tol, max_iter);
    if (!res.converged)
        throw std::runtime_error("eigenvector_centrality: no convergence within " +
                                 std::to_string(max_iter) + " iterations (lambda estimate " +
                                 std::to_string(res.lambda) + ")");
    return std::move(res.vector);
}

}  // namespace exforce
