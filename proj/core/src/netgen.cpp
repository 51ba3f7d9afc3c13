#include "exforce/netgen.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace exforce {

namespace {

std::uint64_t pair_key(NodeId u, NodeId v) {
    if (u > v) std::swap(u, v);
    return (static_cast<std::uint64_t>(u) << 32) | v;
}

/// Multiset of undirected edges with O(1) membership counts.
struct EdgeSoup {
    std::vector<std::pair<NodeId, NodeId>> edges;
    std::unordered_map<std::uint64_t, int> count;

    void add(NodeId u, NodeId v) {
        edges.emplace_back(u, v);
        ++count[pair_key(u, v)];
    }

    int multiplicity(NodeId u, NodeId v) const {
        const auto it = count.find(pair_key(u, v));
        return it == count.end() ? 0 : it->second;
    }

    bool bad(std::size_t i) const {
        const auto [u, v] = edges[i];
        return u == v || multiplicity(u, v) > 1;
    }

    /// Rewires edges i and j to (a,d),(c,b) or (a,c),(b,d); returns false and
    /// leaves the soup unchanged if the result would not be simple.
    bool swap_pair(std::size_t i, std::size_t j, bool crossed) {
        auto [a, b] = edges[i];
        auto [c, d] = edges[j];
        if (crossed) std::swap(c, d);
        // proposed: (a, d), (c, b)
        if (a == d || c == b) return false;
        const auto k1 = pair_key(a, d);
        const auto k2 = pair_key(c, b);
        if (k1 == k2) return false;
        const auto old1 = pair_key(a, b);
        const auto old2 = pair_key(c, d);
        if (count[k1] + (k1 == old1 ? -1 : 0) + (k1 == old2 ? -1 : 0) > 0) return false;
        if (count[k2] + (k2 == old1 ? -1 : 0) + (k2 == old2 ? -1 : 0) > 0) return false;
        remove_key(old1);
        remove_key(old2);
        edges[i] = {a, d};
        edges[j] = {c, b};
        ++count[k1];
        ++count[k2];
        return true;
    }

    void remove_key(std::uint64_t k) {
        auto it = count.find(k);
        if (it != count.end() && --it->second == 0) count.erase(it);
    }
};

#ifndef NDEBUG
std::vector<int> soup_degrees(const EdgeSoup& soup, std::size_t n) {
    std::vector<int> deg(n, 0);
    for (const auto& [u, v] : soup.edges) {
        ++deg[u];
        ++deg[v];
    }
    return deg;
}
#endif

}  // namespace

double pareto_sample(double scale, double shape, RngStream& rng) {
    const double u = 1.0 - rng.uniform();  // (0, 1]
    return scale * std::pow(u, -1.0 / shape);
}

Graph chung_lu_from_weights(std::span<const double> weights, RngStream& rng) {
    const std::size_t n = weights.size();
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(total > 0.0)) throw std::invalid_argument("chung_lu: weights must be positive");

    std::vector<EdgeTuple> edges;
    edges.reserve(static_cast<std::size_t>(total));
    for (NodeId i = 0; i < n; ++i)
        for (NodeId j = i + 1; j < n; ++j) {
            const double p = std::min(1.0, weights[i] * weights[j] / total);
            if (rng.bernoulli(p)) edges.emplace_back(i, j, 1.0);
        }
    return Graph::from_edges(n, edges, false);
}

GeneratedGraph chung_lu(const DegreeSpec& spec, RngStream& rng) {
    if (spec.kind != DegreeSpec::Kind::Pareto)
        throw std::invalid_argument("chung_lu: Pareto degree spec required");
    const std::size_t target = spec.n;
    if (target < 10) throw std::invalid_argument("chung_lu: target size too small");
    const auto lo = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(target)));
    const auto hi = static_cast<std::size_t>(std::floor(1.05 * static_cast<double>(target)));

    // the first draw is an oversized pilot that measures the realized
    // giant-component fraction; later draws re-anchor on the freshest
    // measurement so acceptance clips the size distribution symmetrically
    // (a fixed misjudged inflation would skew accepted graphs toward draws
    // whose component runs large, i.e. toward heavy hubs)
    double keep_ratio = 0.0;
    for (int attempt = 1; attempt <= 100; ++attempt) {
        const auto raw_n =
            keep_ratio > 0.0
                ? static_cast<std::size_t>(
                      std::clamp(std::lround(static_cast<double>(target) / keep_ratio),
                                 static_cast<long>(target), static_cast<long>(20 * target)))
                : 2 * target;
        std::vector<double> w(raw_n);
        for (double& x : w) x = pareto_sample(spec.pareto_scale, spec.pareto_shape, rng);
        const Graph raw = chung_lu_from_weights(w, rng);
        const Graph gc = giant_component(raw);
        keep_ratio = std::clamp(
            static_cast<double>(gc.node_count()) / static_cast<double>(raw_n), 0.05, 1.0);
        if (gc.node_count() >= lo && gc.node_count() <= hi)
            return GeneratedGraph{gc, target, raw_n, attempt};
    }
    throw std::runtime_error("chung_lu: giant component missed the size band in 100 attempts");
}

bool is_graphical(std::span<const int> degrees) {
    const std::size_t n = degrees.size();
    std::vector<long long> d(degrees.begin(), degrees.end());
    for (const long long x : d)
        if (x < 0 || x >= static_cast<long long>(n)) return false;
    std::sort(d.begin(), d.end(), std::greater<>());
    if (std::accumulate(d.begin(), d.end(), 0LL) % 2 != 0) return false;

    std::vector<long long> prefix(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + d[i];
    for (std::size_t k = 1; k <= n; ++k) {
        // first index past k-1 with degree < k (d is non-increasing)
        const auto it = std::lower_bound(d.begin() + static_cast<std::ptrdiff_t>(k), d.end(),
                                         static_cast<long long>(k), std::greater_equal<>());
        const auto m = static_cast<std::size_t>(it - d.begin());
        const long long capped = static_cast<long long>(m - k) * static_cast<long long>(k) +
                                 (prefix[n] - prefix[m]);
        if (prefix[k] > static_cast<long long>(k * (k - 1)) + capped) return false;
    }
    return true;
}

Graph graph_from_degrees(std::span<const int> degrees, RngStream& rng) {
    const std::size_t n = degrees.size();
    if (n < 2) throw std::invalid_argument("graph_from_degrees: need at least two nodes");
    for (const int d : degrees)
        if (d < 1) throw std::invalid_argument("graph_from_degrees: degrees must be >= 1");
    if (!is_graphical(degrees))
        throw std::invalid_argument("graph_from_degrees: sequence is not graphical");

    std::vector<NodeId> stubs;
    for (NodeId v = 0; v < n; ++v)
        stubs.insert(stubs.end(), static_cast<std::size_t>(degrees[v]), v);
    const std::size_t m = stubs.size() / 2;
    if (m < n - 1)
        throw std::invalid_argument(
            "graph_from_degrees: too few edges for a connected realization");

    for (int restart = 0; restart < 50; ++restart) {
        std::shuffle(stubs.begin(), stubs.end(), rng.engine());
        EdgeSoup soup;
        for (std::size_t i = 0; i < m; ++i) soup.add(stubs[2 * i], stubs[2 * i + 1]);

        // repair self-loops and parallel edges with double-edge swaps; a swap
        // only changes the two edges it touches, so a recheck worklist covers
        // every instance that can turn good or bad
        std::vector<std::size_t> recheck;
        for (std::size_t i = 0; i < soup.edges.size(); ++i)
            if (soup.bad(i)) recheck.push_back(i);
        bool clean = true;
        std::uint64_t attempts = 200 * m + 200;
        while (!recheck.empty()) {
            const std::size_t i = recheck.back();
            if (!soup.bad(i)) {
                recheck.pop_back();
                continue;
            }
            if (attempts-- == 0) {
                clean = false;
                break;
            }
            const std::size_t partner = static_cast<std::size_t>(rng.below(soup.edges.size()));
            if (partner == i) continue;
            if (soup.swap_pair(i, partner, rng.bernoulli(0.5))) recheck.push_back(partner);
        }
        if (!clean) continue;

#ifndef NDEBUG
        const std::vector<int> want(degrees.begin(), degrees.end());
        assert(soup_degrees(soup, n) == want);
#endif

        // randomize: degree-preserving swap budget of 20x edge count
        for (std::uint64_t s = 0; s < 20 * m; ++s) {
            const auto i = static_cast<std::size_t>(rng.below(soup.edges.size()));
            const auto j = static_cast<std::size_t>(rng.below(soup.edges.size()));
            if (i == j) continue;
            soup.swap_pair(i, j, rng.bernoulli(0.5));
        }

        // connect components: swap a cycle edge (its component stays whole)
        // against any edge of another component, which merges them while
        // preserving every degree. m >= n-1 guarantees some component has a
        // cycle whenever more than one component exists.
        bool connect_failed = false;
        for (;;) {
            std::vector<std::uint32_t> comp(n, UINT32_MAX);
            std::vector<std::vector<std::size_t>> incident(n);  // edge indices
            for (std::size_t i = 0; i < soup.edges.size(); ++i) {
                incident[soup.edges[i].first].push_back(i);
                incident[soup.edges[i].second].push_back(i);
            }
            std::uint32_t ncomp = 0;
            std::vector<NodeId> stack;
            for (NodeId s = 0; s < n; ++s) {
                if (comp[s] != UINT32_MAX) continue;
                comp[s] = ncomp;
                stack.push_back(s);
                while (!stack.empty()) {
                    const NodeId u = stack.back();
                    stack.pop_back();
                    for (const std::size_t ei : incident[u]) {
                        const auto [a, b] = soup.edges[ei];
                        const NodeId v = a == u ? b : a;
                        if (comp[v] == UINT32_MAX) {
                            comp[v] = ncomp;
                            stack.push_back(v);
                        }
                    }
                }
                ++ncomp;
            }
            if (ncomp == 1) break;

            // DFS for a back edge in any component; that edge lies on a cycle
            std::size_t cycle_edge = soup.edges.size();
            {
                std::vector<char> visited(n, 0);
                std::vector<std::size_t> via(n, SIZE_MAX);  // tree edge into node
                for (NodeId s = 0; s < n && cycle_edge == soup.edges.size(); ++s) {
                    if (visited[s]) continue;
                    std::vector<NodeId> dfs{s};
                    visited[s] = 1;
                    while (!dfs.empty() && cycle_edge == soup.edges.size()) {
                        const NodeId u = dfs.back();
                        dfs.pop_back();
                        for (const std::size_t ei : incident[u]) {
                            if (ei == via[u]) continue;
                            const auto [a, b] = soup.edges[ei];
                            const NodeId v = a == u ? b : a;
                            if (visited[v]) {
                                cycle_edge = ei;
                                break;
                            }
                            visited[v] = 1;
                            via[v] = ei;
                            dfs.push_back(v);
                        }
                    }
                }
            }
            if (cycle_edge == soup.edges.size()) {
                connect_failed = true;  // all components are trees
                break;
            }
            const auto cycle_comp = comp[soup.edges[cycle_edge].first];
            std::size_t other = soup.edges.size();
            for (std::size_t i = 0; i < soup.edges.size(); ++i)
                if (comp[soup.edges[i].first] != cycle_comp) {
                    other = i;
                    break;
                }
            if (other == soup.edges.size() ||
                (!soup.swap_pair(cycle_edge, other, false) &&
                 !soup.swap_pair(cycle_edge, other, true))) {
                connect_failed = true;
                break;
            }
        }
        if (connect_failed) continue;

#ifndef NDEBUG
        assert(soup_degrees(soup, n) == want);
#endif

        std::vector<EdgeTuple> edges;
        edges.reserve(soup.edges.size());
        bool connected_ok = true;
        {
            std::vector<std::uint32_t> comp(n, UINT32_MAX);
            // quick reachability from node 0 over the final soup
            std::vector<std::vector<NodeId>> adj(n);
            for (const auto& [u, v] : soup.edges) {
                adj[u].push_back(v);
                adj[v].push_back(u);
            }
            std::vector<NodeId> stack{0};
            comp[0] = 0;
            std::size_t seen = 1;
            while (!stack.empty()) {
                const NodeId u = stack.back();
                stack.pop_back();
                for (const NodeId v : adj[u])
                    if (comp[v] == UINT32_MAX) {
                        comp[v] = 0;
                        ++seen;
                        stack.push_back(v);
                    }
            }
            connected_ok = seen == n;
        }
        if (!connected_ok) continue;
        for (const auto& [u, v] : soup.edges) edges.emplace_back(u, v, 1.0);
        return Graph::from_edges(n, edges, false);
    }
    throw std::runtime_error("graph_from_degrees: no simple connected realization found");
}

Graph degree_sequence_graph(const DegreeSpec& spec, RngStream& rng) {
    if (spec.kind != DegreeSpec::Kind::Sampled)
        throw std::invalid_argument("degree_sequence_graph: Sampled degree spec required");
    const auto& pool = spec.degree_pool;
    if (spec.n > pool.size())
        throw std::invalid_argument("degree_sequence_graph: target exceeds pool size");
    for (const int d : pool)
        if (d < 1) throw std::invalid_argument("degree_sequence_graph: pool degrees must be >= 1");

    for (int retry = 0; retry < 100; ++retry) {
        // sample without replacement via partial Fisher-Yates
        std::vector<int> shuffled = pool;
        for (std::size_t i = 0; i < spec.n; ++i) {
            const auto j = i + static_cast<std::size_t>(rng.below(shuffled.size() - i));
            std::swap(shuffled[i], shuffled[j]);
        }
        std::vector<int> sample(shuffled.begin(),
                                shuffled.begin() + static_cast<std::ptrdiff_t>(spec.n));

        long long sum = std::accumulate(sample.begin(), sample.end(), 0LL);
        if (sum % 2 != 0) {
            if (spec.n == pool.size())
                throw std::invalid_argument(
                    "degree_sequence_graph: full pool has odd degree sum");
            // resample one value from the remainder to fix parity
            bool fixed = false;
            for (int tries = 0; tries < 100 && !fixed; ++tries) {
                const auto pos = static_cast<std::size_t>(rng.below(spec.n));
                const auto repl =
                    spec.n + static_cast<std::size_t>(rng.below(shuffled.size() - spec.n));
                if ((shuffled[repl] - sample[pos]) % 2 != 0) {
                    std::swap(sample[pos], shuffled[repl]);
                    fixed = true;
                }
            }
            if (!fixed) continue;
        }
        if (!is_graphical(sample)) continue;
        const long long final_sum = std::accumulate(sample.begin(), sample.end(), 0LL);
        if (final_sum / 2 < static_cast<long long>(spec.n) - 1) continue;  // cannot connect
        try {
            return graph_from_degrees(sample, rng);
        } catch (const std::runtime_error&) {
            continue;  // resample
        }
    }
    throw std::runtime_error("degree_sequence_graph: no graphical sample within 100 retries");
}

}  // namespace exforce
