#include "exforce/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "power_iteration.hpp"

namespace exforce {

namespace {

std::uint64_t edge_key(NodeId u, NodeId v) {
    return (static_cast<std::uint64_t>(u) << 32) | v;
}

void build_csr(std::size_t n, std::span<const EdgeTuple> arcs, std::vector<std::size_t>& offsets,
               std::vector<Edge>& adj, bool by_source) {
    offsets.assign(n + 1, 0);
    for (const auto& [u, v, w] : arcs) offsets[(by_source ? u : v) + 1]++;
    for (std::size_t i = 0; i < n; ++i) offsets[i + 1] += offsets[i];
    adj.resize(arcs.size());
    std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
    for (const auto& [u, v, w] : arcs) {
        if (by_source)
            adj[cursor[u]++] = Edge{v, w};
        else
            adj[cursor[v]++] = Edge{u, w};
    }
    for (std::size_t i = 0; i < n; ++i)
        std::sort(adj.begin() + static_cast<std::ptrdiff_t>(offsets[i]),
                  adj.begin() + static_cast<std::ptrdiff_t>(offsets[i + 1]),
                  [](const Edge& a, const Edge& b) { return a.to < b.to; });
}

}  // namespace

Graph Graph::from_edges(std::size_t node_count, std::span<const EdgeTuple> edges, bool directed,
                        std::vector<std::string> labels) {
    if (!labels.empty() && labels.size() != node_count)
        throw std::invalid_argument("label count does not match node count");

    std::unordered_set<std::uint64_t> seen;
    seen.reserve(edges.size() * 2);
    for (const auto& [u, v, w] : edges) {
        if (u >= node_count || v >= node_count)
            throw std::invalid_argument("edge endpoint out of range");
        if (u == v) throw std::invalid_argument("self-loop rejected");
        if (!(w > 0.0)) throw std::invalid_argument("edge weight must be positive");
        const std::uint64_t key = directed ? edge_key(u, v) : edge_key(std::min(u, v), std::max(u, v));
        if (!seen.insert(key).second) throw std::invalid_argument("duplicate edge rejected");
    }

    Graph g;
    g.directed_ = directed;
    g.edge_count_ = edges.size();
    g.labels_ = std::move(labels);

    if (directed) {
        build_csr(node_count, edges, g.offsets_, g.adj_, true);
        build_csr(node_count, edges, g.in_offsets_, g.in_adj_, false);
    } else {
        std::vector<EdgeTuple> sym;
        sym.reserve(edges.size() * 2);
        for (const auto& [u, v, w] : edges) {
            sym.emplace_back(u, v, w);
            sym.emplace_back(v, u, w);
        }
        build_csr(node_count, sym, g.offsets_, g.adj_, true);
    }

    g.weighted_degree_.resize(node_count, 0.0);
    for (NodeId u = 0; u < node_count; ++u) {
        double sum = 0.0;
        for (const Edge& e : g.neighbors(u)) sum += e.weight;
        g.weighted_degree_[u] = sum;
    }
    return g;
}

bool Graph::has_edge(NodeId u, NodeId v) const {
    const auto nb = neighbors(u);
    const auto it = std::lower_bound(nb.begin(), nb.end(), v,
                                     [](const Edge& e, NodeId id) { return e.to < id; });
    return it != nb.end() && it->to == v;
}

double Graph::edge_weight(NodeId u, NodeId v) const {
    const auto nb = neighbors(u);
    const auto it = std::lower_bound(nb.begin(), nb.end(), v,
                                     [](const Edge& e, NodeId id) { return e.to < id; });
    return (it != nb.end() && it->to == v) ? it->weight : 0.0;
}

std::size_t Graph::max_degree() const {
    std::size_t best = 0;
    for (NodeId u = 0; u < node_count(); ++u) best = std::max(best, degree(u));
    return best;
}

std::string Graph::label(NodeId u) const {
    if (u < labels_.size()) return labels_[u];
    return std::to_string(u);
}

std::vector<EdgeTuple> Graph::edges() const {
    std::vector<EdgeTuple> out;
    out.reserve(edge_count_);
    for (NodeId u = 0; u < node_count(); ++u)
        for (const Edge& e : neighbors(u))
            if (directed_ || u < e.to) out.emplace_back(u, e.to, e.weight);
    return out;
}

LoadResult load_edge_list(std::istream& in, const LoadOptions& options) {
    std::unordered_map<std::string, NodeId> ids;
    std::vector<std::string> labels;
    std::vector<EdgeTuple> edges;
    std::unordered_set<std::uint64_t> seen;
    std::size_t self_loops = 0;
    std::size_t duplicates = 0;

    auto intern = [&](const std::string& token) -> NodeId {
        auto [it, inserted] = ids.emplace(token, static_cast<NodeId>(labels.size()));
        if (inserted) labels.push_back(token);
        return it->second;
    };

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ss(line);
        std::string a, b, c, extra;
        if (!(ss >> a)) continue;        // blank line
        if (a.front() == '#') continue;  // comment
        if (!(ss >> b))
            throw std::invalid_argument("line " + std::to_string(line_no) +
                                        ": expected \"u v\" or \"u v w\"");
        const bool has_third = static_cast<bool>(ss >> c);
        if (has_third && (ss >> extra))
            throw std::invalid_argument("line " + std::to_string(line_no) + ": too many fields");

        double w = 1.0;
        if (options.weighted && has_third) {
            std::size_t pos = 0;
            try {
                w = std::stod(c, &pos);
            } catch (const std::exception&) {
                pos = 0;
            }
            if (pos != c.size())
                throw std::invalid_argument("line " + std::to_string(line_no) +
                                            ": weight \"" + c + "\" is not a number");
            if (!(w > 0.0) || !std::isfinite(w))
                throw std::invalid_argument("line " + std::to_string(line_no) +
                                            ": weight must be a positive real");
        }

        const NodeId u = intern(a);
        const NodeId v = intern(b);
        if (u == v) {
            ++self_loops;
            continue;
        }
        const std::uint64_t key = options.directed
                                      ? (static_cast<std::uint64_t>(u) << 32 | v)
                                      : (static_cast<std::uint64_t>(std::min(u, v)) << 32 |
                                         std::max(u, v));
        if (!seen.insert(key).second) {
            ++duplicates;  // keep the first occurrence
            continue;
        }
        edges.emplace_back(u, v, w);
    }

    if (edges.empty()) throw std::invalid_argument("edge list is empty");

    LoadResult result;
    const std::size_t node_count = labels.size();
    result.graph = Graph::from_edges(node_count, edges, options.directed, std::move(labels));
    result.self_loops_dropped = self_loops;
    result.duplicates_dropped = duplicates;
    return result;
}

LoadResult load_edge_list_file(const std::string& path, const LoadOptions& options) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open edge list: " + path);
    return load_edge_list(in, options);
}

namespace {

/// Component labels under weak connectivity; returns component count.
std::size_t weak_components(const Graph& g, std::vector<std::uint32_t>& comp) {
    const std::size_t n = g.node_count();
    comp.assign(n, UINT32_MAX);
    std::uint32_t next = 0;
    std::vector<NodeId> stack;
    for (NodeId s = 0; s < n; ++s) {
        if (comp[s] != UINT32_MAX) continue;
        comp[s] = next;
        stack.push_back(s);
        while (!stack.empty()) {
            const NodeId u = stack.back();
            stack.pop_back();
            for (const Edge& e : g.neighbors(u))
                if (comp[e.to] == UINT32_MAX) {
                    comp[e.to] = next;
                    stack.push_back(e.to);
                }
            if (g.directed())
                for (const Edge& e : g.in_neighbors(u))
                    if (comp[e.to] == UINT32_MAX) {
                        comp[e.to] = next;
                        stack.push_back(e.to);
                    }
        }
        ++next;
    }
    return next;
}

Graph induced_subgraph(const Graph& g, const std::vector<NodeId>& keep /* ascending */) {
    std::unordered_map<NodeId, NodeId> to_new;
    to_new.reserve(keep.size());
    for (NodeId i = 0; i < keep.size(); ++i) to_new.emplace(keep[i], i);

    std::vector<EdgeTuple> edges;
    for (NodeId i = 0; i < keep.size(); ++i) {
        for (const Edge& e : g.neighbors(keep[i])) {
            const auto it = to_new.find(e.to);
            if (it == to_new.end()) continue;
            if (g.directed() || i < it->second) edges.emplace_back(i, it->second, e.weight);
        }
    }
    std::vector<std::string> labels;
    if (g.has_labels()) {
        labels.reserve(keep.size());
        for (const NodeId old : keep) labels.push_back(g.label(old));
    }
    return Graph::from_edges(keep.size(), edges, g.directed(), std::move(labels));
}

}  // namespace

Graph giant_component(const Graph& g) {
    if (g.node_count() == 0) throw std::invalid_argument("giant_component: empty graph");
    std::vector<std::uint32_t> comp;
    const std::size_t count = weak_components(g, comp);
    if (count == 1) return g;

    std::vector<std::size_t> size(count, 0);
    for (const auto c : comp) ++size[c];
    // components are numbered in order of their smallest node id, so the
    // first maximum also wins ties by smallest original id
    std::size_t best = 0;
    for (std::size_t c = 1; c < count; ++c)
        if (size[c] > size[best]) best = c;

    std::vector<NodeId> keep;
    keep.reserve(size[best]);
    for (NodeId u = 0; u < g.node_count(); ++u)
        if (comp[u] == best) keep.push_back(u);
    return induced_subgraph(g, keep);
}

bool is_connected(const Graph& g) {
    if (g.node_count() == 0) return false;
    std::vector<std::uint32_t> comp;
    return weak_components(g, comp) == 1;
}

Ball ball(const Graph& g, NodeId center, int radius) {
    if (center >= g.node_count()) throw std::invalid_argument("ball: invalid center node");
    if (radius < 1) throw std::invalid_argument("ball: radius must be >= 1");

    std::vector<int> dist(g.node_count(), -1);
    std::queue<NodeId> queue;
    dist[center] = 0;
    queue.push(center);
    std::vector<NodeId> members{center};
    while (!queue.empty()) {
        const NodeId u = queue.front();
        queue.pop();
        if (dist[u] == radius) continue;
        for (const Edge& e : g.neighbors(u))
            if (dist[e.to] < 0) {
                dist[e.to] = dist[u] + 1;
                members.push_back(e.to);
                queue.push(e.to);
            }
    }
    std::sort(members.begin(), members.end());

    Ball b;
    b.radius = radius;
    b.subgraph = induced_subgraph(g, members);
    b.parent_ids = members;
    b.center = static_cast<NodeId>(
        std::lower_bound(members.begin(), members.end(), center) - members.begin());
    b.boundary_degree.resize(members.size());
    for (NodeId i = 0; i < members.size(); ++i)
        b.boundary_degree[i] = g.weighted_degree(members[i]) - b.subgraph.weighted_degree(i);
    return b;
}

namespace detail {

PowerIterationResult power_iteration(const Graph& g, double tol, int max_iter) {
    const std::size_t n = g.node_count();
    PowerIterationResult res;
    res.vector.assign(n, 1.0);
    if (n == 0) return res;

    std::vector<double> next(n, 0.0);
    for (int iter = 1; iter <= max_iter; ++iter) {
        double rayleigh_num = 0.0;
        double rayleigh_den = 0.0;
        for (NodeId u = 0; u < n; ++u) {
            double acc = 0.0;
            for (const Edge& e : g.neighbors(u)) acc += res.vector[e.to];
            rayleigh_num += res.vector[u] * acc;
            rayleigh_den += res.vector[u] * res.vector[u];
            next[u] = acc + res.vector[u];  // shifted operator A + I
        }
        res.lambda = rayleigh_num / rayleigh_den;
        res.iterations = iter;

        double maxval = 0.0;
        for (const double v : next) maxval = std::max(maxval, v);
        if (maxval == 0.0) {  // isolated node(s) only; keep the flat vector
            res.converged = true;
            return res;
        }
        double delta = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            next[i] /= maxval;
            delta = std::max(delta, std::abs(next[i] - res.vector[i]));
        }
        res.vector.swap(next);
        if (delta < tol) {
            res.converged = true;
            return res;
        }
    }
    return res;
}

}  // namespace detail

double largest_eigenvalue(const Graph& g, double tol, int max_iter) {
    if (g.node_count() == 0) throw std::invalid_argument("largest_eigenvalue: empty graph");
    if (g.directed()) throw std::invalid_argument("largest_eigenvalue: undirected graphs only");
    if (!is_connected(g)) throw std::invalid_argument("largest_eigenvalue: graph is disconnected");
    const auto res = detail::power_iteration(g, tol, max_iter);
    if (!res.converged)
        throw std::runtime_error("largest_eigenvalue: no convergence within " +
                                 std::to_string(max_iter) + " iterations (last estimate " +
                                 std::to_string(res.lambda) + ")");
    return res.lambda;
}

GraphSummary summarize(const Graph& g) {
    GraphSummary s;
    s.nodes = g.node_count();
    s.edges = g.edge_count();
    s.max_degree = g.max_degree();
    s.lambda = largest_eigenvalue(g);
    return s;
}

}  // namespace exforce
