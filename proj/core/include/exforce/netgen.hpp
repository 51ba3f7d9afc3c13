#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "exforce/graph.hpp"
#include "exforce/rng.hpp"

namespace exforce {

/// Degree model a network family is generated from.
struct DegreeSpec {
    enum class Kind { Pareto, Sampled };

    Kind kind = Kind::Pareto;
    double pareto_scale = 1.0;
    double pareto_shape = 2.3;
    std::vector<int> degree_pool;  // Sampled: values drawn without replacement
    std::size_t n = 1000;          // target node count
};

/// Random graph with expected degrees `weights`: edge (i,j) appears
/// independently with probability min(1, w_i w_j / sum(w)). No trimming.
Graph chung_lu_from_weights(std::span<const double> weights, RngStream& rng);

struct GeneratedGraph {
    Graph graph;
    std::size_t requested_n = 0;
    std::size_t generated_n = 0;  // nodes drawn before extracting the component
    int attempts = 0;
};

/// Chung-Lu graph with Pareto expected degrees, returned as its giant
/// component. The raw node count is inflated adaptively and draws repeat
/// until the component size lands within 5% of the target; throws
/// std::runtime_error when 100 attempts miss the band.
GeneratedGraph chung_lu(const DegreeSpec& spec, RngStream& rng);

/// Connected simple graph with exactly the given degrees: configuration-model
/// stub matching repaired and randomized by degree-preserving double-edge
/// swaps, then connected by cross-component swaps. Throws std::runtime_error
/// when the sequence resists simple realization within the retry budget and
/// std::invalid_argument when it is not graphical.
Graph graph_from_degrees(std::span<const int> degrees, RngStream& rng);

/// Samples spec.n degrees from the pool without replacement (resampling on
/// odd parity or a non-graphical draw) and realizes them via
/// graph_from_degrees.
Graph degree_sequence_graph(const DegreeSpec& spec, RngStream& rng);

/// Erdos-Gallai graphicality test.
bool is_graphical(std::span<const int> degrees);

/// Pareto(scale, shape) variate by inverse CDF.
double pareto_sample(double scale, double shape, RngStream& rng);

}  // namespace exforce
