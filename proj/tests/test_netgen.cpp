#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <vector>

#include "exforce/netgen.hpp"
#include "test_util.hpp"

using namespace exforce;

namespace {

double mean_degree(const Graph& g) {
    return 2.0 * static_cast<double>(g.edge_count()) / static_cast<double>(g.node_count());
}

std::multiset<int> degree_multiset(const Graph& g) {
    std::multiset<int> out;
    for (NodeId u = 0; u < g.node_count(); ++u) out.insert(static_cast<int>(g.degree(u)));
    return out;
}

}  // namespace

TEST_CASE("constant weights give an Erdos-Renyi graph") {
    RngStream rng(401);
    const std::vector<double> w(2000, 6.0);
    const Graph g = chung_lu_from_weights(w, rng);
    CHECK(mean_degree(g) == doctest::Approx(6.0).epsilon(0.10));
}

TEST_CASE("pareto weights realize the analytic mean degree") {
    RngStream rng(409);
    const double expect = 2.3 / 1.3;  // shape/(shape-1)
    double acc = 0.0;
    for (int i = 0; i < 20; ++i) {
        std::vector<double> w(1000);
        for (double& x : w) x = pareto_sample(1.0, 2.3, rng);
        acc += mean_degree(chung_lu_from_weights(w, rng));
    }
    CHECK(acc / 20.0 == doctest::Approx(expect).epsilon(0.15));
}

TEST_CASE("pareto sampler stays above the scale") {
    RngStream rng(419);
    for (int i = 0; i < 1000; ++i) CHECK(pareto_sample(1.0, 2.3, rng) >= 1.0);
}

TEST_CASE("chung_lu returns a connected component near the target size") {
    DegreeSpec spec;
    spec.n = 500;
    RngStream rng(421);
    const GeneratedGraph gg = chung_lu(spec, rng);
    CHECK(gg.graph.node_count() >= 475);
    CHECK(gg.graph.node_count() <= 525);
    CHECK(is_connected(gg.graph));
    CHECK(gg.attempts >= 1);
    CHECK(gg.generated_n >= gg.graph.node_count());
}

TEST_CASE("chung_lu degree tail follows the pareto exponent") {
    DegreeSpec spec;
    spec.n = 1000;
    RngStream rng(431);
    std::vector<double> degrees;
    for (int rep = 0; rep < 50; ++rep) {
        const GeneratedGraph gg = chung_lu(spec, rng);
        for (NodeId u = 0; u < gg.graph.node_count(); ++u)
            degrees.push_back(static_cast<double>(gg.graph.degree(u)));
    }
    // Hill estimate of the tail's log-log slope. Below the cutoff the curve
    // is bent by Poisson noise around the small weights, so fit from k >= 6.
    const double kmin = 6.0;
    double logsum = 0.0;
    int tail = 0;
    for (const double d : degrees)
        if (d >= kmin) {
            logsum += std::log((d + 0.5) / (kmin - 0.5));
            ++tail;
        }
    REQUIRE(tail >= 500);
    const double slope = static_cast<double>(tail) / logsum;
    CHECK(std::abs(slope - 2.3) <= 0.4);
}

TEST_CASE("graphicality test") {
    CHECK(is_graphical(std::vector<int>{2, 2, 2}));
    CHECK(is_graphical(std::vector<int>{3, 3, 3, 3}));
    CHECK(is_graphical(std::vector<int>{1, 1}));
    CHECK_FALSE(is_graphical(std::vector<int>{3, 1}));
    CHECK_FALSE(is_graphical(std::vector<int>{1, 1, 1}));   // odd sum
    CHECK_FALSE(is_graphical(std::vector<int>{2, 0, 0}));
    CHECK_FALSE(is_graphical(std::vector<int>{4, 4, 1, 1, 1, 1}));
}

TEST_CASE("exact tiny degree sequences") {
    RngStream rng(433);
    const Graph edge = graph_from_degrees(std::vector<int>{1, 1}, rng);
    CHECK(edge.edge_count() == 1);
    const Graph triangle = graph_from_degrees(std::vector<int>{2, 2, 2}, rng);
    CHECK(triangle.edge_count() == 3);
    CHECK(triangle.has_edge(0, 1));
    CHECK(triangle.has_edge(1, 2));
    CHECK(triangle.has_edge(0, 2));
    CHECK_THROWS_AS(graph_from_degrees(std::vector<int>{3, 1}, rng), std::invalid_argument);
    CHECK_THROWS_AS(graph_from_degrees(std::vector<int>{0, 2, 2}, rng), std::invalid_argument);
}

TEST_CASE("degree sequences are realized exactly and connected") {
    RngStream rng(439);
    for (int rep = 0; rep < 10; ++rep) {
        std::vector<int> degrees;
        int sum = 0;
        for (int i = 0; i < 80; ++i) {
            const int d = 1 + static_cast<int>(rng.below(6));
            degrees.push_back(d);
            sum += d;
        }
        if (sum % 2 != 0) {
            ++degrees.back();
        }
        if (!is_graphical(degrees)) continue;
        const Graph g = graph_from_degrees(degrees, rng);
        CHECK(is_connected(g));
        std::multiset<int> want(degrees.begin(), degrees.end());
        CHECK(degree_multiset(g) == want);
    }
}

TEST_CASE("sampling a degree pool without replacement") {
    RngStream rng(443);
    std::vector<int> pool;
    for (int i = 0; i < 400; ++i) pool.push_back(1 + static_cast<int>(rng.below(5)));

    DegreeSpec spec;
    spec.kind = DegreeSpec::Kind::Sampled;
    spec.degree_pool = pool;
    spec.n = 200;
    const Graph g = degree_sequence_graph(spec, rng);
    CHECK(g.node_count() == 200);
    CHECK(is_connected(g));

    // every realized degree must come from the pool (values 1..5)
    for (NodeId u = 0; u < g.node_count(); ++u) {
        CHECK(g.degree(u) >= 1);
        CHECK(g.degree(u) <= 5);
    }
}

TEST_CASE("parity repair draws a replacement value") {
    RngStream rng(449);
    DegreeSpec spec;
    spec.kind = DegreeSpec::Kind::Sampled;
    spec.degree_pool = {2, 1, 1, 2, 3, 2, 1, 2};
    spec.n = 3;
    for (int rep = 0; rep < 20; ++rep) {
        const Graph g = degree_sequence_graph(spec, rng);
        std::size_t sum = 0;
        for (NodeId u = 0; u < g.node_count(); ++u) sum += g.degree(u);
        CHECK(sum % 2 == 0);
        CHECK(is_connected(g));
    }
}

TEST_CASE("sampled spec validation") {
    RngStream rng(457);
    DegreeSpec spec;
    spec.kind = DegreeSpec::Kind::Sampled;
    spec.degree_pool = {1, 1};
    spec.n = 5;
    CHECK_THROWS_AS(degree_sequence_graph(spec, rng), std::invalid_argument);
    spec.degree_pool = {1, 0, 2};
    spec.n = 2;
    CHECK_THROWS_AS(degree_sequence_graph(spec, rng), std::invalid_argument);
    DegreeSpec pareto;
    CHECK_THROWS_AS(degree_sequence_graph(pareto, rng), std::invalid_argument);
    CHECK_THROWS_AS(chung_lu(spec, rng), std::invalid_argument);
}
