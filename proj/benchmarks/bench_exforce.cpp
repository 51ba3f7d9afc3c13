#include <benchmark/benchmark.h>

#include <numeric>
#include <vector>

#include "exforce/centrality.hpp"
#include "exforce/epidemic.hpp"
#include "exforce/expected_force.hpp"
#include "exforce/netgen.hpp"
#include "exforce/rng.hpp"

using namespace exforce;

namespace {

const Graph& pareto_net(std::size_t n) {
    static std::vector<std::pair<std::size_t, Graph>> cache;
    for (const auto& [size, g] : cache)
        if (size == n) return g;
    DegreeSpec spec;
    spec.n = n;
    RngStream rng(9001 + n);
    cache.emplace_back(n, chung_lu(spec, rng).graph);
    return cache.back().second;
}

}  // namespace

static void BM_ExpectedForceAll(benchmark::State& state) {
    const Graph& g = pareto_net(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto scores = exf_all(g, {}, 1);
        benchmark::DoNotOptimize(scores);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.node_count()));
}
BENCHMARK(BM_ExpectedForceAll)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

static void BM_ExpectedForceHub(benchmark::State& state) {
    const Graph& g = pareto_net(1000);
    NodeId hub = 0;
    for (NodeId v = 1; v < g.node_count(); ++v)
        if (g.degree(v) > g.degree(hub)) hub = v;
    for (auto _ : state) benchmark::DoNotOptimize(expected_force(g, hub));
}
BENCHMARK(BM_ExpectedForceHub);

static void BM_ExpectedForceX3(benchmark::State& state) {
    const Graph& g = pareto_net(1000);
    ExfOptions opts;
    opts.transmissions = 3;
    for (auto _ : state) benchmark::DoNotOptimize(expected_force(g, 17, opts));
}
BENCHMARK(BM_ExpectedForceX3);

static void BM_KShell(benchmark::State& state) {
    const Graph& g = pareto_net(4000);
    for (auto _ : state) {
        auto shells = k_shell(g);
        benchmark::DoNotOptimize(shells);
    }
}
BENCHMARK(BM_KShell)->Unit(benchmark::kMillisecond);

static void BM_EigenvectorCentrality(benchmark::State& state) {
    const Graph& g = pareto_net(4000);
    for (auto _ : state) {
        auto scores = eigenvector_centrality(g);
        benchmark::DoNotOptimize(scores);
    }
}
BENCHMARK(BM_EigenvectorCentrality)->Unit(benchmark::kMillisecond);

static void BM_SiOutbreak(benchmark::State& state) {
    const Graph& g = pareto_net(1000);
    SimParams p;
    std::uint64_t rep = 0;
    std::uint64_t events = 0;
    for (auto _ : state) {
        RngStream rng = derive_stream(4242, 0, rep++);
        const auto rec = simulate_si_continuous(g, 0, p, rng);
        events += rec.transmissions;
        benchmark::DoNotOptimize(rec);
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(events));
}
BENCHMARK(BM_SiOutbreak);

static void BM_SisOutbreak(benchmark::State& state) {
    const Graph& g = pareto_net(1000);
    SimParams p;
    p.model = CompartmentModel::SIS;
    p.beta = critical_beta(g, 6.0);
    std::uint64_t rep = 0;
    for (auto _ : state) {
        RngStream rng = derive_stream(4243, 0, rep++);
        benchmark::DoNotOptimize(simulate_recovery_continuous(g, 0, p, rng));
    }
}
BENCHMARK(BM_SisOutbreak);

static void BM_ChungLu(benchmark::State& state) {
    DegreeSpec spec;
    spec.n = 1000;
    std::uint64_t rep = 0;
    for (auto _ : state) {
        RngStream rng(31337 + rep++);
        benchmark::DoNotOptimize(chung_lu(spec, rng));
    }
}
BENCHMARK(BM_ChungLu)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
