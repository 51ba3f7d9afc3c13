#include "exforce/epidemic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "exforce/parallel.hpp"
#include "weighted_picker.hpp"

namespace exforce {

namespace {

enum class Status : std::uint8_t { Susceptible, Infected, Removed };

/// Shared state of one continuous-time run. `pressure` tracks, for every
/// susceptible node, the weight of edges arriving from infected neighbors;
/// its total is the force of infection up to the beta factor.
struct ContinuousRun {
    const Graph& g;
    std::vector<Status> status;
    detail::WeightedPicker pressure;
    std::vector<NodeId> infected;         // unordered; position index below
    std::vector<std::uint32_t> position;  // node -> index in `infected`, or npos
    std::uint32_t ever_infected = 0;
    std::uint64_t transmissions = 0;
    double time = 0.0;

    static constexpr std::uint32_t npos = UINT32_MAX;

    explicit ContinuousRun(const Graph& graph)
        : g(graph),
          status(graph.node_count(), Status::Susceptible),
          pressure(graph.node_count()),
          position(graph.node_count(), npos) {}

    void infect(NodeId v) {
        status[v] = Status::Infected;
        pressure.set(v, 0.0);
        position[v] = static_cast<std::uint32_t>(infected.size());
        infected.push_back(v);
        ++ever_infected;
        for (const Edge& e : g.neighbors(v))
            if (status[e.to] == Status::Susceptible) pressure.add(e.to, e.weight);
    }

    void recover(NodeId u, bool back_to_susceptible) {
        const std::uint32_t pos = position[u];
        position[infected.back()] = pos;
        std::swap(infected[pos], infected.back());
        infected.pop_back();
        position[u] = npos;
        for (const Edge& e : g.neighbors(u))
            if (status[e.to] == Status::Susceptible) pressure.add(e.to, -e.weight);
        if (back_to_susceptible) {
            status[u] = Status::Susceptible;
            double incoming = 0.0;
            for (const Edge& e : g.in_neighbors(u))
                if (status[e.to] == Status::Infected) incoming += e.weight;
            pressure.set(u, incoming);
        } else {
            status[u] = Status::Removed;
        }
    }

    void validate_pressure(CompartmentModel model) const {
        double scratch = 0.0;
        std::size_t n_infected = 0, n_removed = 0;
        for (NodeId v = 0; v < g.node_count(); ++v) {
            n_infected += status[v] == Status::Infected;
            n_removed += status[v] == Status::Removed;
            if (status[v] != Status::Susceptible) continue;
            double w = 0.0;
            for (const Edge& e : g.in_neighbors(v))
                if (status[e.to] == Status::Infected) w += e.weight;
            scratch += w;
            if (std::abs(w - pressure.weight(v)) > 1e-9 * std::max(1.0, w))
                throw std::logic_error("incremental SI-edge weight diverged from recount");
        }
        if (std::abs(scratch - pressure.total()) > 1e-9 * std::max(1.0, scratch))
            throw std::logic_error("incremental SI-edge total diverged from recount");
        if (n_infected != infected.size())
            throw std::logic_error("infected list diverged from statuses");
        if (model == CompartmentModel::SIR && n_infected + n_removed != ever_infected)
            throw std::logic_error("ever-infected diverged from |I| + |R|");
        if (model != CompartmentModel::SIR && n_removed != 0)
            throw std::logic_error("removed nodes in a model without immunity");
        if (model == CompartmentModel::SI && n_infected != ever_infected)
            throw std::logic_error("ever-infected diverged from |I|");
    }
};

std::uint64_t default_event_cap(const Graph& g, const SimParams& p) {
    if (p.event_cap != 0) return p.event_cap;
    const auto n = static_cast<std::uint64_t>(g.node_count());
    return p.time_mode == TimeMode::Discrete ? 10 * n : 100 * n;
}

std::uint64_t si_stop_transmissions(const Graph& g, const SimParams& p) {
    if (p.stop_after_transmissions != 0) return p.stop_after_transmissions;
    return g.node_count() > 25000 ? 1000 : 0;  // 0: stop at half coverage
}

void require_valid_seed(const Graph& g, NodeId seed) {
    if (seed >= g.node_count()) throw std::invalid_argument("invalid seed node id");
}

}  // namespace

std::uint32_t half_threshold(const Graph& g) {
    return static_cast<std::uint32_t>((g.node_count() + 1) / 2);
}

OutbreakRecord simulate_si_continuous(const Graph& g, NodeId seed, const SimParams& p,
                                      RngStream& rng) {
    require_valid_seed(g, seed);
    const std::uint64_t stop_tx = si_stop_transmissions(g, p);
    const std::uint32_t threshold = half_threshold(g);

    ContinuousRun run(g);
    run.infect(seed);

    OutbreakRecord rec;
    rec.seed = seed;

    auto stop_reached = [&]() {
        return stop_tx != 0 ? run.transmissions >= stop_tx : run.ever_infected >= threshold;
    };

    while (!stop_reached()) {
        const double rate = run.pressure.total();
        if (rate <= 0.0)
            throw std::runtime_error(
                "simulate_si_continuous: component exhausted before the stop condition; "
                "run on a connected graph");
        run.time += rng.exponential(rate);
        const NodeId next = static_cast<NodeId>(run.pressure.sample(rng.uniform() * rate));
        run.infect(next);
        ++run.transmissions;
        if (p.check_invariants) run.validate_pressure(CompartmentModel::SI);
    }

    rec.ever_infected = run.ever_infected;
    rec.transmissions = run.transmissions;
    rec.tthc = run.time;
    return rec;
}

OutbreakRecord simulate_recovery_continuous(const Graph& g, NodeId seed, const SimParams& p,
                                            RngStream& rng) {
    require_valid_seed(g, seed);
    if (p.model != CompartmentModel::SIS && p.model != CompartmentModel::SIR)
        throw std::invalid_argument("simulate_recovery_continuous: model must be SIS or SIR");
    if (!(p.beta > 0.0)) throw std::invalid_argument("beta must be positive");

    const std::uint32_t threshold =
        p.success_threshold != 0 ? p.success_threshold : half_threshold(g);
    const std::uint64_t cap = default_event_cap(g, p);
    const bool sis = p.model == CompartmentModel::SIS;

    ContinuousRun run(g);
    run.infect(seed);

    OutbreakRecord rec;
    rec.seed = seed;

    std::uint64_t events = 0;
    while (run.ever_infected < threshold) {
        if (run.infected.empty()) {
            rec.extinct = true;
            break;
        }
        if (events >= cap) {
            rec.truncated = true;
            break;
        }
        const double rate_tx = p.beta * run.pressure.total();
        const double rate_rec = static_cast<double>(run.infected.size());
        const double total = rate_tx + rate_rec;
        run.time += rng.exponential(total);
        if (rng.uniform() * total < rate_tx) {
            const NodeId next =
                static_cast<NodeId>(run.pressure.sample(rng.uniform() * run.pressure.total()));
            run.infect(next);
            ++run.transmissions;
        } else {
            const NodeId who =
                run.infected[static_cast<std::size_t>(rng.below(run.infected.size()))];
            run.recover(who, sis);
        }
        ++events;
        if (p.check_invariants) run.validate_pressure(p.model);
    }

    rec.ever_infected = run.ever_infected;
    rec.transmissions = run.transmissions;
    if (run.ever_infected >= threshold) rec.tthc = run.time;
    return rec;
}

OutbreakRecord simulate_recovery_discrete(const Graph& g, NodeId seed, const SimParams& p,
                                          RngStream& rng) {
    require_valid_seed(g, seed);
    if (p.model != CompartmentModel::SIS && p.model != CompartmentModel::SIR)
        throw std::invalid_argument("simulate_recovery_discrete: model must be SIS or SIR");
    if (!(p.beta > 0.0)) throw std::invalid_argument("beta must be positive");
    if (p.beta >= 1.0)
        throw std::invalid_argument("discrete time requires beta < 1 (r = -ln(1-beta))");

    const double r = std::min(1.0, -std::log1p(-p.beta));
    const std::uint32_t threshold =
        p.success_threshold != 0 ? p.success_threshold : half_threshold(g);
    const std::uint64_t max_rounds = default_event_cap(g, p);
    const bool sis = p.model == CompartmentModel::SIS;

    std::vector<Status> status(g.node_count(), Status::Susceptible);
    std::vector<NodeId> infectious{seed};
    std::vector<NodeId> fresh;
    status[seed] = Status::Infected;

    OutbreakRecord rec;
    rec.seed = seed;
    std::uint32_t ever = 1;
    std::uint64_t rounds = 0;
    double time = 0.0;

    while (ever < threshold) {
        if (infectious.empty()) {
            rec.extinct = true;
            break;
        }
        if (rounds >= max_rounds) {
            rec.truncated = true;
            break;
        }
        fresh.clear();
        for (const NodeId u : infectious)
            for (const Edge& e : g.neighbors(u)) {
                if (status[e.to] != Status::Susceptible) continue;
                if (!rng.bernoulli(std::min(1.0, r * e.weight))) continue;
                status[e.to] = Status::Infected;
                fresh.push_back(e.to);
                ++ever;
                ++rec.transmissions;
            }
        for (const NodeId u : infectious)
            status[u] = sis ? Status::Susceptible : Status::Removed;
        infectious.swap(fresh);
        ++rounds;
        time += 1.0;
    }

    rec.ever_infected = ever;
    if (ever >= threshold) rec.tthc = time;
    return rec;
}

OutbreakRecord simulate_outbreak(const Graph& g, NodeId seed, const SimParams& p, RngStream& rng) {
    if (p.model == CompartmentModel::SI) {
        if (p.time_mode != TimeMode::Continuous)
            throw std::invalid_argument("SI outbreaks are continuous-time only");
        return simulate_si_continuous(g, seed, p, rng);
    }
    return p.time_mode == TimeMode::Continuous ? simulate_recovery_continuous(g, seed, p, rng)
                                               : simulate_recovery_discrete(g, seed, p, rng);
}

GammaFit tthc_outcome(const Graph& g, NodeId seed, const SimParams& p) {
    if (p.model != CompartmentModel::SI)
        throw std::invalid_argument("tthc_outcome: SI model required");
    if (p.n_sims < 1) throw std::invalid_argument("n_sims must be >= 1");
    if (!is_connected(g))
        throw std::invalid_argument("tthc_outcome: graph is disconnected");
    std::vector<double> samples(static_cast<std::size_t>(p.n_sims));
    for (int i = 0; i < p.n_sims; ++i) {
        RngStream rng = derive_stream(p.rng_seed, seed, static_cast<std::uint64_t>(i));
        samples[static_cast<std::size_t>(i)] = *simulate_si_continuous(g, seed, p, rng).tthc;
    }
    return fit_gamma_moments(samples);
}

double epidemic_potential(const Graph& g, NodeId seed, const SimParams& p,
                          std::uint64_t* truncated_out) {
    if (p.model == CompartmentModel::SI)
        throw std::invalid_argument("epidemic_potential: SIS or SIR model required");
    if (p.n_sims < 1) throw std::invalid_argument("n_sims must be >= 1");
    const std::uint32_t threshold =
        p.success_threshold != 0 ? p.success_threshold : half_threshold(g);
    int successes = 0;
    std::uint64_t truncated = 0;
    for (int i = 0; i < p.n_sims; ++i) {
        RngStream rng = derive_stream(p.rng_seed, seed, static_cast<std::uint64_t>(i));
        const OutbreakRecord rec = simulate_outbreak(g, seed, p, rng);
        if (rec.ever_infected >= threshold) ++successes;
        if (rec.truncated) ++truncated;
    }
    if (truncated_out) *truncated_out += truncated;
    return static_cast<double>(successes) / static_cast<double>(p.n_sims);
}

double critical_beta(const Graph& g, double multiple) {
    if (!(multiple > 0.0)) throw std::invalid_argument("critical_beta: multiple must be positive");
    return multiple / largest_eigenvalue(g);
}

CalibrationResult calibrate_beta(const Graph& g, const SimParams& p, std::span<const NodeId> sample,
                                 std::pair<double, double> band, double target_frac,
                                 std::size_t threads) {
    if (sample.empty()) throw std::invalid_argument("calibrate_beta: empty sample");
    if (p.model == CompartmentModel::SI)
        throw std::invalid_argument("calibrate_beta: SIS or SIR model required");
    if (!is_connected(g)) throw std::invalid_argument("calibrate_beta: graph is disconnected");

    const double lambda = largest_eigenvalue(g);

    // candidates are scored by the band fraction itself; mean potential
    // closest to 1/2 breaks ties so the critical range sits centrally
    CalibrationResult best;
    double best_frac = -1.0;
    double best_centering = -1.0;
    int evaluations = 0;
    auto evaluate = [&](double multiple) {
        SimParams trial = p;
        trial.beta = multiple / lambda;
        trial.rng_seed = mix64(p.rng_seed, 0x63616c6962ULL /* per-evaluation stream */,
                               static_cast<std::uint64_t>(evaluations));
        std::vector<double> epo(sample.size());
        parallel_for(sample.size(), threads, [&](std::size_t i) {
            epo[i] = epidemic_potential(g, sample[i], trial);
        });
        std::size_t in_band = 0;
        double mean = 0.0;
        for (const double v : epo) {
            if (v >= band.first && v <= band.second) ++in_band;
            mean += v;
        }
        mean /= static_cast<double>(epo.size());
        const double frac = static_cast<double>(in_band) / static_cast<double>(epo.size());
        ++evaluations;
        const double centering = 1.0 - std::abs(mean - 0.5);
        if (frac > best_frac || (frac == best_frac && centering > best_centering)) {
            best_frac = frac;
            best_centering = centering;
            best.beta = trial.beta;
            best.multiple = multiple;
            best.fraction_in_band = frac;
            best.met_target = frac >= target_frac;
        }
        return mean;
    };

    // bracket, then bisect steering by mean potential: the band fraction
    // itself is not monotone in beta but the mean potential is. Discrete
    // rounds clamp the per-edge probability to 1 at beta = 1 - 1/e, so
    // hotter proposals are both invalid (beta >= 1) and indistinguishable.
    const double max_multiple = p.time_mode == TimeMode::Discrete
                                    ? (1.0 - std::exp(-1.0)) * lambda
                                    : 64.0;
    double lo = std::min(0.25, 0.5 * max_multiple);
    double hi = std::min(4.0, max_multiple);
    constexpr int kMaxRefinements = 10;
    for (int expand = 0; expand < 4; ++expand) {
        const bool hot = evaluate(hi) >= 0.5;
        if (hot || hi >= max_multiple) break;
        hi = std::min(hi * 2.0, max_multiple);
    }
    for (int i = 0; i < kMaxRefinements; ++i) {
        const double mid = 0.5 * (lo + hi);
        (evaluate(mid) > 0.5 ? hi : lo) = mid;
    }
    best.evaluations = evaluations;
    return best;
}

}  // namespace exforce
