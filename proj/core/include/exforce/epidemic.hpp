#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>

#include "exforce/graph.hpp"
#include "exforce/rng.hpp"
#include "exforce/stats.hpp"

namespace exforce {

enum class CompartmentModel { SI, SIS, SIR };
enum class TimeMode { Continuous, Discrete };

struct SimParams {
    CompartmentModel model = CompartmentModel::SI;
    TimeMode time_mode = TimeMode::Continuous;
    double beta = 1.0;   // transmissibility/recovery ratio; unused for SI
    int n_sims = 100;    // outbreaks per seed node
    std::uint64_t rng_seed = 0;
    std::uint64_t event_cap = 0;  // 0: 100*n events continuous, 10*n rounds discrete

    /// SI stop condition: 0 stops at half coverage, except on graphs with more
    /// than 25,000 nodes where the default becomes the 1,000th transmission.
    /// A positive value always stops at that transmission count.
    std::uint64_t stop_after_transmissions = 0;

    /// Ever-infected count that ends a recovery run as a success; 0 means
    /// half coverage, ceil(n/2).
    std::uint32_t success_threshold = 0;

    /// Revalidate the incremental infective-pressure bookkeeping against a
    /// from-scratch recount at every event (slow; for tests).
    bool check_invariants = false;
};

/// Summary of one simulated outbreak.
struct OutbreakRecord {
    NodeId seed = 0;
    std::uint32_t ever_infected = 1;  // distinct nodes ever infected, seed included
    std::optional<double> tthc;       // time the stop condition was reached
    std::uint64_t transmissions = 0;
    bool extinct = false;
    bool truncated = false;  // event cap hit first

    friend bool operator==(const OutbreakRecord&, const OutbreakRecord&) = default;
};

std::uint32_t half_threshold(const Graph& g);  // ceil(n/2)

/// Event-driven SI outbreak: waiting times are exponential with rate equal to
/// the current count (weight sum) of infected-susceptible edges; the next
/// infected node is drawn proportionally to its current infective pressure.
/// Throws std::runtime_error if the seed's component is exhausted before the
/// stop condition (disconnected input).
OutbreakRecord simulate_si_continuous(const Graph& g, NodeId seed, const SimParams& p,
                                      RngStream& rng);

/// Competing-rates SIS/SIR outbreak: transmission at rate beta * (SI edge
/// weight), recovery at unit rate per infected node. Runs until extinction,
/// half-coverage success, or the event cap.
OutbreakRecord simulate_recovery_continuous(const Graph& g, NodeId seed, const SimParams& p,
                                            RngStream& rng);

/// Synchronous-round SIS/SIR outbreak: every node infectious in round t
/// transmits across each edge to a currently susceptible node with
/// probability min(1, -ln(1-beta) * w), then recovers at the end of the
/// round; nodes infected in round t become infectious in round t+1.
/// Throws std::invalid_argument for beta >= 1.
OutbreakRecord simulate_recovery_discrete(const Graph& g, NodeId seed, const SimParams& p,
                                          RngStream& rng);

/// Dispatches on model and time mode. SI is continuous-time only.
OutbreakRecord simulate_outbreak(const Graph& g, NodeId seed, const SimParams& p, RngStream& rng);

/// Runs n_sims SI outbreaks and fits the observed times-to-half-coverage to a
/// gamma distribution by the method of moments. The fitted mean (= sample
/// mean) is the scalar outcome used by the experiment harness.
GammaFit tthc_outcome(const Graph& g, NodeId seed, const SimParams& p);

/// Fraction of n_sims outbreaks that ever infect at least half the network.
/// Truncated runs count by their threshold status; `truncated_out`, when
/// given, accumulates how many runs hit the event cap.
double epidemic_potential(const Graph& g, NodeId seed, const SimParams& p,
                          std::uint64_t* truncated_out = nullptr);

/// beta at a fixed multiple of the epidemic threshold 1/lambda.
double critical_beta(const Graph& g, double multiple);

struct CalibrationResult {
    double beta = 0.0;
    double multiple = 0.0;          // beta * lambda
    double fraction_in_band = 0.0;  // sampled nodes with EPo inside the band
    bool met_target = false;
    int evaluations = 0;
};

/// Binary search on the multiplier m (beta = m/lambda) until at least
/// `target_frac` of the sampled nodes have epidemic potential inside `band`.
/// Bisection steers by the sample's mean potential; the best candidate seen
/// is returned with `met_target` false when no tested beta reaches the
/// target.
CalibrationResult calibrate_beta(const Graph& g, const SimParams& p, std::span<const NodeId> sample,
                                 std::pair<double, double> band = {0.05, 0.95},
                                 double target_frac = 0.80, std::size_t threads = 0);

}  // namespace exforce
