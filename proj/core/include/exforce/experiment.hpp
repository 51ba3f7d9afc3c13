#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "exforce/epidemic.hpp"
#include "exforce/graph.hpp"
#include "exforce/netgen.hpp"

namespace exforce {

enum class Metric { Exf, ExfM, Exf3, KShell, Eigen };

std::string metric_name(Metric m);
Metric metric_from_name(const std::string& name);

struct ProcessSpec {
    CompartmentModel model = CompartmentModel::SIS;
    TimeMode time_mode = TimeMode::Continuous;
};

std::string process_name(const ProcessSpec& p);

struct GeneratorSpec {
    DegreeSpec::Kind family = DegreeSpec::Kind::Pareto;
    std::string degree_file;  // Sampled only
    std::size_t n = 1000;
    int count = 1;
};

struct NetworkSource {
    std::string id;
    std::variant<std::string, GeneratorSpec> source;  // edge-list path or generator
};

struct SeedSelection {
    bool all = true;
    int random_k = 0;  // used when !all; must be >= 2
};

struct BetaPolicy {
    bool calibrate = true;
    double multiple = 1.0;  // used when !calibrate: beta = multiple / lambda
};

/// Declarative description of a correlation experiment.
struct ExperimentConfig {
    std::vector<NetworkSource> networks;
    std::vector<Metric> metrics;
    std::vector<ProcessSpec> processes;
    SeedSelection seed_selection;
    int sims_per_seed = 100;
    BetaPolicy beta_policy;
    std::uint64_t rng_seed = 0;
    int calibration_sample = 100;  // nodes probed per calibration evaluation
    int calibration_sims = 50;     // outbreaks per probed node
    std::size_t threads = 0;

    static ExperimentConfig from_json(const std::string& text);
    std::string to_json() const;

    /// Throws std::invalid_argument on empty sections, K < 2, or discrete SI.
    void validate() const;
};

struct ResultRow {
    std::string network;
    Metric metric = Metric::Exf;
    ProcessSpec process;
    double pearson_r = 0.0;
    double spearman_r = 0.0;
    double ci_lo = 0.0;  // Fisher 95% interval for the Pearson estimate
    double ci_hi = 0.0;
    std::size_t n_seeds = 0;
    bool degenerate = false;  // zero variance; correlations not defined
};

struct MetricAgreementRow {
    std::string network;
    Metric a = Metric::Exf;
    Metric b = Metric::Exf;
    double spearman_r = 0.0;
    bool degenerate = false;
};

/// One row per (network, seed): structural profile, metric values, outcomes.
struct RawRow {
    std::string network;
    std::string node;
    std::size_t degree = 0;
    double neighbor_degree_sum = 0.0;
    double distance2_degree_sum = 0.0;
    std::vector<double> metrics;   // config metric order
    std::vector<double> outcomes;  // config process order
};

struct NetworkReport {
    std::string id;
    std::size_t nodes = 0;
    std::size_t edges = 0;
    double lambda = 0.0;
    std::optional<CalibrationResult> calibration;
    double beta = 0.0;
    std::uint64_t truncated_runs = 0;
    std::string error;  // nonempty when the network failed
};

struct ResultTable {
    std::vector<ResultRow> rows;
    std::vector<MetricAgreementRow> agreement;
    std::vector<RawRow> raw;
    std::vector<NetworkReport> networks;
    bool any_failed = false;
};

/// Node profile used for the per-node raw table: degree, the summed degree of
/// direct neighbors, and the summed degree of the distance-2 set (excluding
/// the node and its neighbors).
struct NodeProfile {
    std::size_t degree = 0;
    double neighbor_degree_sum = 0.0;
    double distance2_degree_sum = 0.0;
};

std::vector<NodeProfile> node_profiles(const Graph& g);

/// Runs the full sweep: for each network, computes metrics, selects seeds,
/// calibrates beta (once per network, first recovery process) and simulates
/// every process per seed, then correlates metric vs. outcome. Failures are
/// recorded per network and the run continues. Identical configs produce
/// identical tables regardless of the worker count.
ResultTable run_experiment(const ExperimentConfig& cfg);

/// Manifest JSON capturing the config, per-network reports, calibrated betas,
/// truncation counts, and the library version; enough to rerun the sweep.
std::string manifest_json(const ExperimentConfig& cfg, const ResultTable& table);

std::string results_csv(const ExperimentConfig& cfg, const ResultTable& table);
std::string agreement_csv(const ResultTable& table);
std::string raw_csv(const ExperimentConfig& cfg, const ResultTable& table);

}  // namespace exforce
