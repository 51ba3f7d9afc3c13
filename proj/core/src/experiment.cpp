#include "exforce/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "exforce/centrality.hpp"
#include "exforce/expected_force.hpp"
#include "exforce/parallel.hpp"
#include "exforce/stats.hpp"
#include "exforce/version.hpp"

namespace exforce {

using nlohmann::json;

std::string metric_name(Metric m) {
    switch (m) {
        case Metric::Exf: return "exf";
        case Metric::ExfM: return "exf_m";
        case Metric::Exf3: return "exf3";
        case Metric::KShell: return "kshell";
        case Metric::Eigen: return "eigen";
    }
    return "?";
}

Metric metric_from_name(const std::string& name) {
    if (name == "exf") return Metric::Exf;
    if (name == "exf_m") return Metric::ExfM;
    if (name == "exf3") return Metric::Exf3;
    if (name == "kshell") return Metric::KShell;
    if (name == "eigen") return Metric::Eigen;
    throw std::invalid_argument("unknown metric: " + name);
}

std::string process_name(const ProcessSpec& p) {
    std::string name = p.model == CompartmentModel::SI    ? "si"
                       : p.model == CompartmentModel::SIS ? "sis"
                                                          : "sir";
    name += p.time_mode == TimeMode::Continuous ? "-c" : "-d";
    return name;
}

namespace {

CompartmentModel model_from_name(const std::string& s) {
    if (s == "si") return CompartmentModel::SI;
    if (s == "sis") return CompartmentModel::SIS;
    if (s == "sir") return CompartmentModel::SIR;
    throw std::invalid_argument("unknown model: " + s);
}

TimeMode time_from_name(const std::string& s) {
    if (s == "continuous" || s == "cont") return TimeMode::Continuous;
    if (s == "discrete" || s == "disc") return TimeMode::Discrete;
    throw std::invalid_argument("unknown time mode: " + s);
}

std::string time_name(TimeMode t) {
    return t == TimeMode::Continuous ? "continuous" : "discrete";
}

std::string model_name(CompartmentModel m) {
    return m == CompartmentModel::SI ? "si" : m == CompartmentModel::SIS ? "sis" : "sir";
}

json generator_json(const GeneratorSpec& g) {
    json j;
    j["family"] = g.family == DegreeSpec::Kind::Pareto ? "pareto" : "sampled";
    if (g.family == DegreeSpec::Kind::Sampled) j["degree_file"] = g.degree_file;
    j["n"] = g.n;
    j["count"] = g.count;
    return j;
}

GeneratorSpec generator_from_json(const json& j) {
    GeneratorSpec g;
    const std::string family = j.at("family").get<std::string>();
    if (family == "pareto") {
        g.family = DegreeSpec::Kind::Pareto;
    } else if (family == "sampled") {
        g.family = DegreeSpec::Kind::Sampled;
        g.degree_file = j.at("degree_file").get<std::string>();
    } else {
        throw std::invalid_argument("unknown generator family: " + family);
    }
    g.n = j.value("n", std::size_t{1000});
    g.count = j.value("count", 1);
    return g;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
    const json j = json::parse(text);
    ExperimentConfig cfg;

    for (const auto& net : j.at("networks")) {
        NetworkSource src;
        src.id = net.value("id", "");
        if (net.contains("file")) {
            src.source = net.at("file").get<std::string>();
            if (src.id.empty()) src.id = net.at("file").get<std::string>();
        } else if (net.contains("generator")) {
            src.source = generator_from_json(net.at("generator"));
            if (src.id.empty()) src.id = "gen";
        } else {
            throw std::invalid_argument("network entry needs \"file\" or \"generator\"");
        }
        cfg.networks.push_back(std::move(src));
    }

    for (const auto& m : j.at("metrics")) cfg.metrics.push_back(metric_from_name(m));

    for (const auto& p : j.at("processes")) {
        ProcessSpec spec;
        spec.model = model_from_name(p.at("model").get<std::string>());
        spec.time_mode = time_from_name(p.at("time").get<std::string>());
        cfg.processes.push_back(spec);
    }

    if (j.contains("seed_selection")) {
        const auto& s = j.at("seed_selection");
        if (s.is_string() && s.get<std::string>() == "all") {
            cfg.seed_selection.all = true;
        } else if (s.is_object() && s.contains("random")) {
            cfg.seed_selection.all = false;
            cfg.seed_selection.random_k = s.at("random").get<int>();
        } else {
            throw std::invalid_argument("seed_selection must be \"all\" or {\"random\": K}");
        }
    }

    cfg.sims_per_seed = j.value("sims_per_seed", 100);

    if (j.contains("beta_policy")) {
        const auto& b = j.at("beta_policy");
        if (b.is_string() && b.get<std::string>() == "calibrate") {
            cfg.beta_policy.calibrate = true;
        } else if (b.is_object() && b.contains("multiple")) {
            cfg.beta_policy.calibrate = false;
            cfg.beta_policy.multiple = b.at("multiple").get<double>();
        } else {
            throw std::invalid_argument("beta_policy must be \"calibrate\" or {\"multiple\": m}");
        }
    }

    cfg.rng_seed = j.value("rng_seed", std::uint64_t{0});
    if (j.contains("calibration")) {
        cfg.calibration_sample = j.at("calibration").value("sample", 100);
        cfg.calibration_sims = j.at("calibration").value("sims", 50);
    }
    cfg.threads = j.value("threads", std::size_t{0});

    cfg.validate();
    return cfg;
}

std::string ExperimentConfig::to_json() const {
    json j;
    j["networks"] = json::array();
    for (const auto& net : networks) {
        json n;
        n["id"] = net.id;
        if (std::holds_alternative<std::string>(net.source))
            n["file"] = std::get<std::string>(net.source);
        else
            n["generator"] = generator_json(std::get<GeneratorSpec>(net.source));
        j["networks"].push_back(n);
    }
    j["metrics"] = json::array();
    for (const Metric m : metrics) j["metrics"].push_back(metric_name(m));
    j["processes"] = json::array();
    for (const auto& p : processes)
        j["processes"].push_back({{"model", model_name(p.model)}, {"time", time_name(p.time_mode)}});
    if (seed_selection.all)
        j["seed_selection"] = "all";
    else
        j["seed_selection"] = {{"random", seed_selection.random_k}};
    j["sims_per_seed"] = sims_per_seed;
    if (beta_policy.calibrate)
        j["beta_policy"] = "calibrate";
    else
        j["beta_policy"] = {{"multiple", beta_policy.multiple}};
    j["rng_seed"] = rng_seed;
    j["calibration"] = {{"sample", calibration_sample}, {"sims", calibration_sims}};
    if (threads != 0) j["threads"] = threads;
    return j.dump(2);
}

void ExperimentConfig::validate() const {
    if (networks.empty()) throw std::invalid_argument("config: networks must be nonempty");
    if (metrics.empty()) throw std::invalid_argument("config: metrics must be nonempty");
    if (processes.empty()) throw std::invalid_argument("config: processes must be nonempty");
    if (!seed_selection.all && seed_selection.random_k < 2)
        throw std::invalid_argument("config: random seed selection needs K >= 2");
    if (sims_per_seed < 1) throw std::invalid_argument("config: sims_per_seed must be >= 1");
    for (const auto& p : processes)
        if (p.model == CompartmentModel::SI && p.time_mode == TimeMode::Discrete)
            throw std::invalid_argument("config: SI processes are continuous-time only");
    for (const auto& net : networks)
        if (std::holds_alternative<GeneratorSpec>(net.source)) {
            const auto& g = std::get<GeneratorSpec>(net.source);
            if (g.count < 1) throw std::invalid_argument("config: generator count must be >= 1");
            if (g.family == DegreeSpec::Kind::Sampled && g.degree_file.empty())
                throw std::invalid_argument("config: sampled generator needs degree_file");
        }
}

std::vector<NodeProfile> node_profiles(const Graph& g) {
    if (g.directed()) throw std::invalid_argument("node_profiles: undirected graphs only");
    const std::size_t n = g.node_count();
    std::vector<NodeProfile> out(n);
    std::vector<std::uint32_t> stamp(n, UINT32_MAX);
    for (NodeId v = 0; v < n; ++v) {
        NodeProfile& p = out[v];
        p.degree = g.degree(v);
        stamp[v] = v;
        for (const Edge& e : g.neighbors(v)) {
            p.neighbor_degree_sum += static_cast<double>(g.degree(e.to));
            stamp[e.to] = v;
        }
        for (const Edge& e : g.neighbors(v))
            for (const Edge& e2 : g.neighbors(e.to))
                if (stamp[e2.to] != v) {
                    stamp[e2.to] = v;
                    p.distance2_degree_sum += static_cast<double>(g.degree(e2.to));
                }
    }
    return out;
}

namespace {

struct NetworkPlan {
    std::string id;
    const NetworkSource* src = nullptr;
    int replicate = 0;            // generator sources only
    std::uint64_t gen_stream = 0;  // rng stream index for generation
};

std::vector<NetworkPlan> plan_networks(const ExperimentConfig& cfg) {
    std::vector<NetworkPlan> plans;
    std::uint64_t gen_counter = 0;
    for (const auto& src : cfg.networks) {
        if (std::holds_alternative<std::string>(src.source)) {
            plans.push_back({src.id, &src, 0, 0});
            continue;
        }
        const auto& gen = std::get<GeneratorSpec>(src.source);
        for (int i = 0; i < gen.count; ++i)
            plans.push_back({src.id + "-" + std::to_string(i), &src, i, gen_counter++});
    }
    return plans;
}

Graph materialize_network(const ExperimentConfig& cfg, const NetworkPlan& plan) {
    if (std::holds_alternative<std::string>(plan.src->source)) {
        const auto& path = std::get<std::string>(plan.src->source);
        return giant_component(load_edge_list_file(path).graph);
    }
    const auto& gen = std::get<GeneratorSpec>(plan.src->source);
    DegreeSpec spec;
    spec.kind = gen.family;
    spec.n = gen.n;
    if (gen.family == DegreeSpec::Kind::Sampled) {
        std::ifstream in(gen.degree_file);
        if (!in) throw std::invalid_argument("cannot open degree file: " + gen.degree_file);
        int d = 0;
        while (in >> d) spec.degree_pool.push_back(d);
    }
    RngStream rng = derive_stream(cfg.rng_seed, 0x67656eULL /* generator stream */,
                                  plan.gen_stream);
    if (gen.family == DegreeSpec::Kind::Pareto) return std::move(chung_lu(spec, rng).graph);
    return degree_sequence_graph(spec, rng);
}

std::vector<NodeId> select_seeds(const Graph& g, const SeedSelection& sel, RngStream& rng) {
    const std::size_t n = g.node_count();
    std::vector<NodeId> seeds(n);
    std::iota(seeds.begin(), seeds.end(), NodeId{0});
    if (sel.all || static_cast<std::size_t>(sel.random_k) >= n) return seeds;
    for (std::size_t i = 0; i < static_cast<std::size_t>(sel.random_k); ++i) {
        const auto j = i + static_cast<std::size_t>(rng.below(n - i));
        std::swap(seeds[i], seeds[j]);
    }
    seeds.resize(static_cast<std::size_t>(sel.random_k));
    std::sort(seeds.begin(), seeds.end());
    return seeds;
}

std::vector<double> compute_metric(const Graph& g, Metric m, std::size_t threads) {
    switch (m) {
        case Metric::Exf: return exf_all(g, {}, threads);
        case Metric::ExfM: {
            ExfOptions opts;
            std::vector<double> scores(g.node_count());
            parallel_for(g.node_count(), threads, [&](std::size_t i) {
                scores[i] = expected_force_modified(g, static_cast<NodeId>(i), opts);
            });
            return scores;
        }
        case Metric::Exf3: {
            ExfOptions opts;
            opts.transmissions = 3;
            return exf_all(g, opts, threads);
        }
        case Metric::KShell: {
            const auto shells = k_shell(g);
            return {shells.begin(), shells.end()};
        }
        case Metric::Eigen: return eigenvector_centrality(g);
    }
    throw std::logic_error("unreachable");
}

}  // namespace

ResultTable run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    ResultTable table;

    const std::vector<NetworkPlan> plans = plan_networks(cfg);
    for (std::size_t net_idx = 0; net_idx < plans.size(); ++net_idx) {
        const auto& net = plans[net_idx];
        NetworkReport rep;
        rep.id = net.id;
        try {
            const Graph g = materialize_network(cfg, net);
            rep.nodes = g.node_count();
            rep.edges = g.edge_count();
            rep.lambda = largest_eigenvalue(g);

            // metrics over all nodes
            std::vector<std::vector<double>> metric_values;
            metric_values.reserve(cfg.metrics.size());
            for (const Metric m : cfg.metrics)
                metric_values.push_back(compute_metric(g, m, cfg.threads));

            RngStream seed_rng = derive_stream(cfg.rng_seed, 0x7365656473ULL, net_idx);
            const std::vector<NodeId> seeds = select_seeds(g, cfg.seed_selection, seed_rng);

            const bool needs_recovery =
                std::any_of(cfg.processes.begin(), cfg.processes.end(),
                            [](const ProcessSpec& p) { return p.model != CompartmentModel::SI; });

            double beta = 0.0;
            if (needs_recovery) {
                if (cfg.beta_policy.calibrate) {
                    const auto first_recovery = std::find_if(
                        cfg.processes.begin(), cfg.processes.end(),
                        [](const ProcessSpec& p) { return p.model != CompartmentModel::SI; });
                    SimParams calib;
                    calib.model = first_recovery->model;
                    calib.time_mode = first_recovery->time_mode;
                    calib.n_sims = cfg.calibration_sims;
                    calib.rng_seed = mix64(cfg.rng_seed, 0x636c6262ULL, net_idx);

                    std::vector<NodeId> sample = seeds;
                    if (sample.size() > static_cast<std::size_t>(cfg.calibration_sample)) {
                        RngStream rng = derive_stream(cfg.rng_seed, 0x73616d70ULL, net_idx);
                        for (std::size_t i = 0;
                             i < static_cast<std::size_t>(cfg.calibration_sample); ++i) {
                            const auto j =
                                i + static_cast<std::size_t>(rng.below(sample.size() - i));
                            std::swap(sample[i], sample[j]);
                        }
                        sample.resize(static_cast<std::size_t>(cfg.calibration_sample));
                    }
                    rep.calibration =
                        calibrate_beta(g, calib, sample, {0.05, 0.95}, 0.80, cfg.threads);
                    beta = rep.calibration->beta;
                } else {
                    beta = critical_beta(g, cfg.beta_policy.multiple);
                }
            }
            rep.beta = beta;

            // outcomes per process per seed
            std::vector<std::vector<double>> outcomes(cfg.processes.size(),
                                                      std::vector<double>(seeds.size(), 0.0));
            std::vector<std::uint64_t> truncated(seeds.size(), 0);
            for (std::size_t pi = 0; pi < cfg.processes.size(); ++pi) {
                const ProcessSpec& proc = cfg.processes[pi];
                SimParams params;
                params.model = proc.model;
                params.time_mode = proc.time_mode;
                params.beta = beta;
                params.n_sims = cfg.sims_per_seed;
                params.rng_seed = mix64(cfg.rng_seed, net_idx, pi);
                parallel_for(seeds.size(), cfg.threads, [&](std::size_t si) {
                    if (proc.model == CompartmentModel::SI)
                        outcomes[pi][si] = tthc_outcome(g, seeds[si], params).mean;
                    else
                        outcomes[pi][si] =
                            epidemic_potential(g, seeds[si], params, &truncated[si]);
                });
            }
            rep.truncated_runs = std::accumulate(truncated.begin(), truncated.end(),
                                                 std::uint64_t{0});

            // correlations
            for (std::size_t mi = 0; mi < cfg.metrics.size(); ++mi) {
                std::vector<double> metric_on_seeds(seeds.size());
                for (std::size_t si = 0; si < seeds.size(); ++si)
                    metric_on_seeds[si] = metric_values[mi][seeds[si]];
                for (std::size_t pi = 0; pi < cfg.processes.size(); ++pi) {
                    ResultRow row;
                    row.network = net.id;
                    row.metric = cfg.metrics[mi];
                    row.process = cfg.processes[pi];
                    row.n_seeds = seeds.size();
                    try {
                        row.pearson_r = pearson(metric_on_seeds, outcomes[pi]);
                        row.spearman_r = spearman(metric_on_seeds, outcomes[pi]);
                        const Interval ci = fisher_confidence(row.pearson_r, seeds.size());
                        row.ci_lo = ci.lo;
                        row.ci_hi = ci.hi;
                    } catch (const std::domain_error&) {
                        row.degenerate = true;
                        row.pearson_r = row.spearman_r = row.ci_lo = row.ci_hi =
                            std::numeric_limits<double>::quiet_NaN();
                    }
                    table.rows.push_back(std::move(row));
                }
            }

            // metric-vs-metric rank agreement over all nodes
            for (std::size_t a = 0; a < cfg.metrics.size(); ++a)
                for (std::size_t b = a + 1; b < cfg.metrics.size(); ++b) {
                    MetricAgreementRow row;
                    row.network = net.id;
                    row.a = cfg.metrics[a];
                    row.b = cfg.metrics[b];
                    try {
                        row.spearman_r = spearman(metric_values[a], metric_values[b]);
                    } catch (const std::domain_error&) {
                        row.degenerate = true;
                        row.spearman_r = std::numeric_limits<double>::quiet_NaN();
                    }
                    table.agreement.push_back(std::move(row));
                }

            // raw per-node table
            const auto profiles = node_profiles(g);
            for (std::size_t si = 0; si < seeds.size(); ++si) {
                RawRow raw;
                raw.network = net.id;
                raw.node = g.label(seeds[si]);
                raw.degree = profiles[seeds[si]].degree;
                raw.neighbor_degree_sum = profiles[seeds[si]].neighbor_degree_sum;
                raw.distance2_degree_sum = profiles[seeds[si]].distance2_degree_sum;
                for (std::size_t mi = 0; mi < cfg.metrics.size(); ++mi)
                    raw.metrics.push_back(metric_values[mi][seeds[si]]);
                for (std::size_t pi = 0; pi < cfg.processes.size(); ++pi)
                    raw.outcomes.push_back(outcomes[pi][si]);
                table.raw.push_back(std::move(raw));
            }
        } catch (const std::exception& e) {
            rep.error = e.what();
            table.any_failed = true;
        }
        table.networks.push_back(std::move(rep));
    }
    return table;
}

namespace {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    std::ostringstream ss;
    ss.precision(12);
    ss << v;
    return ss.str();
}

}  // namespace

std::string results_csv(const ExperimentConfig&, const ResultTable& table) {
    std::ostringstream out;
    out << "network,metric,process,pearson,spearman,ci_lo,ci_hi,n_seeds,degenerate\n";
    for (const auto& row : table.rows) {
        out << row.network << ',' << metric_name(row.metric) << ',' << process_name(row.process)
            << ',' << format_double(row.pearson_r) << ',' << format_double(row.spearman_r) << ','
            << format_double(row.ci_lo) << ',' << format_double(row.ci_hi) << ',' << row.n_seeds
            << ',' << (row.degenerate ? 1 : 0) << '\n';
    }
    return out.str();
}

std::string agreement_csv(const ResultTable& table) {
    std::ostringstream out;
    out << "network,metric_a,metric_b,spearman,degenerate\n";
    for (const auto& row : table.agreement) {
        out << row.network << ',' << metric_name(row.a) << ',' << metric_name(row.b) << ','
            << format_double(row.spearman_r) << ',' << (row.degenerate ? 1 : 0) << '\n';
    }
    return out.str();
}

std::string raw_csv(const ExperimentConfig& cfg, const ResultTable& table) {
    std::ostringstream out;
    out << "network,node,degree,neighbor_degree_sum,distance2_degree_sum";
    for (const Metric m : cfg.metrics) out << ',' << metric_name(m);
    for (const auto& p : cfg.processes) out << ',' << process_name(p);
    out << '\n';
    for (const auto& row : table.raw) {
        out << row.network << ',' << row.node << ',' << row.degree << ','
            << format_double(row.neighbor_degree_sum) << ','
            << format_double(row.distance2_degree_sum);
        for (const double v : row.metrics) out << ',' << format_double(v);
        for (const double v : row.outcomes) out << ',' << format_double(v);
        out << '\n';
    }
    return out.str();
}

std::string manifest_json(const ExperimentConfig& cfg, const ResultTable& table) {
    json j;
    j["tool"] = "exforce";
    j["version"] = kVersion;
    j["config"] = json::parse(cfg.to_json());
    j["networks"] = json::array();
    for (const auto& rep : table.networks) {
        json n;
        n["id"] = rep.id;
        n["nodes"] = rep.nodes;
        n["edges"] = rep.edges;
        n["lambda"] = rep.lambda;
        n["beta"] = rep.beta;
        if (rep.calibration) {
            n["calibration"] = {{"beta", rep.calibration->beta},
                                {"multiple", rep.calibration->multiple},
                                {"fraction_in_band", rep.calibration->fraction_in_band},
                                {"met_target", rep.calibration->met_target},
                                {"evaluations", rep.calibration->evaluations}};
        }
        n["truncated_runs"] = rep.truncated_runs;
        if (!rep.error.empty()) n["error"] = rep.error;
        j["networks"].push_back(n);
    }
    j["any_failed"] = table.any_failed;
    return j.dump(2);
}

}  // namespace exforce
