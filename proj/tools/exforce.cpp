// exforce: spreading-power metrics and epidemic simulation for contact
// networks. Subcommands: summary, exf, centrality, simulate, gen, experiment.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "exforce/centrality.hpp"
#include "exforce/epidemic.hpp"
#include "exforce/experiment.hpp"
#include "exforce/expected_force.hpp"
#include "exforce/graph.hpp"
#include "exforce/netgen.hpp"
#include "exforce/parallel.hpp"
#include "exforce/stats.hpp"
#include "exforce/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace exforce;

namespace {

struct GraphArgs {
    std::string path;
    bool weighted = false;
    bool directed = false;
};

void add_graph_options(CLI::App* cmd, GraphArgs& args) {
    cmd->add_option("graph", args.path, "edge-list file (u v [w], '#' comments)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_flag("--weighted", args.weighted, "parse the third column as edge weights");
    cmd->add_flag("--directed", args.directed, "treat edges as arcs");
}

Graph load_graph(const GraphArgs& args) {
    const LoadResult res = load_edge_list_file(args.path,
                                               {.weighted = args.weighted,
                                                .directed = args.directed});
    if (res.self_loops_dropped + res.duplicates_dropped > 0)
        std::cerr << "note: dropped " << res.self_loops_dropped << " self-loop(s) and "
                  << res.duplicates_dropped << " duplicate edge(s)\n";
    return res.graph;
}

/// Connected graph for spectral/simulation commands; warns when the giant
/// component replaces a disconnected input.
Graph load_connected(const GraphArgs& args) {
    Graph g = load_graph(args);
    if (!is_connected(g)) {
        const std::size_t before = g.node_count();
        g = giant_component(g);
        std::cerr << "note: input is disconnected, using the giant component ("
                  << g.node_count() << " of " << before << " nodes)\n";
    }
    return g;
}

void write_scores_csv(std::ostream& out, const Graph& g, const std::vector<double>& scores) {
    out << "node,score\n";
    out.precision(12);
    for (NodeId v = 0; v < g.node_count(); ++v) out << g.label(v) << ',' << scores[v] << '\n';
}

std::vector<NodeId> parse_seeds(const Graph& g, const std::string& spec, std::uint64_t rng_seed) {
    std::vector<NodeId> seeds;
    if (spec == "all") {
        seeds.resize(g.node_count());
        std::iota(seeds.begin(), seeds.end(), NodeId{0});
        return seeds;
    }
    if (spec.rfind("random:", 0) == 0) {
        const auto k = static_cast<std::size_t>(std::stoul(spec.substr(7)));
        if (k < 1 || k > g.node_count())
            throw CLI::ValidationError("--seeds", "random:K needs 1 <= K <= node count");
        std::vector<NodeId> all(g.node_count());
        std::iota(all.begin(), all.end(), NodeId{0});
        RngStream rng = derive_stream(rng_seed, 0x736565647345ULL);
        for (std::size_t i = 0; i < k; ++i) {
            const auto j = i + static_cast<std::size_t>(rng.below(all.size() - i));
            std::swap(all[i], all[j]);
        }
        seeds.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k));
        std::sort(seeds.begin(), seeds.end());
        return seeds;
    }
    // a file of node labels, whitespace separated
    std::ifstream in(spec);
    if (!in) throw CLI::ValidationError("--seeds", "cannot open seed file: " + spec);
    std::unordered_map<std::string, NodeId> by_label;
    for (NodeId v = 0; v < g.node_count(); ++v) by_label.emplace(g.label(v), v);
    std::string token;
    while (in >> token) {
        const auto it = by_label.find(token);
        if (it == by_label.end())
            throw CLI::ValidationError("--seeds", "unknown node label: " + token);
        seeds.push_back(it->second);
    }
    if (seeds.empty()) throw CLI::ValidationError("--seeds", "seed file is empty");
    return seeds;
}

int cmd_summary(const GraphArgs& args) {
    const Graph g = load_graph(args);
    json j;
    j["nodes"] = g.node_count();
    j["edges"] = g.edge_count();
    j["max_degree"] = g.max_degree();
    if (!g.directed()) {
        const Graph gc = is_connected(g) ? g : giant_component(g);
        j["lambda"] = largest_eigenvalue(gc);
        if (gc.node_count() != g.node_count()) j["lambda_component_nodes"] = gc.node_count();
    } else {
        j["lambda"] = nullptr;
    }
    std::cout << j.dump(2) << '\n';
    return 0;
}

int cmd_exf(const GraphArgs& args, int x, bool modified, double alpha, std::size_t threads) {
    const Graph g = load_graph(args);
    ExfOptions opts;
    opts.transmissions = x;
    opts.weighted = args.weighted;
    opts.directed = g.directed();
    opts.alpha = alpha;
    std::vector<double> scores(g.node_count());
    if (modified) {
        parallel_for(g.node_count(), threads, [&](std::size_t v) {
            scores[v] = expected_force_modified(g, static_cast<NodeId>(v), opts);
        });
    } else {
        scores = exf_all(g, opts, threads);
    }
    write_scores_csv(std::cout, g, scores);
    return 0;
}

int cmd_centrality(const GraphArgs& args, const std::string& metric) {
    std::vector<double> scores;
    if (metric == "kshell") {
        const Graph g = load_graph(args);
        const auto shells = k_shell(g);
        scores.assign(shells.begin(), shells.end());
        write_scores_csv(std::cout, g, scores);
    } else {
        const Graph g = load_connected(args);  // eigenvector needs one component
        scores = eigenvector_centrality(g);
        write_scores_csv(std::cout, g, scores);
    }
    return 0;
}

int cmd_simulate(const GraphArgs& args, const std::string& model, const std::string& time_mode,
                 std::optional<double> beta, bool calibrate, std::optional<double> beta_multiple,
                 const std::string& seeds_spec, int sims, std::uint64_t rng_seed,
                 const std::string& out_dir, std::size_t threads) {
    const Graph g = load_connected(args);

    SimParams params;
    params.model = model == "si"    ? CompartmentModel::SI
                   : model == "sis" ? CompartmentModel::SIS
                                    : CompartmentModel::SIR;
    params.time_mode = time_mode == "disc" ? TimeMode::Discrete : TimeMode::Continuous;
    params.n_sims = sims;
    params.rng_seed = rng_seed;
    if (params.model == CompartmentModel::SI && params.time_mode == TimeMode::Discrete)
        throw CLI::ValidationError("--time", "SI simulations are continuous-time only");

    const std::vector<NodeId> seeds = parse_seeds(g, seeds_spec, rng_seed);

    json manifest;
    manifest["tool"] = "exforce simulate";
    manifest["version"] = kVersion;
    manifest["graph"] = args.path;
    manifest["weighted"] = args.weighted;
    manifest["directed"] = args.directed;
    manifest["nodes"] = g.node_count();
    manifest["edges"] = g.edge_count();
    manifest["model"] = model;
    manifest["time"] = time_mode;
    manifest["sims_per_seed"] = sims;
    manifest["rng_seed"] = rng_seed;
    manifest["seeds"] = seeds.size();

    const bool needs_beta = params.model != CompartmentModel::SI;
    if (needs_beta) {
        if (calibrate) {
            SimParams calib = params;
            calib.n_sims = std::min(sims, 50);
            std::vector<NodeId> sample = seeds;
            if (sample.size() > 100) sample.resize(100);
            const CalibrationResult cal = calibrate_beta(g, calib, sample, {0.05, 0.95}, 0.80,
                                                         threads);
            params.beta = cal.beta;
            manifest["calibration"] = {{"beta", cal.beta},
                                       {"multiple", cal.multiple},
                                       {"fraction_in_band", cal.fraction_in_band},
                                       {"met_target", cal.met_target},
                                       {"evaluations", cal.evaluations}};
            if (!cal.met_target)
                std::cerr << "warning: calibration stopped below target ("
                          << cal.fraction_in_band * 100 << "% in band)\n";
        } else if (beta_multiple) {
            params.beta = critical_beta(g, *beta_multiple);
            manifest["beta_multiple"] = *beta_multiple;
        } else if (beta) {
            params.beta = *beta;
        } else {
            throw CLI::ValidationError("--beta",
                                       "SIS/SIR need --beta, --beta-multiple, or --calibrate");
        }
        manifest["beta"] = params.beta;
    }

    std::vector<double> outcomes(seeds.size());
    std::vector<std::uint64_t> truncated(seeds.size(), 0);
    parallel_for(seeds.size(), threads, [&](std::size_t i) {
        if (params.model == CompartmentModel::SI)
            outcomes[i] = tthc_outcome(g, seeds[i], params).mean;
        else
            outcomes[i] = epidemic_potential(g, seeds[i], params, &truncated[i]);
    });
    manifest["truncated_runs"] =
        std::accumulate(truncated.begin(), truncated.end(), std::uint64_t{0});
    manifest["outcome"] = params.model == CompartmentModel::SI ? "tthc_mean" : "epo";

    fs::create_directories(out_dir);
    std::ofstream csv(fs::path(out_dir) / "outcomes.csv");
    csv << "node,outcome\n";
    csv.precision(12);
    for (std::size_t i = 0; i < seeds.size(); ++i)
        csv << g.label(seeds[i]) << ',' << outcomes[i] << '\n';
    std::ofstream mf(fs::path(out_dir) / "manifest.json");
    mf << manifest.dump(2) << '\n';
    std::cout << "wrote " << (fs::path(out_dir) / "outcomes.csv").string() << " ("
              << seeds.size() << " seeds)\n";
    return 0;
}

int cmd_gen(const std::string& family, std::size_t n, int count, std::uint64_t rng_seed,
            const std::string& out_dir) {
    DegreeSpec spec;
    spec.n = n;
    std::string degree_file;
    if (family == "pareto") {
        spec.kind = DegreeSpec::Kind::Pareto;
    } else if (family.rfind("sampled:", 0) == 0) {
        spec.kind = DegreeSpec::Kind::Sampled;
        degree_file = family.substr(8);
        std::ifstream in(degree_file);
        if (!in) throw CLI::ValidationError("--family", "cannot open " + degree_file);
        int d = 0;
        while (in >> d) spec.degree_pool.push_back(d);
    } else {
        throw CLI::ValidationError("--family", "expected pareto or sampled:<file>");
    }

    fs::create_directories(out_dir);
    json manifest;
    manifest["tool"] = "exforce gen";
    manifest["version"] = kVersion;
    manifest["family"] = family;
    manifest["n"] = n;
    manifest["count"] = count;
    manifest["rng_seed"] = rng_seed;
    manifest["graphs"] = json::array();

    for (int i = 0; i < count; ++i) {
        RngStream rng = derive_stream(rng_seed, 0x67656eULL, static_cast<std::uint64_t>(i));
        Graph g;
        json info;
        if (spec.kind == DegreeSpec::Kind::Pareto) {
            GeneratedGraph gg = chung_lu(spec, rng);
            g = std::move(gg.graph);
            info["attempts"] = gg.attempts;
            info["generated_n"] = gg.generated_n;
        } else {
            g = degree_sequence_graph(spec, rng);
        }
        char name[32];
        std::snprintf(name, sizeof name, "net_%03d.edges", i);
        const fs::path path = fs::path(out_dir) / name;
        std::ofstream out(path);
        out << "# generated by exforce gen (" << family << ", n=" << n << ", replicate " << i
            << ")\n";
        for (const auto& [u, v, w] : g.edges()) out << u << ' ' << v << '\n';
        info["file"] = name;
        info["nodes"] = g.node_count();
        info["edges"] = g.edge_count();
        manifest["graphs"].push_back(info);
        std::cout << path.string() << ": " << g.node_count() << " nodes, " << g.edge_count()
                  << " edges\n";
    }
    std::ofstream mf(fs::path(out_dir) / "manifest.json");
    mf << manifest.dump(2) << '\n';
    return 0;
}

int cmd_experiment(const std::string& config_path, const std::string& out_dir, bool dry_run,
                   std::size_t threads) {
    std::ifstream in(config_path);
    if (!in) throw CLI::ValidationError("--config", "cannot open " + config_path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    ExperimentConfig cfg = ExperimentConfig::from_json(text);
    if (threads != 0) cfg.threads = threads;

    fs::create_directories(out_dir);
    if (dry_run) {
        ResultTable empty;
        std::ofstream mf(fs::path(out_dir) / "manifest.json");
        mf << manifest_json(cfg, empty) << '\n';
        std::cout << "config valid; wrote manifest for "
                  << cfg.networks.size() << " network source(s)\n";
        return 0;
    }

    const ResultTable table = run_experiment(cfg);

    std::ofstream(fs::path(out_dir) / "results.csv") << results_csv(cfg, table);
    std::ofstream(fs::path(out_dir) / "metric_agreement.csv") << agreement_csv(table);
    std::ofstream(fs::path(out_dir) / "nodes.csv") << raw_csv(cfg, table);
    std::ofstream(fs::path(out_dir) / "manifest.json") << manifest_json(cfg, table) << '\n';

    int failed = 0;
    for (const auto& rep : table.networks) {
        if (!rep.error.empty()) {
            ++failed;
            std::cerr << "network " << rep.id << " failed: " << rep.error << '\n';
        }
    }
    std::cout << "networks: " << table.networks.size() - failed << " ok, " << failed
              << " failed; " << table.rows.size() << " correlation rows -> " << out_dir << '\n';
    return table.any_failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spreading-power metrics and epidemic simulation on contact networks"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    // summary
    GraphArgs summary_args;
    auto* summary = app.add_subcommand("summary", "graph size, max degree, and lambda as JSON");
    add_graph_options(summary, summary_args);

    // exf
    GraphArgs exf_args;
    int exf_x = 2;
    bool exf_modified = false;
    double exf_alpha = 2.0;
    std::size_t exf_threads = 0;
    auto* exf_cmd = app.add_subcommand("exf", "expected force of every node (CSV node,score)");
    add_graph_options(exf_cmd, exf_args);
    exf_cmd->add_option("--x", exf_x, "transmission events (2 or 3)")
        ->check(CLI::Range(2, 3))
        ->capture_default_str();
    exf_cmd->add_flag("--modified", exf_modified, "degree-corrected variant ln(alpha*deg)*ExF");
    exf_cmd->add_option("--alpha", exf_alpha, "rescale factor for --modified, > 1")
        ->capture_default_str();
    exf_cmd->add_option("--threads", exf_threads, "worker threads (0 = hardware)");

    // centrality
    GraphArgs cent_args;
    std::string cent_metric;
    auto* cent = app.add_subcommand("centrality", "k-shell or eigenvector centrality (CSV)");
    add_graph_options(cent, cent_args);
    cent->add_option("--metric", cent_metric, "kshell or eigen")
        ->required()
        ->check(CLI::IsMember({"kshell", "eigen"}));

    // simulate
    GraphArgs sim_args;
    std::string sim_model, sim_time = "cont", sim_seeds = "all", sim_out = "simulate-out";
    std::optional<double> sim_beta;
    std::optional<double> sim_beta_multiple;
    bool sim_calibrate = false;
    int sim_sims = 100;
    std::uint64_t sim_rng = 0;
    std::size_t sim_threads = 0;
    auto* sim = app.add_subcommand("simulate",
                                   "stochastic outbreaks per seed: SI time-to-half-coverage "
                                   "or SIS/SIR epidemic potential");
    add_graph_options(sim, sim_args);
    sim->add_option("--model", sim_model, "si, sis, or sir")
        ->required()
        ->check(CLI::IsMember({"si", "sis", "sir"}));
    sim->add_option("--time", sim_time, "cont or disc")
        ->check(CLI::IsMember({"cont", "disc"}))
        ->capture_default_str();
    sim->add_option("--beta", sim_beta, "transmission/recovery ratio");
    sim->add_option("--beta-multiple", sim_beta_multiple, "beta as a multiple of 1/lambda");
    sim->add_flag("--calibrate", sim_calibrate,
                  "binary-search beta until >= 80% of sampled seeds have EPo in [0.05, 0.95]");
    sim->add_option("--seeds", sim_seeds, "all, random:K, or a file of node labels")
        ->capture_default_str();
    sim->add_option("--sims", sim_sims, "outbreaks per seed")->capture_default_str();
    sim->add_option("--rng-seed", sim_rng, "master seed")->capture_default_str();
    sim->add_option("--out", sim_out, "output directory")->capture_default_str();
    sim->add_option("--threads", sim_threads, "worker threads (0 = hardware)");

    // gen
    std::string gen_family = "pareto", gen_out = "gen-out";
    std::size_t gen_n = 1000;
    int gen_count = 100;
    std::uint64_t gen_rng = 0;
    auto* gen = app.add_subcommand("gen", "generate random networks as edge-list files");
    gen->add_option("--family", gen_family, "pareto or sampled:<degree-file>")
        ->capture_default_str();
    gen->add_option("--n", gen_n, "target node count")->capture_default_str();
    gen->add_option("--count", gen_count, "graphs to generate")->capture_default_str();
    gen->add_option("--rng-seed", gen_rng, "master seed")->capture_default_str();
    gen->add_option("--out", gen_out, "output directory")->capture_default_str();

    // experiment
    std::string exp_config, exp_out = "experiment-out";
    bool exp_dry = false;
    std::size_t exp_threads = 0;
    auto* exp = app.add_subcommand("experiment",
                                   "metric-vs-outcome correlation sweep from a JSON config");
    exp->add_option("--config", exp_config, "config JSON")->required()->check(CLI::ExistingFile);
    exp->add_option("--out", exp_out, "output directory")->capture_default_str();
    exp->add_flag("--dry-run", exp_dry, "validate the config and write the manifest only");
    exp->add_option("--threads", exp_threads, "worker threads (0 = hardware)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (summary->parsed()) return cmd_summary(summary_args);
        if (exf_cmd->parsed())
            return cmd_exf(exf_args, exf_x, exf_modified, exf_alpha, exf_threads);
        if (cent->parsed()) return cmd_centrality(cent_args, cent_metric);
        if (sim->parsed())
            return cmd_simulate(sim_args, sim_model, sim_time, sim_beta, sim_calibrate,
                                sim_beta_multiple, sim_seeds, sim_sims, sim_rng, sim_out,
                                sim_threads);
        if (gen->parsed()) return cmd_gen(gen_family, gen_n, gen_count, gen_rng, gen_out);
        if (exp->parsed()) return cmd_experiment(exp_config, exp_out, exp_dry, exp_threads);
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
