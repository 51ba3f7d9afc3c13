#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include <json.hpp>

#include "exforce/experiment.hpp"
#include "test_util.hpp"

using namespace exforce;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name, const std::string& content)
        : path("/tmp/exforce_test_" + name) {
        std::ofstream out(path);
        out << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

ExperimentConfig tiny_config() {
    ExperimentConfig cfg;
    GeneratorSpec gen;
    gen.family = DegreeSpec::Kind::Pareto;
    gen.n = 120;
    gen.count = 2;
    cfg.networks.push_back({"pareto", gen});
    cfg.metrics = {Metric::Exf, Metric::KShell};
    cfg.processes = {{CompartmentModel::SIS, TimeMode::Continuous}};
    cfg.seed_selection = {false, 25};
    cfg.sims_per_seed = 20;
    cfg.beta_policy = {false, 1.5};
    cfg.rng_seed = 1234;
    cfg.threads = 2;
    return cfg;
}

}  // namespace

TEST_CASE("node profiles of a star") {
    const Graph g = testutil::star_graph(4);
    const auto profiles = node_profiles(g);
    CHECK(profiles[0].degree == 4);
    CHECK(profiles[0].neighbor_degree_sum == 4.0);
    CHECK(profiles[0].distance2_degree_sum == 0.0);
    CHECK(profiles[1].degree == 1);
    CHECK(profiles[1].neighbor_degree_sum == 4.0);
    CHECK(profiles[1].distance2_degree_sum == 3.0);
}

TEST_CASE("node profiles of a five-path middle") {
    const auto profiles = node_profiles(testutil::path_graph(5));
    CHECK(profiles[2].degree == 2);
    CHECK(profiles[2].neighbor_degree_sum == 4.0);
    CHECK(profiles[2].distance2_degree_sum == 2.0);
}

TEST_CASE("config json round trip") {
    const std::string text = R"({
      "rng_seed": 42,
      "networks": [
        {"id": "p", "generator": {"family": "pareto", "n": 500, "count": 3}},
        {"file": "data/some.edges"}
      ],
      "metrics": ["exf", "exf_m", "kshell"],
      "processes": [{"model": "sis", "time": "continuous"},
                    {"model": "si", "time": "cont"}],
      "seed_selection": {"random": 50},
      "sims_per_seed": 10,
      "beta_policy": {"multiple": 1.25}
    })";
    const ExperimentConfig cfg = ExperimentConfig::from_json(text);
    CHECK(cfg.networks.size() == 2);
    CHECK(cfg.metrics.size() == 3);
    CHECK(cfg.processes[1].model == CompartmentModel::SI);
    CHECK(cfg.seed_selection.random_k == 50);
    CHECK(cfg.beta_policy.multiple == 1.25);

    const ExperimentConfig again = ExperimentConfig::from_json(cfg.to_json());
    CHECK(again.to_json() == cfg.to_json());
}

TEST_CASE("config validation") {
    CHECK_THROWS_AS(ExperimentConfig::from_json(R"({"networks": [], "metrics": ["exf"],
        "processes": [{"model": "sis", "time": "cont"}]})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(ExperimentConfig::from_json(R"({"networks": [{"file": "x"}],
        "metrics": [], "processes": [{"model": "sis", "time": "cont"}]})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(ExperimentConfig::from_json(R"({"networks": [{"file": "x"}],
        "metrics": ["exf"], "processes": [{"model": "si", "time": "disc"}]})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(ExperimentConfig::from_json(R"({"networks": [{"file": "x"}],
        "metrics": ["exf"], "processes": [{"model": "sis", "time": "cont"}],
        "seed_selection": {"random": 1}})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(ExperimentConfig::from_json(R"({"networks": [{"file": "x"}],
        "metrics": ["nope"], "processes": [{"model": "sis", "time": "cont"}]})"),
                    std::invalid_argument);
}

TEST_CASE("degenerate metric variance is flagged, not dropped") {
    TempFile triangle("triangle.edges", "0 1\n1 2\n2 0\n");
    ExperimentConfig cfg;
    cfg.networks.push_back({"tri", triangle.path});
    cfg.metrics = {Metric::Exf};
    cfg.processes = {{CompartmentModel::SIS, TimeMode::Continuous}};
    cfg.sims_per_seed = 5;
    cfg.beta_policy = {false, 1.0};
    cfg.rng_seed = 9;

    const ResultTable table = run_experiment(cfg);
    REQUIRE(table.rows.size() == 1);
    CHECK(table.rows[0].degenerate);
    CHECK_FALSE(table.any_failed);
    CHECK(table.raw.size() == 3);  // all three nodes are seeds
}

TEST_CASE("sampled-family generators run from a degree file") {
    std::string degrees;
    exforce::RngStream rng(617);
    for (int i = 0; i < 300; ++i) degrees += std::to_string(1 + rng.below(4)) + "\n";
    TempFile pool("pool.degrees", degrees);

    ExperimentConfig cfg;
    GeneratorSpec gen;
    gen.family = DegreeSpec::Kind::Sampled;
    gen.degree_file = pool.path;
    gen.n = 120;
    gen.count = 1;
    cfg.networks.push_back({"sampled", gen});
    cfg.metrics = {Metric::Exf};
    cfg.processes = {{CompartmentModel::SIR, TimeMode::Discrete}};
    cfg.seed_selection = {false, 20};
    cfg.sims_per_seed = 10;
    cfg.beta_policy = {false, 1.2};
    cfg.rng_seed = 77;

    const ResultTable table = run_experiment(cfg);
    CHECK_FALSE(table.any_failed);
    REQUIRE(table.networks.size() == 1);
    CHECK(table.networks[0].nodes == 120);
    CHECK(table.raw.size() == 20);
}

TEST_CASE("missing files fail their network but the run continues") {
    TempFile path4("path4.edges", "0 1\n1 2\n2 3\n");
    ExperimentConfig cfg;
    cfg.networks.push_back({"gone", std::string("/nonexistent/never.edges")});
    cfg.networks.push_back({"path", path4.path});
    cfg.metrics = {Metric::KShell};
    cfg.processes = {{CompartmentModel::SIR, TimeMode::Discrete}};
    cfg.sims_per_seed = 4;
    cfg.beta_policy = {false, 0.8};

    const ResultTable table = run_experiment(cfg);
    CHECK(table.any_failed);
    REQUIRE(table.networks.size() == 2);
    CHECK_FALSE(table.networks[0].error.empty());
    CHECK(table.networks[1].error.empty());
    CHECK(table.rows.size() == 1);  // only the healthy network produced rows
}

TEST_CASE("experiments are reproducible and thread-count independent") {
    const ExperimentConfig cfg = tiny_config();
    const ResultTable a = run_experiment(cfg);
    ExperimentConfig single = cfg;
    single.threads = 1;
    const ResultTable b = run_experiment(single);
    CHECK(results_csv(cfg, a) == results_csv(cfg, b));
    CHECK(raw_csv(cfg, a) == raw_csv(cfg, b));
    CHECK(agreement_csv(a) == agreement_csv(b));
    CHECK_FALSE(a.any_failed);
    CHECK(a.raw.size() == 2 * 25);  // networks x seeds
    CHECK(a.rows.size() == 2 * 2);  // networks x metrics (one process)
    CHECK(a.agreement.size() == 2);  // one metric pair per network

    // a different master seed must actually change the simulations
    ExperimentConfig other = tiny_config();
    other.rng_seed = 777;
    CHECK(results_csv(cfg, run_experiment(other)) != results_csv(cfg, a));
}

TEST_CASE("manifest records enough to rerun") {
    const ExperimentConfig cfg = tiny_config();
    ResultTable table;  // a dry manifest needs no results
    const std::string manifest = manifest_json(cfg, table);
    CHECK(manifest.find("\"version\"") != std::string::npos);

    // the embedded config must parse back to an identical config
    const auto echoed = ExperimentConfig::from_json(
        nlohmann::json::parse(manifest).at("config").dump());
    CHECK(echoed.to_json() == cfg.to_json());
}
