// Tests for run-configuration parsing: defaults, strict key checking, type
// and range validation, per-entry seed derivation, and file round-trips.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <string>

#include "frogtoad/config.hpp"
#include "frogtoad/probes.hpp"
#include "frogtoad/rng.hpp"

namespace fs = std::filesystem;
using namespace frogtoad;
using config::ConfigError;
using config::RunConfig;

namespace {

fs::path temp_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("frogtoad_config_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// The stream tag that seeds per-configuration training runs.
constexpr std::uint64_t kGridTag = 0x51EE;

}  // namespace

TEST_CASE("defaults: desk-scale regime with derived training seed") {
    const RunConfig cfg = config::default_config();
    CHECK(cfg.seed == 42);
    CHECK(cfg.out_root == fs::path("runs"));
    CHECK(cfg.dataset_count == 500000);
    CHECK(cfg.split.test_size == 100000);
    CHECK(cfg.split.proportions == std::array<double, 4>{0.40, 0.40, 0.10, 0.10});
    CHECK(cfg.probe_count == probes::kDefaultProbeCount);
    CHECK(cfg.grid.empty());

    // Raised refill ceiling plus asymmetric starts: every label recoverable
    // from visible features, and distress actually occurs in episodes.
    CHECK(cfg.oracle.refill_ceiling == 20);
    CHECK(cfg.world.start_energy_frog == 20);
    CHECK(cfg.world.start_energy_toad == 6);

    CHECK(cfg.training.learning_rate == doctest::Approx(5e-5));
    CHECK(cfg.training.hidden_layers == 1);
    CHECK(cfg.training.neurons_per_layer == 15);
    CHECK(cfg.training.batch_size == 25);
    CHECK(cfg.training.seed == mix_seed(42, kGridTag, 0));

    CHECK(cfg.cmni_thresholds.candidate_mns == doctest::Approx(0.01));
    CHECK(cfg.circuit_thresholds.mirror_share == doctest::Approx(0.8));
    CHECK(cfg.report_flags.mirror_positive_val_loss == doctest::Approx(0.06));

    // The empty document and the default object agree.
    const RunConfig parsed = config::parse_config("{}", "<test>");
    CHECK(parsed.seed == cfg.seed);
    CHECK(parsed.training == cfg.training);
    CHECK(parsed.dataset_count == cfg.dataset_count);
}

TEST_CASE("full document: every recognized section lands") {
    const std::string text = R"({
        "seed": 9,
        "out_root": "elsewhere",
        "world": {"rough_prob": 0.25, "fly_prob": 0.1, "rough_run_max": 2,
                  "start_energy_frog": 18, "start_energy_toad": 5},
        "oracle": {"refill_ceiling": 19, "help_min_energy": 3, "leap_lookahead": 4},
        "dataset": {"count": 12000, "test_size": 2000,
                    "proportions": [0.25, 0.25, 0.25, 0.25]},
        "training": {"learning_rate": 1e-4, "hidden_layers": 2, "neurons_per_layer": 9,
                     "batch_size": 20, "dropout_rate": 0.1, "max_epochs": 7,
                     "patience": 3, "seed": 77},
        "grid": [{"learning_rate": 2e-5}, {"neurons_per_layer": 30, "seed": 5}],
        "probe": {"count": 500},
        "thresholds": {
            "cmni": {"candidate_mns": 0.02, "differentiator_max_delta": 0.03,
                     "differentiator_min_delta": 0.004},
            "circuits": {"mirror_share": 0.9, "differentiator_share": 0.1,
                         "action_gap": 1.5, "edge_z": 0.5},
            "report": {"mirror_positive_val_loss": 0.05, "mirror_positive_cmni": 0.01,
                       "mirror_negative_cmni": 0.001}
        }
    })";
    const RunConfig cfg = config::parse_config(text, "<test>");

    CHECK(cfg.seed == 9);
    CHECK(cfg.out_root == fs::path("elsewhere"));
    CHECK(cfg.world.rough_prob == doctest::Approx(0.25));
    CHECK(cfg.world.start_energy_toad == 5);
    CHECK(cfg.oracle.refill_ceiling == 19);
    CHECK(cfg.oracle.leap_lookahead == 4);
    CHECK(cfg.dataset_count == 12000);
    CHECK(cfg.split.test_size == 2000);
    CHECK(cfg.split.proportions == std::array<double, 4>{0.25, 0.25, 0.25, 0.25});
    CHECK(cfg.training.learning_rate == doctest::Approx(1e-4));
    CHECK(cfg.training.hidden_layers == 2);
    CHECK(cfg.training.seed == 77);  // explicit seed wins over derivation
    CHECK(cfg.probe_count == 500);
    CHECK(cfg.cmni_thresholds.differentiator_min_delta == doctest::Approx(0.004));
    CHECK(cfg.circuit_thresholds.action_gap == doctest::Approx(1.5));
    CHECK(cfg.report_flags.mirror_positive_cmni == doctest::Approx(0.01));

    // Grid entries start from the training section, then override.
    REQUIRE(cfg.grid.size() == 2);
    CHECK(cfg.grid[0].learning_rate == doctest::Approx(2e-5));
    CHECK(cfg.grid[0].neurons_per_layer == 9);      // inherited
    CHECK(cfg.grid[0].hidden_layers == 2);          // inherited
    CHECK(cfg.grid[0].seed == mix_seed(9, kGridTag, 0));  // derived per index
    CHECK(cfg.grid[1].neurons_per_layer == 30);
    CHECK(cfg.grid[1].learning_rate == doctest::Approx(1e-4));  // inherited
    CHECK(cfg.grid[1].seed == 5);                   // explicit wins
}

TEST_CASE("seed derivation matches the stock sweep stream") {
    const std::string text = R"({"seed": 123, "dataset": {"count": 1000, "test_size": 100},
        "grid": [{}, {}, {}], "probe": {"count": 50}})";
    const RunConfig cfg = config::parse_config(text, "<test>");
    REQUIRE(cfg.grid.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(cfg.grid[i].seed == mix_seed(123, kGridTag, i));
    }
    CHECK(cfg.training.seed == mix_seed(123, kGridTag, 0));
    // Different global seeds give different derived streams.
    const RunConfig other = config::parse_config(R"({"seed": 124})", "<test>");
    CHECK(other.training.seed != cfg.training.seed);
}

TEST_CASE("unknown keys are rejected with dotted paths") {
    CHECK_THROWS_WITH_AS(config::parse_config(R"({"bogus": 1})", "conf.json"),
                         doctest::Contains("unknown key 'bogus'"), ConfigError);
    CHECK_THROWS_WITH_AS(config::parse_config(R"({"world": {"gravity": 9.8}})", "conf.json"),
                         doctest::Contains("unknown key 'world.gravity'"), ConfigError);
    CHECK_THROWS_WITH_AS(
        config::parse_config(R"({"thresholds": {"cmni": {"xyz": 1}}})", "conf.json"),
        doctest::Contains("unknown key 'thresholds.cmni.xyz'"), ConfigError);
    CHECK_THROWS_WITH_AS(
        config::parse_config(R"({"grid": [{"max_epoch": 3}]})", "conf.json"),
        doctest::Contains("unknown key 'grid[0].max_epoch'"), ConfigError);
    // Error messages carry the origin label.
    CHECK_THROWS_WITH_AS(config::parse_config(R"({"bogus": 1})", "conf.json"),
                         doctest::Contains("conf.json:"), ConfigError);
}

TEST_CASE("type errors name the offending key") {
    CHECK_THROWS_WITH_AS(config::parse_config(R"({"seed": -5})", "<t>"),
                         doctest::Contains("non-negative integer"), ConfigError);
    CHECK_THROWS_WITH_AS(config::parse_config(R"({"out_root": 4})", "<t>"),
                         doctest::Contains("'out_root' must be a string"), ConfigError);
    CHECK_THROWS_WITH_AS(
        config::parse_config(R"({"world": {"rough_prob": "wet"}})", "<t>"),
        doctest::Contains("'world.rough_prob' must be a number"), ConfigError);
    CHECK_THROWS_WITH_AS(
        config::parse_config(R"({"dataset": {"count": 1.5}})", "<t>"),
        doctest::Contains("'dataset.count' must be an integer"), ConfigError);
    CHECK_THROWS_WITH_AS(config::parse_config(R"({"grid": {}})", "<t>"),
                         doctest::Contains("'grid' must be an array"), ConfigError);
    CHECK_THROWS_WITH_AS(
        config::parse_config(R"({"dataset": {"proportions": [0.5, 0.5]}})", "<t>"),
        doctest::Contains("array of 4 numbers"), ConfigError);
    CHECK_THROWS_WITH_AS(config::parse_config("[1,2]", "<t>"),
                         doctest::Contains("top level must be a JSON object"), ConfigError);
    CHECK_THROWS_WITH_AS(config::parse_config("not json at all", "<t>"),
                         doctest::Contains("not valid JSON"), ConfigError);
}

TEST_CASE("range validation rejects infeasible configurations") {
    // Dataset must leave training rows after the test split.
    CHECK_THROWS_WITH_AS(
        config::parse_config(R"({"dataset": {"count": 900, "test_size": 900}})", "<t>"),
        doctest::Contains("must exceed"), ConfigError);
    // Probes are sampled from the test split, so cannot outnumber it.
    CHECK_THROWS_WITH_AS(
        config::parse_config(
            R"({"dataset": {"count": 2000, "test_size": 100}, "probe": {"count": 200}})", "<t>"),
        doctest::Contains("probe.count cannot exceed"), ConfigError);
    // Domain checks from the underlying modules surface as config errors.
    CHECK_THROWS_AS(config::parse_config(R"({"world": {"rough_prob": 1.5}})", "<t>"),
                    ConfigError);
    CHECK_THROWS_AS(config::parse_config(R"({"oracle": {"refill_ceiling": 21}})", "<t>"),
                    ConfigError);
    CHECK_THROWS_AS(config::parse_config(R"({"training": {"hidden_layers": 4}})", "<t>"),
                    ConfigError);
    CHECK_THROWS_AS(config::parse_config(R"({"grid": [{"batch_size": 19}]})", "<t>"),
                    ConfigError);
    CHECK_THROWS_WITH_AS(config::parse_config(R"({"dataset": {"count": 0, "test_size": -1}})",
                                              "<t>"),
                         doctest::Contains("test_size must be >= 1"), ConfigError);
    CHECK_THROWS_WITH_AS(
        config::parse_config(
            R"({"thresholds": {"circuits": {"mirror_share": 0.1, "differentiator_share": 0.5}}})",
            "<t>"),
        doctest::Contains("differentiator_share < mirror_share"), ConfigError);
    CHECK_THROWS_WITH_AS(
        config::parse_config(
            R"({"thresholds": {"report": {"mirror_positive_cmni": 0.0001,
                                          "mirror_negative_cmni": 0.001}}})",
            "<t>"),
        doctest::Contains("mirror_positive_cmni > mirror_negative_cmni"), ConfigError);
}

TEST_CASE("check_run_config catches direct struct mutations") {
    RunConfig cfg = config::default_config();
    CHECK_NOTHROW(config::check_run_config(cfg));
    cfg.probe_count = 0;
    CHECK_THROWS_WITH_AS(config::check_run_config(cfg),
                         doctest::Contains("probe.count must be >= 1"), ConfigError);
    cfg = config::default_config();
    cfg.out_root.clear();
    CHECK_THROWS_WITH_AS(config::check_run_config(cfg),
                         doctest::Contains("out_root"), ConfigError);
    cfg = config::default_config();
    cfg.circuit_thresholds.action_gap = 0.0;
    CHECK_THROWS_WITH_AS(config::check_run_config(cfg),
                         doctest::Contains("action_gap"), ConfigError);
}

TEST_CASE("write_config then load_config reproduces the configuration") {
    const fs::path dir = temp_dir("roundtrip");
    RunConfig cfg = config::parse_config(R"({
        "seed": 31,
        "out_root": "bundles",
        "world": {"rough_prob": 0.22},
        "dataset": {"count": 5000, "test_size": 600},
        "training": {"hidden_layers": 2, "neurons_per_layer": 11, "max_epochs": 4},
        "grid": [{"learning_rate": 3e-5}, {"learning_rate": 9e-5, "dropout_rate": 0.2}],
        "probe": {"count": 250}
    })", "<test>");

    const fs::path file = dir / "config.json";
    config::write_config(file, cfg);
    const RunConfig back = config::load_config(file);

    CHECK(back.seed == cfg.seed);
    CHECK(back.out_root == cfg.out_root);
    CHECK(back.world.rough_prob == doctest::Approx(cfg.world.rough_prob));
    CHECK(back.oracle.refill_ceiling == cfg.oracle.refill_ceiling);
    CHECK(back.dataset_count == cfg.dataset_count);
    CHECK(back.split == cfg.split);
    CHECK(back.training == cfg.training);
    CHECK(back.grid == cfg.grid);
    CHECK(back.probe_count == cfg.probe_count);
    CHECK(back.cmni_thresholds.candidate_mns ==
          doctest::Approx(cfg.cmni_thresholds.candidate_mns));
    CHECK(back.circuit_thresholds.edge_z == doctest::Approx(cfg.circuit_thresholds.edge_z));
    CHECK(back.report_flags.mirror_negative_cmni ==
          doctest::Approx(cfg.report_flags.mirror_negative_cmni));

    // Written bytes are deterministic.
    const fs::path file2 = dir / "config2.json";
    config::write_config(file2, cfg);
    std::ifstream a(file, std::ios::binary), b(file2, std::ios::binary);
    const std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
    const std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
    CHECK(sa == sb);
    CHECK(!sa.empty());
    fs::remove_all(dir);
}

TEST_CASE("load_config on a missing file names the path") {
    CHECK_THROWS_WITH_AS(config::load_config("/nonexistent/nowhere.json"),
                         doctest::Contains("cannot open config file '/nonexistent/nowhere.json'"),
                         ConfigError);
}
