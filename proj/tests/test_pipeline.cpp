// End-to-end tests for the pipeline orchestrator: bundle completeness,
// determinism of artifacts, manifest round-trips, and the record-CSV
// plumbing the standalone report path uses.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "frogtoad/checkpoint.hpp"
#include "frogtoad/config.hpp"
#include "frogtoad/dataset.hpp"
#include "frogtoad/env.hpp"
#include "frogtoad/evalreport.hpp"
#include "frogtoad/oracle.hpp"
#include "frogtoad/pipeline.hpp"
#include "frogtoad/training.hpp"

namespace fs = std::filesystem;
using namespace frogtoad;

namespace {

fs::path temp_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("frogtoad_pipeline_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// A configuration small enough for tests but exercising every stage.
config::RunConfig tiny_config() {
    return config::parse_config(R"({
        "seed": 17,
        "dataset": {"count": 3000, "test_size": 400},
        "training": {"hidden_layers": 1, "neurons_per_layer": 8, "max_epochs": 2},
        "probe": {"count": 200}
    })", "<test>");
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("run_all writes a complete, internally consistent bundle") {
    const fs::path dir = temp_dir("bundle");
    const config::RunConfig cfg = tiny_config();
    const auto summary = pipeline::run_all(cfg, dir / "run");

    for (const char* name :
         {"config.json", "dataset_manifest.json", "activation_stats.csv", "cmni.json",
          "cmni.csv", "cmni_case.txt", "circuit_graphs.json", "circuit_graphs_summary.txt",
          "eval.json", "eval.txt", "report_table.csv", "report_series.csv",
          "report_summary.txt", "run_manifest.json"}) {
        INFO("artifact: " << name);
        CHECK(fs::exists(dir / "run" / name));
    }
    CHECK(fs::exists(dir / "run" / "sweep" / "sweep_manifest.csv"));
    CHECK(fs::exists(dir / "run" / "sweep" / "cfg000"));

    // Headline numbers agree with the sweep entries.
    REQUIRE(summary.entries.size() == 1);
    CHECK(summary.best_config == 0);
    CHECK(summary.entries[0].status == "ok");
    CHECK(summary.best_val_loss == doctest::Approx(summary.entries[0].best_val_loss));
    CHECK(summary.run_stamp == neural::run_stamp_from_seed(cfg.seed));
    CHECK(summary.run_dir == dir / "run");
    CHECK(summary.cmni == doctest::Approx(summary.mne / 12.0));  // 8 hidden + 4 output

    // The sweep manifest on disk parses back to the in-memory entries.
    const auto entries = neural::read_sweep_manifest(dir / "run" / "sweep" / "sweep_manifest.csv");
    REQUIRE(entries.size() == 1);
    CHECK(entries[0].status == "ok");
    CHECK(entries[0].hp.neurons_per_layer == 8);
    CHECK(entries[0].best_epoch == summary.entries[0].best_epoch);
    CHECK(entries[0].best_checkpoint == summary.entries[0].best_checkpoint);

    // The echoed config reloads to the same run (seed + shapes).
    const auto echoed = config::load_config(dir / "run" / "config.json");
    CHECK(echoed.seed == cfg.seed);
    CHECK(echoed.dataset_count == cfg.dataset_count);
    CHECK(echoed.training == cfg.training);
    CHECK(echoed.probe_count == cfg.probe_count);

    // The best checkpoint named by the manifest exists and loads.
    const auto ckpt =
        neural::load_checkpoint(dir / "run" / "sweep" / entries[0].best_checkpoint);
    CHECK(ckpt.epoch == entries[0].best_epoch);

    fs::remove_all(dir);
}

TEST_CASE("run_all is deterministic: same config, same bytes") {
    const fs::path dir = temp_dir("determinism");
    const config::RunConfig cfg = tiny_config();
    pipeline::run_all(cfg, dir / "a");
    pipeline::run_all(cfg, dir / "b");

    // Spot-check the artifacts where nondeterminism would creep in first:
    // trained weights, sampled probes, and the derived reports.
    for (const char* name : {"config.json", "cmni.json", "activation_stats.csv",
                             "report_table.csv", "report_series.csv", "run_manifest.json"}) {
        INFO("artifact: " << name);
        CHECK(slurp(dir / "a" / name) == slurp(dir / "b" / name));
    }
    CHECK(slurp(dir / "a" / "sweep" / "sweep_manifest.csv") ==
          slurp(dir / "b" / "sweep" / "sweep_manifest.csv"));
    fs::remove_all(dir);
}

TEST_CASE("run_all validates its configuration up front") {
    config::RunConfig cfg = tiny_config();
    cfg.probe_count = 500;  // larger than the 400-row test split
    CHECK_THROWS_AS(pipeline::run_all(cfg, temp_dir("invalid") / "run"), config::ConfigError);
}

TEST_CASE("default_run_dir stamps the directory from the seed") {
    config::RunConfig cfg = config::default_config();
    cfg.seed = 42;
    cfg.out_root = "bundles";
    const fs::path expected =
        fs::path("bundles") / ("run-" + neural::run_stamp_from_seed(42));
    CHECK(pipeline::default_run_dir(cfg) == expected);
}

TEST_CASE("sweep manifest reader: grid round-trip including failure rows") {
    const fs::path dir = temp_dir("manifest");
    // Two real configurations; tiny budgets keep this fast.
    std::vector<neural::Hyperparams> grid(2);
    grid[0].neurons_per_layer = 6;
    grid[0].max_epochs = 1;
    grid[0].seed = 3;
    grid[1].neurons_per_layer = 7;
    grid[1].max_epochs = 1;
    grid[1].learning_rate = 1e-4;
    grid[1].seed = 4;

    dataset::Dataset train = dataset::generate(600, env::WorldConfig{}, oracle::OracleConfig{}, 5);
    dataset::Dataset val = dataset::generate(200, env::WorldConfig{}, oracle::OracleConfig{}, 6);
    const auto entries = neural::sweep(grid, train, val, dir);
    const auto back = neural::read_sweep_manifest(dir / "sweep_manifest.csv");
    REQUIRE(back.size() == entries.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].hp == entries[i].hp);
        CHECK(back[i].status == entries[i].status);
        CHECK(back[i].best_epoch == entries[i].best_epoch);
        CHECK(back[i].best_val_loss == doctest::Approx(entries[i].best_val_loss).epsilon(1e-6));
        CHECK(back[i].best_checkpoint == entries[i].best_checkpoint);
    }

    // Error text may contain commas; the reader keeps the remainder intact.
    {
        std::ifstream in(dir / "sweep_manifest.csv");
        std::string header, row;
        std::getline(in, header);
        std::getline(in, row);
        std::ofstream out(dir / "edited.csv", std::ios::trunc);
        out << header << "\n" << row << "\n";
        // A synthetic failed row with a comma-bearing error message.
        out << "1,0.0001,1,7,25,0,4,10,4,failed,0,0,,exploded, badly\n";
    }
    const auto edited = neural::read_sweep_manifest(dir / "edited.csv");
    REQUIRE(edited.size() == 2);
    CHECK(edited[1].status == "failed");
    CHECK(edited[1].error == "exploded, badly");

    // Malformed content is rejected with context.
    {
        std::ofstream out(dir / "bad.csv", std::ios::trunc);
        out << "wrong,header\n";
    }
    CHECK_THROWS_WITH_AS(neural::read_sweep_manifest(dir / "bad.csv"),
                         doctest::Contains("header"), std::runtime_error);
    CHECK_THROWS_AS(neural::read_sweep_manifest(dir / "missing.csv"), std::runtime_error);
    fs::remove_all(dir);
}

TEST_CASE("mirror-index record CSV: write, append, read back") {
    const fs::path dir = temp_dir("records");
    const fs::path file = dir / "records.csv";
    const std::vector<evalreport::CheckpointCmni> records = {
        {"cfg000/ck-epoch1.json", 1, 0.11, 0.25, 0.0131578947368421},
        {"cfg000/ck-epoch2.json", 2, 0.09, 0.31, 0.0163157894736842},
    };
    evalreport::write_cmni_records(file, records);
    auto back = evalreport::read_cmni_records(file);
    REQUIRE(back.size() == 2);
    CHECK(back[0].checkpoint == records[0].checkpoint);
    CHECK(back[0].epoch == 1);
    CHECK(back[0].val_loss == records[0].val_loss);    // %.17g keeps doubles exact
    CHECK(back[1].cmni == records[1].cmni);

    evalreport::append_cmni_record(file, {"cfg001/ck-epoch1.json", 1, 0.2, 0.0, 0.0});
    back = evalreport::read_cmni_records(file);
    REQUIRE(back.size() == 3);
    CHECK(back[2].checkpoint == "cfg001/ck-epoch1.json");

    // Append also bootstraps a fresh file with the header.
    const fs::path fresh = dir / "fresh.csv";
    evalreport::append_cmni_record(fresh, {"solo.json", 5, 0.5, 0.1, 0.01});
    back = evalreport::read_cmni_records(fresh);
    REQUIRE(back.size() == 1);
    CHECK(back[0].epoch == 5);

    // Commas cannot hide inside checkpoint ids.
    CHECK_THROWS_AS(evalreport::append_cmni_record(file, {"bad,id", 1, 0.1, 0.1, 0.01}),
                    std::invalid_argument);
    // Malformed rows are rejected with file/line context.
    {
        std::ofstream out(dir / "bad.csv", std::ios::trunc);
        out << "checkpoint,epoch,val_loss,mns_total,cmni\n";
        out << "id,notanumber,0.1,0.1,0.01\n";
    }
    CHECK_THROWS_WITH_AS(evalreport::read_cmni_records(dir / "bad.csv"),
                         doctest::Contains("bad.csv:2"), std::runtime_error);
    CHECK_THROWS_AS(evalreport::read_cmni_records(dir / "missing.csv"), std::runtime_error);
    fs::remove_all(dir);
}

TEST_CASE("eval record CSV resolves relative paths against its directory") {
    const fs::path dir = temp_dir("evalrecords");
    fs::create_directories(dir / "sub");
    // A real eval JSON to point at.
    evalreport::EvalResult result;
    result.total = 10;
    result.accuracy = 0.5;
    result.confusion[0][0] = 5;
    result.confusion[1][1] = 5;
    evalreport::write_eval_json(dir / "sub" / "eval.json", result);
    {
        std::ofstream out(dir / "evals.csv", std::ios::trunc);
        out << "checkpoint,path\n";
        out << "cfg000/best.json,sub/eval.json\n";
    }
    const auto evals = evalreport::read_eval_records(dir / "evals.csv");
    REQUIRE(evals.size() == 1);
    CHECK(evals[0].checkpoint == "cfg000/best.json");
    CHECK(evals[0].result.accuracy == doctest::Approx(0.5));
    CHECK(evals[0].result.total == 10);

    {
        std::ofstream out(dir / "bad.csv", std::ios::trunc);
        out << "checkpoint,path\n";
        out << "norow\n";
    }
    CHECK_THROWS_AS(evalreport::read_eval_records(dir / "bad.csv"), std::runtime_error);
    fs::remove_all(dir);
}
