// Command-line front end for the Frog-and-Toad cooperation pipeline:
// dataset generation, network training, activation probing, mirror-index
// scoring, circuit extraction, evaluation, and consolidated reporting.
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "frogtoad/checkpoint.hpp"
#include "frogtoad/circuits.hpp"
#include "frogtoad/cmni.hpp"
#include "frogtoad/config.hpp"
#include "frogtoad/dataset.hpp"
#include "frogtoad/evalreport.hpp"
#include "frogtoad/pipeline.hpp"
#include "frogtoad/probes.hpp"
#include "frogtoad/training.hpp"

namespace {

namespace fs = std::filesystem;
using frogtoad::config::ConfigError;
using frogtoad::config::RunConfig;

constexpr int kExitUsage = 64;         // bad flags or missing required flags
constexpr int kExitConfig = 65;        // invalid configuration values
constexpr int kExitMissingInput = 66;  // referenced input path does not exist
constexpr int kExitFailure = 70;       // runtime failure while executing

[[noreturn]] void die(int code, const std::string& category, const std::string& msg) {
    std::cerr << "error: " << category << ": " << msg << std::endl;
    std::exit(code);
}

void require_exists(const fs::path& p, const std::string& what) {
    if (!fs::exists(p)) {
        die(kExitMissingInput, "missing-input", what + " '" + p.string() + "' does not exist");
    }
}

RunConfig load_effective_config(const std::optional<std::string>& config_path) {
    if (!config_path) return frogtoad::config::default_config();
    require_exists(*config_path, "config file");
    return frogtoad::config::load_config(*config_path);
}

// Shared flag set: every subcommand accepts a config file plus targeted
// overrides; flags win over file values.
struct CommonOpts {
    std::optional<std::string> config;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* sub, CommonOpts& opts) {
    sub->add_option("--config", opts.config, "JSON config file (defaults apply when omitted)");
    sub->add_option("--seed", opts.seed, "global seed override");
}

RunConfig effective(const CommonOpts& opts) {
    RunConfig cfg = load_effective_config(opts.config);
    if (opts.seed) cfg.seed = *opts.seed;
    return cfg;
}

void apply_hp_overrides(frogtoad::neural::Hyperparams& hp,
                        const std::optional<double>& lr, const std::optional<int>& layers,
                        const std::optional<int>& neurons, const std::optional<int>& batch,
                        const std::optional<double>& dropout, const std::optional<int>& epochs,
                        const std::optional<int>& patience) {
    if (lr) hp.learning_rate = *lr;
    if (layers) hp.hidden_layers = *layers;
    if (neurons) hp.neurons_per_layer = *neurons;
    if (batch) hp.batch_size = *batch;
    if (dropout) hp.dropout_rate = *dropout;
    if (epochs) hp.max_epochs = *epochs;
    if (patience) hp.patience = *patience;
}

void check_hp_or_config_error(const frogtoad::neural::Hyperparams& hp) {
    try {
        frogtoad::neural::check_hyperparams(hp);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

// Probes a checkpoint's network over sampled test states and returns the
// per-neuron activation statistics.
std::vector<frogtoad::probes::NeuronScenarioStats> probe_stats(
    const frogtoad::neural::Network& net, const frogtoad::dataset::Dataset& test_set,
    std::size_t count, std::uint64_t seed) {
    const auto quads = frogtoad::probes::build_scenarios(test_set, count, seed);
    const auto cap = frogtoad::probes::capture(net, quads);
    return frogtoad::probes::activation_stats(cap);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Frog-and-Toad cooperation pipeline: generate labeled gameplay data, train "
                 "small action networks, probe distress scenarios, score mirror-neuron "
                 "patterns, and extract weight circuits."};
    app.require_subcommand(1);
    app.set_version_flag("--version", "frogtoad 1.0.0");

    // --- gen ---
    auto* gen_cmd = app.add_subcommand("gen", "generate a labeled dataset CSV plus manifest");
    CommonOpts gen_common;
    add_common(gen_cmd, gen_common);
    std::optional<long long> gen_count;
    std::string gen_out = "dataset.csv";
    gen_cmd->add_option("--count", gen_count, "number of distinct rows to generate");
    gen_cmd->add_option("--out", gen_out, "output CSV path (manifest lands next to it)");

    // --- split ---
    auto* split_cmd =
        app.add_subcommand("split", "draw the balanced test split; the rest becomes train");
    CommonOpts split_common;
    add_common(split_cmd, split_common);
    std::string split_in;
    std::optional<long long> split_test_size;
    std::string split_out_train = "train.csv";
    std::string split_out_test = "test.csv";
    split_cmd->add_option("--in", split_in, "dataset CSV to split")->required();
    split_cmd->add_option("--test-size", split_test_size, "test rows (composition from config)");
    split_cmd->add_option("--out-train", split_out_train, "training-split output CSV");
    split_cmd->add_option("--out-test", split_out_test, "test-split output CSV");

    // --- train ---
    auto* train_cmd = app.add_subcommand("train", "train one configuration with checkpointing");
    CommonOpts train_common;
    add_common(train_cmd, train_common);
    std::string train_train, train_val;
    std::string train_out = "train_out";
    std::optional<double> train_lr, train_dropout;
    std::optional<int> train_layers, train_neurons, train_batch, train_epochs, train_patience;
    train_cmd->add_option("--train", train_train, "training CSV")->required();
    train_cmd->add_option("--val", train_val, "validation CSV")->required();
    train_cmd->add_option("--out", train_out, "output directory");
    train_cmd->add_option("--learning-rate", train_lr, "learning rate");
    train_cmd->add_option("--hidden-layers", train_layers, "hidden layer count (1..3)");
    train_cmd->add_option("--neurons", train_neurons, "neurons per hidden layer (5..50)");
    train_cmd->add_option("--batch-size", train_batch, "mini-batch size (20..25)");
    train_cmd->add_option("--dropout", train_dropout, "dropout rate [0,1)");
    train_cmd->add_option("--max-epochs", train_epochs, "epoch budget");
    train_cmd->add_option("--patience", train_patience, "early-stop patience");

    // --- sweep ---
    auto* sweep_cmd =
        app.add_subcommand("sweep", "train the config grid (stock grid when none given)");
    CommonOpts sweep_common;
    add_common(sweep_cmd, sweep_common);
    std::string sweep_train, sweep_val;
    std::string sweep_out = "sweep_out";
    std::optional<int> sweep_epochs;
    sweep_cmd->add_option("--train", sweep_train, "training CSV")->required();
    sweep_cmd->add_option("--val", sweep_val, "validation CSV")->required();
    sweep_cmd->add_option("--out", sweep_out, "output directory");
    sweep_cmd->add_option("--max-epochs", sweep_epochs, "epoch budget override for all entries");

    // --- probe ---
    auto* probe_cmd =
        app.add_subcommand("probe", "capture distress-scenario activation statistics");
    CommonOpts probe_common;
    add_common(probe_cmd, probe_common);
    std::string probe_ckpt, probe_test;
    std::string probe_out = "activation_stats.csv";
    std::optional<std::size_t> probe_count;
    probe_cmd->add_option("--checkpoint", probe_ckpt, "checkpoint JSON")->required();
    probe_cmd->add_option("--test", probe_test, "test-split CSV to sample states from")
        ->required();
    probe_cmd->add_option("--count", probe_count, "probe states to sample");
    probe_cmd->add_option("--out", probe_out, "output statistics CSV");

    // --- cmni ---
    auto* cmni_cmd = app.add_subcommand(
        "cmni", "score a checkpoint's mirror-neuron index from probe statistics");
    CommonOpts cmni_common;
    add_common(cmni_cmd, cmni_common);
    std::string cmni_ckpt;
    std::optional<std::string> cmni_test, cmni_stats, cmni_append, cmni_record_id;
    std::string cmni_out_json = "cmni.json";
    std::string cmni_out_csv = "cmni.csv";
    std::optional<std::size_t> cmni_count;
    cmni_cmd->add_option("--checkpoint", cmni_ckpt, "checkpoint JSON")->required();
    cmni_cmd->add_option("--test", cmni_test, "test-split CSV (probes are drawn fresh)");
    cmni_cmd->add_option("--stats", cmni_stats, "reuse an existing activation statistics CSV");
    cmni_cmd->add_option("--count", cmni_count, "probe states to sample");
    cmni_cmd->add_option("--out-json", cmni_out_json, "mirror-index report JSON");
    cmni_cmd->add_option("--out-csv", cmni_out_csv, "per-neuron table CSV");
    cmni_cmd->add_option("--append-record", cmni_append,
                         "append a checkpoint record to this records CSV");
    cmni_cmd->add_option("--record-id", cmni_record_id,
                         "checkpoint id for the record (default: checkpoint file name)");

    // --- circuits ---
    auto* circuits_cmd =
        app.add_subcommand("circuits", "extract hub circuits from a scored checkpoint");
    CommonOpts circuits_common;
    add_common(circuits_cmd, circuits_common);
    std::string circuits_ckpt, circuits_cmni;
    std::string circuits_out = "circuit_graphs.json";
    circuits_cmd->add_option("--checkpoint", circuits_ckpt, "checkpoint JSON")->required();
    circuits_cmd->add_option("--cmni", circuits_cmni, "mirror-index report JSON")->required();
    circuits_cmd->add_option("--out", circuits_out, "graph JSON output (summary lands next to it)");

    // --- eval ---
    auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on a test split");
    CommonOpts eval_common;
    add_common(eval_cmd, eval_common);
    std::string eval_ckpt, eval_test;
    std::string eval_out = "eval.json";
    eval_cmd->add_option("--checkpoint", eval_ckpt, "checkpoint JSON")->required();
    eval_cmd->add_option("--test", eval_test, "test-split CSV")->required();
    eval_cmd->add_option("--out", eval_out, "evaluation JSON output");

    // --- report ---
    auto* report_cmd =
        app.add_subcommand("report", "consolidate sweep, mirror-index, and eval records");
    CommonOpts report_common;
    add_common(report_cmd, report_common);
    std::string report_sweep, report_records;
    std::optional<std::string> report_eval_records;
    std::string report_out = "report_out";
    report_cmd->add_option("--sweep", report_sweep, "sweep_manifest.csv")->required();
    report_cmd->add_option("--records", report_records, "mirror-index records CSV")->required();
    report_cmd->add_option("--eval-records", report_eval_records,
                           "CSV of checkpoint,eval-json-path rows");
    report_cmd->add_option("--out", report_out, "output directory");

    // --- run-all ---
    auto* runall_cmd = app.add_subcommand(
        "run-all", "execute the whole pipeline and write a reproduction bundle");
    CommonOpts runall_common;
    add_common(runall_cmd, runall_common);
    std::optional<long long> runall_count, runall_test_size;
    std::optional<std::size_t> runall_probe_count;
    std::optional<int> runall_epochs;
    std::optional<std::string> runall_out_root, runall_out;
    runall_cmd->add_option("--count", runall_count, "dataset rows to generate");
    runall_cmd->add_option("--test-size", runall_test_size, "balanced test rows");
    runall_cmd->add_option("--probe-count", runall_probe_count, "probe states to sample");
    runall_cmd->add_option("--max-epochs", runall_epochs, "epoch budget override");
    runall_cmd->add_option("--out-root", runall_out_root,
                           "bundle root (overrides FROGTOAD_OUT_ROOT and the config)");
    runall_cmd->add_option("--out", runall_out, "explicit run directory (skips the stamped name)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
        std::cerr << "error: usage: " << e.what() << std::endl;
        return kExitUsage;
    }

    try {
        if (gen_cmd->parsed()) {
            RunConfig cfg = effective(gen_common);
            if (gen_count) cfg.dataset_count = *gen_count;
            if (cfg.dataset_count < 1) throw ConfigError("config: --count must be >= 1");
            const auto data = frogtoad::dataset::generate(cfg.dataset_count, cfg.world,
                                                          cfg.oracle, cfg.seed);
            const fs::path out = gen_out;
            if (out.has_parent_path()) fs::create_directories(out.parent_path());
            frogtoad::dataset::write_csv(out, data);
            const fs::path manifest =
                out.parent_path() / (out.stem().string() + "_manifest.json");
            frogtoad::dataset::write_manifest(manifest, cfg.dataset_count, cfg.world, cfg.oracle,
                                              cfg.seed, data);
            const auto hist = frogtoad::dataset::label_histogram(data);
            std::cout << "wrote " << out.string() << " (" << data.rows.size()
                      << " rows; hop/jump/leap/help " << hist[0] << "/" << hist[1] << "/"
                      << hist[2] << "/" << hist[3] << ") and " << manifest.string() << std::endl;
            return 0;
        }

        if (split_cmd->parsed()) {
            RunConfig cfg = effective(split_common);
            if (split_test_size) cfg.split.test_size = *split_test_size;
            try {
                frogtoad::dataset::check_spec(cfg.split);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(std::string("config: ") + e.what());
            }
            require_exists(split_in, "dataset CSV");
            const auto data = frogtoad::dataset::read_csv(split_in);
            auto [train_split, test_split] =
                frogtoad::dataset::split(data, cfg.split, cfg.seed);
            frogtoad::dataset::write_csv(split_out_train, train_split);
            frogtoad::dataset::write_csv(split_out_test, test_split);
            const auto hist = frogtoad::dataset::label_histogram(test_split);
            std::cout << "wrote " << split_out_train << " (" << train_split.rows.size()
                      << " rows) and " << split_out_test << " (" << test_split.rows.size()
                      << " rows; hop/jump/leap/help " << hist[0] << "/" << hist[1] << "/"
                      << hist[2] << "/" << hist[3] << ")" << std::endl;
            return 0;
        }

        if (train_cmd->parsed()) {
            RunConfig cfg = effective(train_common);
            apply_hp_overrides(cfg.training, train_lr, train_layers, train_neurons, train_batch,
                               train_dropout, train_epochs, train_patience);
            check_hp_or_config_error(cfg.training);
            require_exists(train_train, "training CSV");
            require_exists(train_val, "validation CSV");
            const auto train_set = frogtoad::dataset::read_csv(train_train);
            const auto val_set = frogtoad::dataset::read_csv(train_val);
            const auto result =
                frogtoad::neural::train(train_set, val_set, cfg.training, train_out);
            std::cout << "best epoch " << result.best_epoch << " val_loss "
                      << result.best_val_loss << (result.stopped_early ? " (stopped early)" : "")
                      << "; best checkpoint " << (fs::path(train_out) / result.best_checkpoint).string()
                      << std::endl;
            return 0;
        }

        if (sweep_cmd->parsed()) {
            RunConfig cfg = effective(sweep_common);
            std::vector<frogtoad::neural::Hyperparams> grid =
                cfg.grid.empty()
                    ? frogtoad::neural::default_grid(cfg.seed, cfg.training.max_epochs)
                    : cfg.grid;
            if (sweep_epochs) {
                for (auto& hp : grid) hp.max_epochs = *sweep_epochs;
            }
            for (const auto& hp : grid) check_hp_or_config_error(hp);
            require_exists(sweep_train, "training CSV");
            require_exists(sweep_val, "validation CSV");
            const auto train_set = frogtoad::dataset::read_csv(sweep_train);
            const auto val_set = frogtoad::dataset::read_csv(sweep_val);
            const auto entries =
                frogtoad::neural::sweep(grid, train_set, val_set, sweep_out);
            for (std::size_t i = 0; i < entries.size(); ++i) {
                const auto& e = entries[i];
                std::cout << "cfg" << i << " lr=" << e.hp.learning_rate
                          << " layers=" << e.hp.hidden_layers
                          << " neurons=" << e.hp.neurons_per_layer << ": " << e.status;
                if (e.status == "ok") {
                    std::cout << " best epoch " << e.best_epoch << " val_loss "
                              << e.best_val_loss;
                } else {
                    std::cout << " (" << e.error << ")";
                }
                std::cout << std::endl;
            }
            return 0;
        }

        if (probe_cmd->parsed()) {
            RunConfig cfg = effective(probe_common);
            if (probe_count) cfg.probe_count = *probe_count;
            require_exists(probe_ckpt, "checkpoint file");
            require_exists(probe_test, "test-split CSV");
            const auto ckpt = frogtoad::neural::load_checkpoint(probe_ckpt);
            const auto test_set = frogtoad::dataset::read_csv(probe_test);
            const auto rows = probe_stats(ckpt.net, test_set, cfg.probe_count, cfg.seed);
            frogtoad::probes::write_stats_csv(probe_out, rows);
            std::cout << "wrote " << probe_out << " (" << rows.size()
                      << " neuron/scenario rows from " << cfg.probe_count << " probe states)"
                      << std::endl;
            return 0;
        }

        if (cmni_cmd->parsed()) {
            RunConfig cfg = effective(cmni_common);
            if (cmni_count) cfg.probe_count = *cmni_count;
            require_exists(cmni_ckpt, "checkpoint file");
            const auto ckpt = frogtoad::neural::load_checkpoint(cmni_ckpt);
            std::vector<frogtoad::probes::NeuronScenarioStats> rows;
            if (cmni_stats) {
                require_exists(*cmni_stats, "statistics CSV");
                rows = frogtoad::probes::read_stats_csv(*cmni_stats);
            } else if (cmni_test) {
                require_exists(*cmni_test, "test-split CSV");
                const auto test_set = frogtoad::dataset::read_csv(*cmni_test);
                rows = probe_stats(ckpt.net, test_set, cfg.probe_count, cfg.seed);
            } else {
                std::cerr << "error: usage: cmni needs --test (to probe) or --stats (to reuse)"
                          << std::endl;
                return kExitUsage;
            }
            const auto report = frogtoad::cmni::compute_cmni(frogtoad::cmni::deltas(rows),
                                                             cfg.cmni_thresholds);
            frogtoad::cmni::write_cmni_json(cmni_out_json, report);
            frogtoad::cmni::write_cmni_csv(cmni_out_csv, report);
            if (cmni_append) {
                const std::string id =
                    cmni_record_id ? *cmni_record_id : fs::path(cmni_ckpt).filename().string();
                frogtoad::evalreport::append_cmni_record(
                    *cmni_append, {id, ckpt.epoch, ckpt.val_loss, report.mne, report.cmni});
            }
            std::cout << "cmni " << report.cmni << " (mns_total " << report.mne << " over "
                      << report.n_neurons << " neurons); " << report.candidates.size()
                      << " candidate(s), " << report.differentiators.size()
                      << " differentiator(s); wrote " << cmni_out_json << " and " << cmni_out_csv
                      << std::endl;
            return 0;
        }

        if (circuits_cmd->parsed()) {
            RunConfig cfg = effective(circuits_common);
            require_exists(circuits_ckpt, "checkpoint file");
            require_exists(circuits_cmni, "mirror-index report");
            const auto ckpt = frogtoad::neural::load_checkpoint(circuits_ckpt);
            const auto report = frogtoad::cmni::read_cmni_json(circuits_cmni);
            bool have_layer1 = false;
            for (const auto& id : report.candidates) {
                if (id.layer == 1) have_layer1 = true;
            }
            std::vector<frogtoad::circuits::CircuitGraph> graphs;
            if (have_layer1) {
                graphs = frogtoad::circuits::find_hubs(ckpt.net, report.candidates,
                                                       report.differentiators,
                                                       cfg.circuit_thresholds);
            }
            frogtoad::circuits::export_graphs(graphs, circuits_out);
            std::cout << graphs.size() << " hub(s)";
            for (const auto& g : graphs) std::cout << " " << g.name;
            if (!have_layer1) std::cout << " (no layer-1 candidates to trace)";
            std::cout << "; wrote " << circuits_out << std::endl;
            return 0;
        }

        if (eval_cmd->parsed()) {
            require_exists(eval_ckpt, "checkpoint file");
            require_exists(eval_test, "test-split CSV");
            const auto ckpt = frogtoad::neural::load_checkpoint(eval_ckpt);
            const auto test_set = frogtoad::dataset::read_csv(eval_test);
            const auto result = frogtoad::evalreport::evaluate(ckpt.net, test_set);
            frogtoad::evalreport::write_eval_json(eval_out, result);
            std::cout << frogtoad::evalreport::format_eval(result);
            std::cout << "wrote " << eval_out << std::endl;
            return 0;
        }

        if (report_cmd->parsed()) {
            RunConfig cfg = effective(report_common);
            require_exists(report_sweep, "sweep manifest");
            require_exists(report_records, "mirror-index records CSV");
            const auto entries = frogtoad::neural::read_sweep_manifest(report_sweep);
            const auto cmni_records = frogtoad::evalreport::read_cmni_records(report_records);
            std::vector<frogtoad::evalreport::CheckpointEval> eval_records;
            if (report_eval_records) {
                require_exists(*report_eval_records, "eval records CSV");
                eval_records = frogtoad::evalreport::read_eval_records(*report_eval_records);
            }
            const auto bundle = frogtoad::evalreport::report(entries, cmni_records, eval_records,
                                                             report_out, cfg.report_flags);
            std::cout << bundle.summary;
            std::cout << "wrote " << bundle.table_csv.string() << " and "
                      << bundle.series_csv.string() << std::endl;
            return 0;
        }

        if (runall_cmd->parsed()) {
            RunConfig cfg = effective(runall_common);
            if (runall_count) cfg.dataset_count = *runall_count;
            if (runall_test_size) cfg.split.test_size = *runall_test_size;
            if (runall_probe_count) cfg.probe_count = *runall_probe_count;
            if (runall_epochs) {
                cfg.training.max_epochs = *runall_epochs;
                for (auto& hp : cfg.grid) hp.max_epochs = *runall_epochs;
            }
            if (runall_out_root) {
                cfg.out_root = *runall_out_root;
            } else if (const char* env_root = std::getenv("FROGTOAD_OUT_ROOT")) {
                cfg.out_root = env_root;
            }
            frogtoad::config::check_run_config(cfg);
            const fs::path run_dir =
                runall_out ? fs::path(*runall_out) : frogtoad::pipeline::default_run_dir(cfg);
            const auto summary = frogtoad::pipeline::run_all(cfg, run_dir, &std::cout);
            std::cout << "run " << summary.run_stamp << ": best cfg" << summary.best_config
                      << " val_loss " << summary.best_val_loss << " cmni " << summary.cmni
                      << " accuracy " << summary.accuracy << " hubs " << summary.hub_count
                      << (summary.mirror_positive ? " [mirror-positive]" : "")
                      << (summary.mirror_negative ? " [mirror-negative]" : "") << std::endl;
            return 0;
        }
    } catch (const ConfigError& e) {
        std::string msg = e.what();
        if (msg.rfind("config: ", 0) == 0) msg.erase(0, 8);
        die(kExitConfig, "config", msg);
    } catch (const std::exception& e) {
        die(kExitFailure, "failure", e.what());
    }

    std::cerr << "error: usage: no subcommand given" << std::endl;
    return kExitUsage;
}
