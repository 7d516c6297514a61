#include "frogtoad/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>

#include "json.hpp"

#include "frogtoad/checkpoint.hpp"
#include "frogtoad/circuits.hpp"
#include "frogtoad/cmni.hpp"
#include "frogtoad/evalreport.hpp"
#include "frogtoad/probes.hpp"

namespace frogtoad::pipeline {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void log_line(std::ostream* log, const std::string& msg) {
    if (log) *log << msg << std::endl;
}

std::string config_subdir(std::size_t index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "cfg%03zu", index);
    return buf;
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

// Mirror-index report for one loaded checkpoint against a fixed probe set.
cmni::CmniReport score_checkpoint(const neural::Network& net,
                                  const std::vector<probes::ScenarioQuadruple>& quads,
                                  const cmni::Thresholds& th) {
    const probes::ActivationCapture cap = probes::capture(net, quads);
    return cmni::compute_cmni(cmni::deltas(probes::activation_stats(cap)), th);
}

void write_case_summary(const fs::path& path, const cmni::CaseSummary& cs) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    if (cs.candidates.empty()) out << "no mirror candidates\n";
    for (const auto& row : cs.candidates) {
        out << "L" << row.id.layer << "N" << row.id.neuron << " mns " << fixed(row.mns, 5)
            << " baseline " << fixed(row.mean_none, 5) << " both-distress "
            << fixed(row.mean_both, 5);
        if (row.degenerate_baseline) {
            out << " ratio n/a (baseline ~ 0)";
        } else {
            out << " ratio " << fixed(row.ratio, 2);
        }
        out << '\n';
    }
    out << "differentiators:";
    if (cs.differentiators.empty()) out << " none";
    for (const auto& id : cs.differentiators) {
        out << " L" << id.layer << "N" << id.neuron;
    }
    out << '\n';
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

fs::path default_run_dir(const config::RunConfig& cfg) {
    return cfg.out_root / ("run-" + neural::run_stamp_from_seed(cfg.seed));
}

RunSummary run_all(const config::RunConfig& cfg, const fs::path& run_dir, std::ostream* log) {
    config::check_run_config(cfg);
    fs::create_directories(run_dir);

    RunSummary summary;
    summary.run_dir = run_dir;
    summary.run_stamp = neural::run_stamp_from_seed(cfg.seed);

    config::write_config(run_dir / "config.json", cfg);

    log_line(log, "generating " + std::to_string(cfg.dataset_count) + " rows (seed " +
                      std::to_string(cfg.seed) + ")");
    const dataset::Dataset data =
        dataset::generate(cfg.dataset_count, cfg.world, cfg.oracle, cfg.seed);
    dataset::write_manifest(run_dir / "dataset_manifest.json", cfg.dataset_count, cfg.world,
                            cfg.oracle, cfg.seed, data);

    log_line(log, "splitting off balanced test set of " + std::to_string(cfg.split.test_size));
    auto [train_all, test_set] = dataset::split(data, cfg.split, cfg.seed);

    // Validation: unbalanced tail slice of the remaining rows. A balanced
    // validation set would reweight the rare, genuinely-ambiguous classes
    // and push the attainable loss floor far above the training targets.
    if (train_all.rows.size() < 2) {
        throw std::runtime_error("not enough training rows left after the test split");
    }
    const std::size_t val_count = std::max<std::size_t>(1, train_all.rows.size() / 10);
    dataset::Dataset train_set;
    dataset::Dataset val_set;
    train_set.rows.assign(train_all.rows.begin(),
                          train_all.rows.end() - static_cast<std::ptrdiff_t>(val_count));
    val_set.rows.assign(train_all.rows.end() - static_cast<std::ptrdiff_t>(val_count),
                        train_all.rows.end());

    const std::vector<neural::Hyperparams> grid =
        cfg.grid.empty() ? std::vector<neural::Hyperparams>{cfg.training} : cfg.grid;
    log_line(log, "training " + std::to_string(grid.size()) + " configuration(s) on " +
                      std::to_string(train_set.rows.size()) + " rows (val " +
                      std::to_string(val_set.rows.size()) + ")");
    const fs::path sweep_dir = run_dir / "sweep";
    summary.entries = neural::sweep(grid, train_set, val_set, sweep_dir);

    // Best configuration: lowest validation loss among the successful ones.
    std::size_t best_index = summary.entries.size();
    double best_val = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < summary.entries.size(); ++i) {
        if (summary.entries[i].status != "ok") continue;
        if (summary.entries[i].best_val_loss < best_val) {
            best_val = summary.entries[i].best_val_loss;
            best_index = i;
        }
    }
    if (best_index == summary.entries.size()) {
        std::string detail;
        for (const auto& e : summary.entries) {
            if (!detail.empty()) detail += "; ";
            detail += e.error;
        }
        throw std::runtime_error("all training configurations failed: " + detail);
    }
    summary.best_config = best_index;
    summary.best_val_loss = best_val;
    const neural::SweepEntry& best_entry = summary.entries[best_index];

    log_line(log, "best configuration " + config_subdir(best_index) + " (val loss " +
                      fixed(best_val, 4) + "); probing " + std::to_string(cfg.probe_count) +
                      " states");
    const neural::Checkpoint best_ckpt =
        neural::load_checkpoint(sweep_dir / best_entry.best_checkpoint);

    const auto quads = probes::build_scenarios(test_set, cfg.probe_count, cfg.seed);
    const probes::ActivationCapture cap = probes::capture(best_ckpt.net, quads);
    const auto stats_rows = probes::activation_stats(cap);
    probes::write_stats_csv(run_dir / "activation_stats.csv", stats_rows);

    const cmni::CmniReport report =
        cmni::compute_cmni(cmni::deltas(stats_rows), cfg.cmni_thresholds);
    cmni::write_cmni_json(run_dir / "cmni.json", report);
    cmni::write_cmni_csv(run_dir / "cmni.csv", report);
    write_case_summary(run_dir / "cmni_case.txt", cmni::classify_case(report));
    summary.mne = report.mne;
    summary.cmni = report.cmni;

    // Circuit tracing needs layer-1 candidates to start from.
    bool have_layer1_candidates = false;
    for (const auto& id : report.candidates) {
        if (id.layer == 1) have_layer1_candidates = true;
    }
    std::vector<circuits::CircuitGraph> graphs;
    if (have_layer1_candidates) {
        graphs = circuits::find_hubs(best_ckpt.net, report.candidates, report.differentiators,
                                     cfg.circuit_thresholds);
    }
    circuits::export_graphs(graphs, run_dir / "circuit_graphs.json");
    summary.hub_count = graphs.size();
    log_line(log, "mirror index " + fixed(report.cmni, 5) + ", " +
                      std::to_string(graphs.size()) + " hub(s)");

    const evalreport::EvalResult eval = evalreport::evaluate(best_ckpt.net, test_set);
    evalreport::write_eval_json(run_dir / "eval.json", eval);
    {
        std::ofstream txt(run_dir / "eval.txt", std::ios::binary | std::ios::trunc);
        if (!txt) throw std::runtime_error("cannot open eval.txt for writing");
        txt << evalreport::format_eval(eval);
    }
    summary.accuracy = eval.accuracy;

    // Analysis records for the consolidated report: the best checkpoint of
    // every successful configuration, plus the full epoch series of the
    // winning configuration for trend data.
    std::vector<evalreport::CheckpointCmni> cmni_records;
    std::set<std::string> recorded;
    for (std::size_t i = 0; i < summary.entries.size(); ++i) {
        const auto& entry = summary.entries[i];
        if (entry.status != "ok") continue;
        if (i == best_index) continue;  // covered by the epoch series below
        log_line(log, "scoring best checkpoint of " + config_subdir(i));
        const neural::Checkpoint ckpt =
            neural::load_checkpoint(sweep_dir / entry.best_checkpoint);
        const cmni::CmniReport r = score_checkpoint(ckpt.net, quads, cfg.cmni_thresholds);
        cmni_records.push_back({entry.best_checkpoint, ckpt.epoch, ckpt.val_loss, r.mne, r.cmni});
        recorded.insert(entry.best_checkpoint);
    }
    {
        log_line(log, "scoring the epoch series of " + config_subdir(best_index));
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(sweep_dir / config_subdir(best_index))) {
            const std::string name = e.path().filename().string();
            if (name.rfind("checkpoint-", 0) == 0 && name.size() > 5 &&
                name.substr(name.size() - 5) == ".json") {
                files.push_back(e.path());
            }
        }
        std::sort(files.begin(), files.end());
        std::vector<evalreport::CheckpointCmni> series;
        for (const auto& file : files) {
            const neural::Checkpoint ckpt = neural::load_checkpoint(file);
            const cmni::CmniReport r = (file.filename().string() ==
                                        fs::path(best_entry.best_checkpoint).filename().string())
                                           ? report
                                           : score_checkpoint(ckpt.net, quads, cfg.cmni_thresholds);
            series.push_back({config_subdir(best_index) + "/" + file.filename().string(),
                              ckpt.epoch, ckpt.val_loss, r.mne, r.cmni});
        }
        std::sort(series.begin(), series.end(),
                  [](const evalreport::CheckpointCmni& a, const evalreport::CheckpointCmni& b) {
                      return a.epoch < b.epoch;
                  });
        for (auto& rec : series) {
            if (recorded.insert(rec.checkpoint).second) cmni_records.push_back(std::move(rec));
        }
    }
    std::vector<evalreport::CheckpointEval> eval_records(1);
    eval_records[0].checkpoint = best_entry.best_checkpoint;
    eval_records[0].result = eval;

    const evalreport::ReportBundle bundle =
        evalreport::report(summary.entries, cmni_records, eval_records, run_dir, cfg.report_flags);
    {
        std::ofstream txt(run_dir / "report_summary.txt", std::ios::binary | std::ios::trunc);
        if (!txt) throw std::runtime_error("cannot open report_summary.txt for writing");
        txt << bundle.summary;
    }
    for (const auto& row : bundle.rows) {
        if (row.config_index == best_index) {
            summary.mirror_positive = row.mirror_positive;
            summary.mirror_negative = row.mirror_negative;
        }
    }

    const json manifest{
        {"schema_version", 1},
        {"kind", "run_manifest"},
        {"run_stamp", summary.run_stamp},
        {"seed", cfg.seed},
        {"best_config", summary.best_config},
        {"best_val_loss", summary.best_val_loss},
        {"mne", summary.mne},
        {"cmni", summary.cmni},
        {"accuracy", summary.accuracy},
        {"hub_count", summary.hub_count},
        {"mirror_positive", summary.mirror_positive},
        {"mirror_negative", summary.mirror_negative},
        {"artifacts",
         {"config.json", "dataset_manifest.json", "sweep/sweep_manifest.csv",
          "activation_stats.csv", "cmni.json", "cmni.csv", "cmni_case.txt",
          "circuit_graphs.json", "circuit_graphs_summary.txt", "eval.json", "eval.txt",
          "report_table.csv", "report_series.csv", "report_summary.txt"}}};
    {
        std::ofstream out(run_dir / "run_manifest.json", std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open run_manifest.json for writing");
        out << manifest.dump(2) << '\n';
        if (!out) throw std::runtime_error("failed writing run_manifest.json");
    }
    log_line(log, "bundle complete: " + run_dir.string());
    return summary;
}

}  // namespace frogtoad::pipeline
