#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "frogtoad/config.hpp"
#include "frogtoad/training.hpp"

namespace frogtoad::pipeline {

// Headline results of a full pipeline run plus where the bundle lives.
struct RunSummary {
    std::filesystem::path run_dir;
    std::string run_stamp;
    std::size_t best_config = 0;     // index into the sweep entries
    double best_val_loss = 0.0;
    double mne = 0.0;
    double cmni = 0.0;
    double accuracy = 0.0;
    std::size_t hub_count = 0;
    bool mirror_positive = false;
    bool mirror_negative = false;
    std::vector<neural::SweepEntry> entries;
};

// The run directory the CLI uses by default: <out_root>/run-<stamp>, where
// the stamp is derived from the seed so reruns are byte-identical.
std::filesystem::path default_run_dir(const config::RunConfig& cfg);

// Executes the whole pipeline into run_dir: generate, split, train (the
// grid, or the single training configuration), probe the best checkpoint,
// score the mirror index, extract circuits, evaluate, and report. Writes a
// self-contained bundle (config echo, dataset manifest, checkpoints,
// activation stats CSV, mirror-index report, circuit graphs, evaluation,
// report tables, run manifest). All artifacts are deterministic functions of
// the config, so an identical config yields identical bytes.
//
// `log`, when non-null, receives one progress line per stage.
// Throws on the first unrecoverable error; partially-written bundles are
// left in place for inspection.
RunSummary run_all(const config::RunConfig& cfg, const std::filesystem::path& run_dir,
                   std::ostream* log = nullptr);

}  // namespace frogtoad::pipeline
