#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "frogtoad/checkpoint.hpp"
#include "frogtoad/dataset.hpp"
#include "frogtoad/network.hpp"

namespace frogtoad::neural {

struct EpochRecord {
    int epoch = 0;             // 1-based
    double train_loss = 0.0;   // mean over training batches (dropout active)
    double val_loss = 0.0;     // mean over the validation split (no dropout)
    std::string checkpoint;    // file name inside the run directory
    bool best = false;
};

struct TrainResult {
    std::vector<EpochRecord> epochs;
    int best_epoch = 0;
    double best_val_loss = 0.0;
    std::string best_checkpoint;
    bool stopped_early = false;
    std::string run_stamp;
};

// Mean validation loss of a fixed network (inference mode).
double validation_loss(const Network& net, const dataset::Dataset& val);

// Adam mini-batch training. Writes one checkpoint per epoch plus a
// train_manifest.json into out_dir; stops when validation loss has not
// improved for `patience` consecutive epochs. Throws std::runtime_error with
// epoch/batch context if the loss turns non-finite.
TrainResult train(const dataset::Dataset& train_data, const dataset::Dataset& val_data,
                  const Hyperparams& hp, const std::filesystem::path& out_dir);

struct SweepEntry {
    Hyperparams hp;
    std::string status;  // "ok" or "failed"
    int best_epoch = 0;
    double best_val_loss = 0.0;
    std::string best_checkpoint;  // path relative to the sweep directory
    std::string error;            // populated when status == "failed"
};

// Trains every configuration in its own subdirectory; a failing
// configuration is recorded and does not abort the rest. Writes
// sweep_manifest.csv into out_dir.
std::vector<SweepEntry> sweep(const std::vector<Hyperparams>& grid,
                              const dataset::Dataset& train_data,
                              const dataset::Dataset& val_data,
                              const std::filesystem::path& out_dir);

// Parses a sweep_manifest.csv back into entries. The error column is the
// last field and may itself contain commas; everything after the 13th comma
// belongs to it. Validation loss comes back at the manifest's 6-decimal
// precision.
std::vector<SweepEntry> read_sweep_manifest(const std::filesystem::path& path);

// Small stock grid spanning learning rates 4e-6..5e-5 and depths 1..3.
std::vector<Hyperparams> default_grid(std::uint64_t seed, int max_epochs);

}  // namespace frogtoad::neural
