#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "frogtoad/network.hpp"

namespace frogtoad::neural {

// File exists and parses, but was written under a different schema revision
// or is not a checkpoint document at all.
struct SchemaMismatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File is unreadable, fails to parse, or has internally inconsistent content.
struct CorruptCheckpointError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr int kCheckpointSchemaVersion = 1;

struct Checkpoint {
    Network net;
    Hyperparams hp;
    int epoch = 1;          // 1-based epoch that produced these weights
    double val_loss = 0.0;  // mean validation loss at that epoch
    std::string run_stamp;  // YYYYMMDD-HHMMSS tag shared by one training run

    bool operator==(const Checkpoint&) const = default;
};

// Deterministic run tag derived from the seed so that repeated runs with the
// same seed produce byte-identical artifacts.
std::string run_stamp_from_seed(std::uint64_t seed);

// checkpoint-<stamp>-actrelu_bs<B>_dr<D>_ep<E>_nl<L>_nn<N>_lr<LR>-epoch<K>-valLoss<V>
std::string checkpoint_filename(const std::string& run_stamp, const Hyperparams& hp,
                                int epoch, double val_loss);

// Lossless round-trip: load(save(c)) == c bit for bit, including weights.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace frogtoad::neural
