#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "frogtoad/env.hpp"
#include "frogtoad/oracle.hpp"

namespace frogtoad::dataset {

// One training example: zero-statistics encoding plus the oracle's action.
struct LabeledRow {
    std::array<std::uint8_t, env::kStateDim> features{};
    std::uint8_t label = 0;  // env::Action value 0..3

    bool operator==(const LabeledRow&) const = default;
};

struct Dataset {
    std::vector<LabeledRow> rows;

    bool operator==(const Dataset&) const = default;
};

// Test-set size and per-action composition.
struct SplitSpec {
    std::int64_t test_size = 100000;
    // Indexed by env::Action value: Hop, Jump, Leap, Help.
    std::array<double, 4> proportions{0.40, 0.40, 0.10, 0.10};

    bool operator==(const SplitSpec&) const = default;
};

inline constexpr int kEpisodeHorizon = 256;  // steps before a fresh world
inline constexpr int kGenShards = 8;  // fixed logical shard count; the merge
                                      // order is by shard, so a parallel
                                      // implementation yields the same bytes

// Rolls out uniformly-random legal actions for both agents (alternating
// turns) on fresh seeded worlds, records every pre-action state from Frog's
// perspective, labels it, and keeps the first `count` distinct feature
// vectors. Duplicate features are dropped (first occurrence wins). Throws
// std::runtime_error if the step budget runs out before `count` distinct
// rows exist.
Dataset generate(std::int64_t count, const env::WorldConfig& world_config,
                 const oracle::OracleConfig& oracle_config, std::uint64_t seed);

// Throws std::invalid_argument unless proportions are non-negative, sum to 1
// within 1e-9, and test_size >= 1.
void check_spec(const SplitSpec& spec);

// Per-action test-set counts: fractional parts round down and the remainder
// goes to Hop, so the counts always sum to exactly test_size.
std::array<std::int64_t, 4> test_counts(const SplitSpec& spec);

// Draws a seeded random test subset with exactly the per-action counts from
// `spec`; the train set is everything else. Both preserve dataset order.
// Throws std::runtime_error naming each action whose rows fall short.
std::pair<Dataset, Dataset> split(const Dataset& data, const SplitSpec& spec,
                                  std::uint64_t seed);

std::array<std::int64_t, 4> label_histogram(const Dataset& data);

// --- Persistence (header-bearing CSV: f0..f99,label) ---

void write_csv(const std::filesystem::path& path, const Dataset& data);
Dataset read_csv(const std::filesystem::path& path);

// JSON manifest recording seed, configs, and the label histogram.
void write_manifest(const std::filesystem::path& path, std::int64_t count,
                    const env::WorldConfig& world_config,
                    const oracle::OracleConfig& oracle_config,
                    std::uint64_t seed, const Dataset& data);

}  // namespace frogtoad::dataset
