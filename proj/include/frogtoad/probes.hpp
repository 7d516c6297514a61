#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "frogtoad/dataset.hpp"
#include "frogtoad/env.hpp"
#include "frogtoad/network.hpp"
#include "frogtoad/stats.hpp"

namespace frogtoad::probes {

// The four distress scenarios: which agents are shown with the distress code.
enum class Scenario : int {
    None = 0,          // (0,0) original state
    FrogDistress = 1,  // (1,0)
    ToadDistress = 2,  // (0,1)
    BothDistress = 3,  // (1,1)
};

inline constexpr std::array<Scenario, 4> kAllScenarios{
    Scenario::None, Scenario::FrogDistress, Scenario::ToadDistress, Scenario::BothDistress};

const char* scenario_name(Scenario s);            // "none" | "frog" | "toad" | "both"
Scenario scenario_from_name(const std::string& name);

inline constexpr std::size_t kDefaultProbeCount = 10000;

// One base state plus its four matched rewrites. Matching the quadruple on a
// single base state means any activation difference between variants is
// attributable to the distress codes alone.
struct ScenarioQuadruple {
    env::StateVector base{};
    std::array<env::StateVector, 4> variants{};  // indexed by Scenario

    bool operator==(const ScenarioQuadruple&) const = default;
};

// Samples k distinct eligible rows (both agents present, neither distressed)
// from the test split and builds their quadruples. Stats cells stay zeroed;
// only player-layer cells are rewritten to the distress code.
std::vector<ScenarioQuadruple> build_scenarios(const dataset::Dataset& test_set, std::size_t k,
                                               std::uint64_t seed);

// Per-scenario activation matrices for one network, inference mode.
// Layers are numbered 1..H for the hidden layers and H+1 for the output
// layer (softmax activations).
struct ActivationCapture {
    std::size_t samples = 0;
    std::vector<int> layer_sizes;  // index 0 -> layer 1, back() -> output layer
    // activations[scenario][layer_index] is row-major samples x layer_sizes[i]
    std::array<std::vector<std::vector<double>>, 4> activations;
};

ActivationCapture capture(const neural::Network& net,
                          const std::vector<ScenarioQuadruple>& quads);

struct NeuronScenarioStats {
    int layer = 0;   // 1-based; output layer == hidden count + 1
    int neuron = 0;  // 0-based within the layer
    Scenario scenario = Scenario::None;
    stats::MomentSummary summary;

    bool operator==(const NeuronScenarioStats&) const = default;
};

// Moment summaries for every (layer, neuron, scenario) column, ordered by
// layer, then neuron, then scenario.
std::vector<NeuronScenarioStats> activation_stats(const ActivationCapture& cap);

// CSV round trip for stats rows; degenerate columns are flagged rather than
// written as NaN.
void write_stats_csv(const std::filesystem::path& path,
                     const std::vector<NeuronScenarioStats>& rows);
std::vector<NeuronScenarioStats> read_stats_csv(const std::filesystem::path& path);

}  // namespace frogtoad::probes
