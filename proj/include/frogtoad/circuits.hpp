#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "frogtoad/cmni.hpp"
#include "frogtoad/network.hpp"

namespace frogtoad::circuits {

// One connection between adjacent layers. The z-score is taken against the
// population mean/stddev of the full matrix the weight lives in, so edges are
// comparable within a matrix but not across matrices.
struct WeightEdge {
    int from_layer = 0;
    int from_neuron = 0;
    int to_layer = 0;
    int to_neuron = 0;
    double weight = 0.0;
    double zscore = 0.0;

    bool operator==(const WeightEdge&) const = default;
};

struct Thresholds {
    double mirror_share = 0.8;         // candidate share >= this: mirror-driven
    double differentiator_share = 0.2; // candidate share <= this: differentiator-driven
    double action_gap = 1.0;           // dominant output edge must lead by this many z-units
    double edge_z = 1.0;               // |zscore| filter for edges kept in graphs
};

enum class HubKind { MirrorDriven, DifferentiatorDriven, Mixed };

const char* hub_kind_name(HubKind kind);
HubKind hub_kind_from_name(const std::string& name);

// A hub neuron in layer 2 with its strong incoming/outgoing connections.
struct CircuitGraph {
    std::string name;
    HubKind kind = HubKind::Mixed;
    int hub_layer = 2;
    int hub_neuron = 0;
    double candidate_share = 0.0;           // of positive incoming z-mass
    std::vector<WeightEdge> incoming;       // |z| >= edge_z, sorted by |z| desc
    std::vector<WeightEdge> outgoing;       // same filter/order; empty if none
    std::optional<env::Action> action_target;

    bool operator==(const CircuitGraph&) const = default;
};

// Layer numbering matches the probe convention: 0 input, 1..H hidden, H+1
// output; layers must be adjacent (to_layer == from_layer + 1).
std::vector<WeightEdge> edge_zscores(const neural::Network& net, int from_layer, int to_layer);

// Scans every layer-2 neuron. A qualifying incoming edge has positive weight
// and positive z-score and originates from a layer-1 candidate or
// differentiator; neurons with no qualifying edges are not hubs. The
// candidate share of z-mass classifies the hub, and a dominant output
// projection (z lead >= action_gap) names its action. In single-hidden-layer
// networks layer 2 is the output layer, so a hub's action is its own index.
std::vector<CircuitGraph> find_hubs(const neural::Network& net,
                                    const std::vector<cmni::NeuronId>& candidates,
                                    const std::vector<cmni::NeuronId>& differentiators,
                                    const Thresholds& th = {});

// JSON graph file plus a plain-text adjacency summary next to it
// ("<stem>_summary.txt"); the JSON round-trips through read_graphs.
void export_graphs(const std::vector<CircuitGraph>& graphs, const std::filesystem::path& path);
std::vector<CircuitGraph> read_graphs(const std::filesystem::path& path);

}  // namespace frogtoad::circuits
