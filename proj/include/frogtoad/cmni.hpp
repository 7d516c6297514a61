#pragma once

#include <filesystem>
#include <vector>

#include "frogtoad/probes.hpp"

namespace frogtoad::cmni {

struct NeuronId {
    int layer = 0;
    int neuron = 0;

    auto operator<=>(const NeuronId&) const = default;
};

// Scenario-mean activation shifts for one neuron. The mirror score (MNS) is
// the smaller of the two single-distress shifts, so a neuron scores high only
// when it responds to *both* self- and other-distress; it is deliberately not
// clamped at zero.
struct NeuronDelta {
    int layer = 0;
    int neuron = 0;
    double mean_none = 0.0;   // μ(0,0), kept for amplification analysis
    double mean_both = 0.0;   // μ(1,1)
    double delta_frog = 0.0;  // μ(1,0) − μ(0,0)
    double delta_toad = 0.0;  // μ(0,1) − μ(0,0)
    double mns = 0.0;         // min(delta_frog, delta_toad)

    bool operator==(const NeuronDelta&) const = default;
};

// Classification cutoffs. Chosen so that, on the reference case-study means,
// the known mirror neurons (layer-1 neurons 3, 7, 12, 13) land in the
// candidate set and the known single-scenario responders (9, 11) land in the
// differentiator set.
struct Thresholds {
    double candidate_mns = 0.01;            // candidate: mns > this
    double differentiator_max_delta = 0.02; // differentiator: max(Δ) > this...
    double differentiator_min_delta = 0.005;  // ...and min(Δ) < this
};

struct CmniReport {
    std::vector<NeuronDelta> deltas;  // one per hidden/output neuron
    double mne = 0.0;                 // Σ mns
    int n_neurons = 0;                // hidden + output neuron count
    double cmni = 0.0;                // mne / n_neurons
    std::vector<NeuronId> candidates;
    std::vector<NeuronId> differentiators;

    bool operator==(const CmniReport&) const = default;
};

// Collapses per-scenario moment rows into per-neuron deltas. Requires all
// four scenarios exactly once per neuron.
std::vector<NeuronDelta> deltas(const std::vector<probes::NeuronScenarioStats>& stats);

// Aggregates deltas into the checkpoint-level index and classifies neurons.
// Every (layer, neuron) pair must appear exactly once.
CmniReport compute_cmni(const std::vector<NeuronDelta>& ds, const Thresholds& th = {});

// Dual-distress amplification for one candidate neuron: μ(1,1) relative to
// the no-distress baseline. Baselines too close to zero are flagged instead
// of divided.
struct AmplificationRow {
    NeuronId id;
    double mean_none = 0.0;
    double mean_both = 0.0;
    double mns = 0.0;
    bool degenerate_baseline = false;
    double ratio = 0.0;  // mean_both / mean_none, valid when not degenerate

    bool operator==(const AmplificationRow&) const = default;
};

struct CaseSummary {
    std::vector<AmplificationRow> candidates;  // ranked by mns, descending
    std::vector<NeuronId> differentiators;
};

CaseSummary classify_case(const CmniReport& report);

// Per-neuron table (CSV) and full report (JSON); the JSON round-trips.
void write_cmni_csv(const std::filesystem::path& path, const CmniReport& report);
void write_cmni_json(const std::filesystem::path& path, const CmniReport& report);
CmniReport read_cmni_json(const std::filesystem::path& path);

}  // namespace frogtoad::cmni
