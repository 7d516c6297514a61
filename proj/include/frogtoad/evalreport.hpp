#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "frogtoad/dataset.hpp"
#include "frogtoad/network.hpp"
#include "frogtoad/training.hpp"

namespace frogtoad::evalreport {

struct EvalResult {
    long long total = 0;
    double accuracy = 0.0;
    // confusion[predicted][actual], mirroring the reporting convention used
    // throughout: rows are predictions, columns are true labels.
    std::array<std::array<long long, 4>, 4> confusion{};
    std::array<double, 4> precision{};  // 0 when the class was never predicted
    std::array<double, 4> recall{};     // 0 when the class never occurs

    bool operator==(const EvalResult&) const = default;
};

// Argmax evaluation in inference mode; probability ties break toward the
// lowest action index.
EvalResult evaluate(const neural::Network& net, const dataset::Dataset& test_set);

void write_eval_json(const std::filesystem::path& path, const EvalResult& result);
EvalResult read_eval_json(const std::filesystem::path& path);

// Plain-text rendering (accuracy, confusion table, per-class metrics).
std::string format_eval(const EvalResult& result);

// --- Consolidated experiment report ---

struct ReportFlags {
    double mirror_positive_val_loss = 0.06;  // val_loss below this and...
    double mirror_positive_cmni = 0.005;     // ...cmni above this: mirror-positive
    double mirror_negative_cmni = 0.0005;    // cmni below this: mirror-negative
};

// Per-checkpoint analysis inputs, keyed by checkpoint id (the path recorded
// in the sweep manifest, e.g. "cfg000/checkpoint-...").
struct CheckpointCmni {
    std::string checkpoint;
    int epoch = 0;
    double val_loss = 0.0;
    double mne = 0.0;
    double cmni = 0.0;
};

struct CheckpointEval {
    std::string checkpoint;
    EvalResult result;
};

struct ReportRow {
    std::size_t config_index = 0;
    neural::Hyperparams hp;
    std::string checkpoint;
    int best_epoch = 0;
    double val_loss = 0.0;
    double mne = 0.0;
    double cmni = 0.0;
    std::optional<double> accuracy;
    bool mirror_positive = false;
    bool mirror_negative = false;
};

struct ReportBundle {
    std::vector<ReportRow> rows;
    std::filesystem::path table_csv;   // one row per successful configuration
    std::filesystem::path series_csv;  // per-epoch (val_loss, cmni) trend data
    std::string summary;               // human-readable digest
};

// CSV persistence for mirror-index records
// (checkpoint,epoch,val_loss,mns_total,cmni). append_cmni_record creates the
// file with a header first when it does not exist yet, so analysis runs can
// accumulate records one checkpoint at a time.
void write_cmni_records(const std::filesystem::path& path,
                        const std::vector<CheckpointCmni>& records);
std::vector<CheckpointCmni> read_cmni_records(const std::filesystem::path& path);
void append_cmni_record(const std::filesystem::path& path, const CheckpointCmni& record);

// Evaluation-record index: CSV rows of "checkpoint,path" where path names an
// eval JSON file. Relative paths resolve against the CSV's directory.
std::vector<CheckpointEval> read_eval_records(const std::filesystem::path& path);

// Joins the sweep manifest with per-checkpoint mirror-index and evaluation
// records. Every successful configuration needs a cmni record for its best
// checkpoint; records referencing unknown configurations are an error.
ReportBundle report(const std::vector<neural::SweepEntry>& sweep_entries,
                    const std::vector<CheckpointCmni>& cmni_records,
                    const std::vector<CheckpointEval>& eval_records,
                    const std::filesystem::path& out_dir, const ReportFlags& flags = {});

}  // namespace frogtoad::evalreport
