#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "frogtoad/circuits.hpp"
#include "frogtoad/cmni.hpp"
#include "frogtoad/dataset.hpp"
#include "frogtoad/env.hpp"
#include "frogtoad/evalreport.hpp"
#include "frogtoad/network.hpp"
#include "frogtoad/oracle.hpp"
#include "frogtoad/probes.hpp"

namespace frogtoad::config {

// Raised for unparsable files, unknown keys, wrong types, and out-of-range
// values. Messages are single-line and name the offending key.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// One source of truth for a full pipeline run. Defaults are the desk-scale
// regime: 500k generated rows, balanced 100k test split, a single 1x15
// training configuration, 10k probe states.
struct RunConfig {
    std::uint64_t seed = 42;
    std::filesystem::path out_root = "runs";

    env::WorldConfig world;        // includes asymmetric start energies 20/6
    oracle::OracleConfig oracle;   // refill ceiling raised to 20 (see ctor)

    std::int64_t dataset_count = 500000;
    dataset::SplitSpec split;

    neural::Hyperparams training;           // single-run configuration
    std::vector<neural::Hyperparams> grid;  // sweep grid; empty = train once

    std::size_t probe_count = probes::kDefaultProbeCount;

    cmni::Thresholds cmni_thresholds;
    circuits::Thresholds circuit_thresholds;
    evalreport::ReportFlags report_flags;

    RunConfig() {
        // At the library default (16) the fly-refill rule depends on energy,
        // which dataset rows cannot see; 20 makes every labeled action
        // recoverable from visible features, which desk-scale training needs.
        oracle.refill_ceiling = 20;
    }
};

// Throws ConfigError naming the first invalid field. Checks every section,
// including cross-section feasibility (dataset count vs. test size).
void check_run_config(const RunConfig& cfg);

// Parses and validates JSON text. `origin` names the source in error
// messages (a path, or "<defaults>"). Unknown keys are errors. Fields not
// present fall back to RunConfig defaults; training seeds not given
// explicitly are derived from the global seed.
RunConfig parse_config(const std::string& text, const std::string& origin);

// Reads, parses, and validates a config file.
RunConfig load_config(const std::filesystem::path& path);

// Fully-validated defaults (equivalent to parse_config("{}")).
RunConfig default_config();

// Writes the complete effective configuration (every field, explicit) so a
// bundle can be reproduced from its manifest alone. Deterministic bytes.
void write_config(const std::filesystem::path& path, const RunConfig& cfg);

}  // namespace frogtoad::config
