#include "frogtoad/probes.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "frogtoad/rng.hpp"

namespace frogtoad::probes {

namespace {

constexpr std::uint64_t kStreamSample = 0x9B0E;

env::StateVector to_state(const std::array<std::uint8_t, env::kStateDim>& features) {
    env::StateVector sv{};
    for (int i = 0; i < env::kStateDim; ++i) {
        sv[static_cast<std::size_t>(i)] = features[static_cast<std::size_t>(i)];
    }
    return sv;
}

// Eligible: exactly two agents recoverable from the player layer and neither
// carries the distress code.
bool eligible_base(const env::StateVector& sv, env::AgentCells& cells) {
    try {
        cells = env::resolve_agent_cells(sv);
    } catch (const std::invalid_argument&) {
        return false;
    }
    return sv[static_cast<std::size_t>(env::kPlayerBase + cells.frog_cell)] != env::kCodeDistress &&
           sv[static_cast<std::size_t>(env::kPlayerBase + cells.toad_cell)] != env::kCodeDistress;
}

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_real(const std::string& field, const std::filesystem::path& path, std::size_t line) {
    double v = 0.0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
        throw std::runtime_error(path.string() + ":" + std::to_string(line) +
                                 ": malformed number '" + field + "'");
    }
    return v;
}

long long parse_int(const std::string& field, const std::filesystem::path& path,
                    std::size_t line) {
    long long v = 0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
        throw std::runtime_error(path.string() + ":" + std::to_string(line) +
                                 ": malformed integer '" + field + "'");
    }
    return v;
}

}  // namespace

const char* scenario_name(Scenario s) {
    switch (s) {
        case Scenario::None: return "none";
        case Scenario::FrogDistress: return "frog";
        case Scenario::ToadDistress: return "toad";
        case Scenario::BothDistress: return "both";
    }
    throw std::invalid_argument("unknown scenario value");
}

Scenario scenario_from_name(const std::string& name) {
    for (Scenario s : kAllScenarios) {
        if (name == scenario_name(s)) return s;
    }
    throw std::invalid_argument("unknown scenario name '" + name + "'");
}

std::vector<ScenarioQuadruple> build_scenarios(const dataset::Dataset& test_set, std::size_t k,
                                               std::uint64_t seed) {
    if (k == 0) throw std::invalid_argument("probe count k must be >= 1");

    std::vector<std::size_t> eligible;
    std::vector<env::AgentCells> cells_of;
    for (std::size_t i = 0; i < test_set.rows.size(); ++i) {
        const env::StateVector sv = to_state(test_set.rows[i].features);
        env::AgentCells cells{};
        if (eligible_base(sv, cells)) {
            eligible.push_back(i);
            cells_of.push_back(cells);
        }
    }
    if (eligible.size() < k) {
        throw std::invalid_argument("probe sampling needs " + std::to_string(k) +
                                    " eligible states (both agents present, neither "
                                    "distressed), test split has " +
                                    std::to_string(eligible.size()));
    }

    SplitMix64 rng(mix_seed(seed, kStreamSample));
    std::vector<std::size_t> pick(eligible.size());
    for (std::size_t i = 0; i < pick.size(); ++i) pick[i] = i;
    std::vector<ScenarioQuadruple> quads;
    quads.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.next_below(pick.size() - i));
        std::swap(pick[i], pick[j]);
        const std::size_t row = eligible[pick[i]];
        const env::AgentCells cells = cells_of[pick[i]];

        ScenarioQuadruple q;
        q.base = to_state(test_set.rows[row].features);
        q.variants[static_cast<std::size_t>(Scenario::None)] = q.base;

        env::StateVector frog = q.base;
        frog[static_cast<std::size_t>(env::kPlayerBase + cells.frog_cell)] = env::kCodeDistress;
        q.variants[static_cast<std::size_t>(Scenario::FrogDistress)] = frog;

        env::StateVector toad = q.base;
        toad[static_cast<std::size_t>(env::kPlayerBase + cells.toad_cell)] = env::kCodeDistress;
        q.variants[static_cast<std::size_t>(Scenario::ToadDistress)] = toad;

        env::StateVector both = frog;
        both[static_cast<std::size_t>(env::kPlayerBase + cells.toad_cell)] = env::kCodeDistress;
        q.variants[static_cast<std::size_t>(Scenario::BothDistress)] = both;

        quads.push_back(std::move(q));
    }
    return quads;
}

ActivationCapture capture(const neural::Network& net,
                          const std::vector<ScenarioQuadruple>& quads) {
    neural::check_network(net);
    if (quads.empty()) throw std::invalid_argument("capture needs at least one quadruple");

    ActivationCapture cap;
    cap.samples = quads.size();
    for (std::size_t l = 1; l < net.layer_dims.size(); ++l) {
        cap.layer_sizes.push_back(net.layer_dims[l]);
    }
    for (auto& per_layer : cap.activations) {
        per_layer.resize(cap.layer_sizes.size());
        for (std::size_t l = 0; l < cap.layer_sizes.size(); ++l) {
            per_layer[l].assign(cap.samples * static_cast<std::size_t>(cap.layer_sizes[l]), 0.0);
        }
    }

    std::vector<double> input(static_cast<std::size_t>(neural::kInputDim));
    for (std::size_t q = 0; q < quads.size(); ++q) {
        for (Scenario s : kAllScenarios) {
            const env::StateVector& sv = quads[q].variants[static_cast<std::size_t>(s)];
            for (int i = 0; i < env::kStateDim; ++i) {
                input[static_cast<std::size_t>(i)] = sv[static_cast<std::size_t>(i)];
            }
            const neural::ForwardResult fr = neural::forward(net, input);
            auto& per_layer = cap.activations[static_cast<std::size_t>(s)];
            for (std::size_t l = 0; l < fr.hidden.size(); ++l) {
                const std::size_t width = static_cast<std::size_t>(cap.layer_sizes[l]);
                std::copy(fr.hidden[l].begin(), fr.hidden[l].end(),
                          per_layer[l].begin() + q * width);
            }
            const std::size_t out_layer = cap.layer_sizes.size() - 1;
            std::copy(fr.probs.begin(), fr.probs.end(),
                      per_layer[out_layer].begin() + q * static_cast<std::size_t>(neural::kOutputDim));
        }
    }
    return cap;
}

std::vector<NeuronScenarioStats> activation_stats(const ActivationCapture& cap) {
    if (cap.layer_sizes.empty() || cap.samples == 0) {
        throw std::invalid_argument("activation capture is empty");
    }
    if (cap.samples < 2) {
        throw std::invalid_argument("moment statistics need at least 2 samples, have " +
                                    std::to_string(cap.samples));
    }
    for (Scenario s : kAllScenarios) {
        const auto& per_layer = cap.activations[static_cast<std::size_t>(s)];
        if (per_layer.size() != cap.layer_sizes.size()) {
            throw std::invalid_argument("capture matrices missing for scenario " +
                                        std::string(scenario_name(s)));
        }
        for (std::size_t l = 0; l < per_layer.size(); ++l) {
            if (per_layer[l].size() != cap.samples * static_cast<std::size_t>(cap.layer_sizes[l])) {
                throw std::invalid_argument("capture matrix shape mismatch at layer " +
                                            std::to_string(l + 1));
            }
        }
    }

    std::vector<NeuronScenarioStats> rows;
    for (std::size_t l = 0; l < cap.layer_sizes.size(); ++l) {
        const std::size_t width = static_cast<std::size_t>(cap.layer_sizes[l]);
        for (std::size_t n = 0; n < width; ++n) {
            for (Scenario s : kAllScenarios) {
                const auto& matrix = cap.activations[static_cast<std::size_t>(s)][l];
                stats::RunningMoments acc;
                for (std::size_t r = 0; r < cap.samples; ++r) {
                    acc.add(matrix[r * width + n]);
                }
                NeuronScenarioStats row;
                row.layer = static_cast<int>(l) + 1;
                row.neuron = static_cast<int>(n);
                row.scenario = s;
                row.summary = acc.summary();
                rows.push_back(row);
            }
        }
    }
    return rows;
}

void write_stats_csv(const std::filesystem::path& path,
                     const std::vector<NeuronScenarioStats>& rows) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << "layer,neuron,scenario,count,mean,variance,skewness,excess_kurtosis,degenerate\n";
    for (const auto& row : rows) {
        out << row.layer << ',' << row.neuron << ',' << scenario_name(row.scenario) << ','
            << row.summary.count << ',' << format_real(row.summary.mean) << ','
            << format_real(row.summary.variance) << ',';
        if (row.summary.degenerate) {
            out << ",,1\n";
        } else {
            out << format_real(row.summary.skewness) << ','
                << format_real(row.summary.excess_kurtosis) << ",0\n";
        }
    }
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::vector<NeuronScenarioStats> read_stats_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": empty file");
    ++line_no;
    if (line != "layer,neuron,scenario,count,mean,variance,skewness,excess_kurtosis,degenerate") {
        throw std::runtime_error(path.string() + ":1: unexpected header '" + line + "'");
    }

    std::vector<NeuronScenarioStats> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (!line.empty() && line.back() == ',') fields.push_back("");
        if (fields.size() != 9) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": expected 9 fields, found " +
                                     std::to_string(fields.size()));
        }
        NeuronScenarioStats row;
        row.layer = static_cast<int>(parse_int(fields[0], path, line_no));
        row.neuron = static_cast<int>(parse_int(fields[1], path, line_no));
        row.scenario = scenario_from_name(fields[2]);
        row.summary.count = parse_int(fields[3], path, line_no);
        row.summary.mean = parse_real(fields[4], path, line_no);
        row.summary.variance = parse_real(fields[5], path, line_no);
        row.summary.degenerate = fields[8] == "1";
        if (!row.summary.degenerate) {
            row.summary.skewness = parse_real(fields[6], path, line_no);
            row.summary.excess_kurtosis = parse_real(fields[7], path, line_no);
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace frogtoad::probes
