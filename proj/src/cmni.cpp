#include "frogtoad/cmni.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace frogtoad::cmni {

namespace {

using nlohmann::json;

constexpr double kBaselineFloor = 1e-12;

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string id_str(int layer, int neuron) {
    return "L" + std::to_string(layer) + "N" + std::to_string(neuron);
}

}  // namespace

std::vector<NeuronDelta> deltas(const std::vector<probes::NeuronScenarioStats>& stats) {
    if (stats.empty()) throw std::invalid_argument("no activation statistics supplied");

    std::map<std::pair<int, int>, std::array<double, 4>> means;
    std::map<std::pair<int, int>, unsigned> seen;
    for (const auto& row : stats) {
        const auto key = std::make_pair(row.layer, row.neuron);
        const unsigned bit = 1u << static_cast<unsigned>(row.scenario);
        if (seen[key] & bit) {
            throw std::invalid_argument("duplicate scenario '" +
                                        std::string(probes::scenario_name(row.scenario)) +
                                        "' for neuron " + id_str(row.layer, row.neuron));
        }
        seen[key] |= bit;
        means[key][static_cast<std::size_t>(row.scenario)] = row.summary.mean;
    }

    std::vector<NeuronDelta> out;
    for (const auto& [key, mask] : seen) {
        if (mask != 0b1111u) {
            for (probes::Scenario s : probes::kAllScenarios) {
                if (!(mask & (1u << static_cast<unsigned>(s)))) {
                    throw std::invalid_argument("missing scenario '" +
                                                std::string(probes::scenario_name(s)) +
                                                "' for neuron " + id_str(key.first, key.second));
                }
            }
        }
        const auto& m = means[key];
        NeuronDelta d;
        d.layer = key.first;
        d.neuron = key.second;
        d.mean_none = m[static_cast<std::size_t>(probes::Scenario::None)];
        d.mean_both = m[static_cast<std::size_t>(probes::Scenario::BothDistress)];
        d.delta_frog = m[static_cast<std::size_t>(probes::Scenario::FrogDistress)] - d.mean_none;
        d.delta_toad = m[static_cast<std::size_t>(probes::Scenario::ToadDistress)] - d.mean_none;
        d.mns = std::min(d.delta_frog, d.delta_toad);
        out.push_back(d);
    }
    return out;
}

CmniReport compute_cmni(const std::vector<NeuronDelta>& ds, const Thresholds& th) {
    if (ds.empty()) throw std::invalid_argument("no neuron deltas supplied");

    std::set<NeuronId> ids;
    CmniReport report;
    report.deltas = ds;
    std::sort(report.deltas.begin(), report.deltas.end(),
              [](const NeuronDelta& a, const NeuronDelta& b) {
                  return std::make_pair(a.layer, a.neuron) < std::make_pair(b.layer, b.neuron);
              });
    for (const auto& d : report.deltas) {
        if (d.mns != std::min(d.delta_frog, d.delta_toad)) {
            throw std::invalid_argument("inconsistent mirror score for neuron " +
                                        id_str(d.layer, d.neuron));
        }
        if (!ids.insert(NeuronId{d.layer, d.neuron}).second) {
            throw std::invalid_argument("duplicate delta entry for neuron " +
                                        id_str(d.layer, d.neuron));
        }
        report.mne += d.mns;
        if (d.mns > th.candidate_mns) {
            report.candidates.push_back(NeuronId{d.layer, d.neuron});
        }
        if (std::max(d.delta_frog, d.delta_toad) > th.differentiator_max_delta &&
            std::min(d.delta_frog, d.delta_toad) < th.differentiator_min_delta) {
            report.differentiators.push_back(NeuronId{d.layer, d.neuron});
        }
    }
    report.n_neurons = static_cast<int>(report.deltas.size());
    report.cmni = report.mne / static_cast<double>(report.n_neurons);
    return report;
}

CaseSummary classify_case(const CmniReport& report) {
    CaseSummary summary;
    summary.differentiators = report.differentiators;

    const std::set<NeuronId> candidate_set(report.candidates.begin(), report.candidates.end());
    for (const auto& d : report.deltas) {
        if (!candidate_set.count(NeuronId{d.layer, d.neuron})) continue;
        AmplificationRow row;
        row.id = NeuronId{d.layer, d.neuron};
        row.mean_none = d.mean_none;
        row.mean_both = d.mean_both;
        row.mns = d.mns;
        if (std::abs(d.mean_none) < kBaselineFloor) {
            row.degenerate_baseline = true;
        } else {
            row.ratio = d.mean_both / d.mean_none;
        }
        summary.candidates.push_back(row);
    }
    std::sort(summary.candidates.begin(), summary.candidates.end(),
              [](const AmplificationRow& a, const AmplificationRow& b) {
                  if (a.mns != b.mns) return a.mns > b.mns;
                  return a.id < b.id;
              });
    return summary;
}

void write_cmni_csv(const std::filesystem::path& path, const CmniReport& report) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    const std::set<NeuronId> cand(report.candidates.begin(), report.candidates.end());
    const std::set<NeuronId> diff(report.differentiators.begin(), report.differentiators.end());
    out << "layer,neuron,mean_none,mean_both,delta_frog,delta_toad,mns,candidate,"
           "differentiator\n";
    for (const auto& d : report.deltas) {
        const NeuronId id{d.layer, d.neuron};
        out << d.layer << ',' << d.neuron << ',' << format_real(d.mean_none) << ','
            << format_real(d.mean_both) << ',' << format_real(d.delta_frog) << ','
            << format_real(d.delta_toad) << ',' << format_real(d.mns) << ','
            << (cand.count(id) ? 1 : 0) << ',' << (diff.count(id) ? 1 : 0) << '\n';
    }
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

void write_cmni_json(const std::filesystem::path& path, const CmniReport& report) {
    json doc{{"schema_version", 1},
             {"kind", "cmni_report"},
             {"mne", report.mne},
             {"n_neurons", report.n_neurons},
             {"cmni", report.cmni},
             {"deltas", json::array()},
             {"candidates", json::array()},
             {"differentiators", json::array()}};
    for (const auto& d : report.deltas) {
        doc["deltas"].push_back(json{{"layer", d.layer},
                                     {"neuron", d.neuron},
                                     {"mean_none", d.mean_none},
                                     {"mean_both", d.mean_both},
                                     {"delta_frog", d.delta_frog},
                                     {"delta_toad", d.delta_toad},
                                     {"mns", d.mns}});
    }
    for (const auto& id : report.candidates) {
        doc["candidates"].push_back(json{{"layer", id.layer}, {"neuron", id.neuron}});
    }
    for (const auto& id : report.differentiators) {
        doc["differentiators"].push_back(json{{"layer", id.layer}, {"neuron", id.neuron}});
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << doc.dump(2) << '\n';
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

CmniReport read_cmni_json(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw std::runtime_error(path.string() + ": not valid JSON: " + e.what());
    }
    try {
        if (doc.at("kind").get<std::string>() != "cmni_report" ||
            doc.at("schema_version").get<int>() != 1) {
            throw std::runtime_error(path.string() + ": not a cmni_report document");
        }
        CmniReport report;
        report.mne = doc.at("mne").get<double>();
        report.n_neurons = doc.at("n_neurons").get<int>();
        report.cmni = doc.at("cmni").get<double>();
        for (const auto& j : doc.at("deltas")) {
            NeuronDelta d;
            d.layer = j.at("layer").get<int>();
            d.neuron = j.at("neuron").get<int>();
            d.mean_none = j.at("mean_none").get<double>();
            d.mean_both = j.at("mean_both").get<double>();
            d.delta_frog = j.at("delta_frog").get<double>();
            d.delta_toad = j.at("delta_toad").get<double>();
            d.mns = j.at("mns").get<double>();
            report.deltas.push_back(d);
        }
        for (const auto& j : doc.at("candidates")) {
            report.candidates.push_back(NeuronId{j.at("layer").get<int>(), j.at("neuron").get<int>()});
        }
        for (const auto& j : doc.at("differentiators")) {
            report.differentiators.push_back(
                NeuronId{j.at("layer").get<int>(), j.at("neuron").get<int>()});
        }
        return report;
    } catch (const json::exception& e) {
        throw std::runtime_error(path.string() + ": malformed cmni report: " + e.what());
    }
}

}  // namespace frogtoad::cmni
