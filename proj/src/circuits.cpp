#include "frogtoad/circuits.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace frogtoad::circuits {

namespace {

using nlohmann::json;

std::string format_g(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

void sort_by_strength(std::vector<WeightEdge>& edges) {
    std::stable_sort(edges.begin(), edges.end(), [](const WeightEdge& a, const WeightEdge& b) {
        return std::abs(a.zscore) > std::abs(b.zscore);
    });
}

json edge_to_json(const WeightEdge& e) {
    return json{{"from_layer", e.from_layer}, {"from_neuron", e.from_neuron},
                {"to_layer", e.to_layer},     {"to_neuron", e.to_neuron},
                {"weight", e.weight},         {"zscore", e.zscore}};
}

WeightEdge edge_from_json(const json& j) {
    WeightEdge e;
    e.from_layer = j.at("from_layer").get<int>();
    e.from_neuron = j.at("from_neuron").get<int>();
    e.to_layer = j.at("to_layer").get<int>();
    e.to_neuron = j.at("to_neuron").get<int>();
    e.weight = j.at("weight").get<double>();
    e.zscore = j.at("zscore").get<double>();
    return e;
}

}  // namespace

const char* hub_kind_name(HubKind kind) {
    switch (kind) {
        case HubKind::MirrorDriven: return "mirror-driven";
        case HubKind::DifferentiatorDriven: return "differentiator-driven";
        case HubKind::Mixed: return "mixed";
    }
    throw std::invalid_argument("unknown hub kind");
}

HubKind hub_kind_from_name(const std::string& name) {
    for (HubKind k : {HubKind::MirrorDriven, HubKind::DifferentiatorDriven, HubKind::Mixed}) {
        if (name == hub_kind_name(k)) return k;
    }
    throw std::invalid_argument("unknown hub kind '" + name + "'");
}

std::vector<WeightEdge> edge_zscores(const neural::Network& net, int from_layer, int to_layer) {
    neural::check_network(net);
    const int layers = net.layer_count();
    if (from_layer < 0 || from_layer >= layers) {
        throw std::invalid_argument("from_layer " + std::to_string(from_layer) +
                                    " out of range (network has layers 0.." +
                                    std::to_string(layers) + ")");
    }
    if (to_layer != from_layer + 1) {
        throw std::invalid_argument("layers " + std::to_string(from_layer) + " and " +
                                    std::to_string(to_layer) +
                                    " are not adjacent; z-scores are per adjacent-layer matrix");
    }

    const auto& w = net.weights[static_cast<std::size_t>(from_layer)];
    const int in_dim = net.layer_dims[static_cast<std::size_t>(from_layer)];
    const int out_dim = net.layer_dims[static_cast<std::size_t>(from_layer) + 1];
    const double n = static_cast<double>(w.size());

    double sum = 0.0;
    for (double v : w) sum += v;
    const double mean = sum / n;
    double sq = 0.0;
    for (double v : w) sq += (v - mean) * (v - mean);
    const double sigma = std::sqrt(sq / n);
    if (!(sigma > 0.0)) {
        throw std::invalid_argument("weight matrix " + std::to_string(from_layer) + "->" +
                                    std::to_string(to_layer) +
                                    " has zero spread; z-scores undefined");
    }

    std::vector<WeightEdge> edges;
    edges.reserve(w.size());
    for (int o = 0; o < out_dim; ++o) {
        for (int i = 0; i < in_dim; ++i) {
            WeightEdge e;
            e.from_layer = from_layer;
            e.from_neuron = i;
            e.to_layer = to_layer;
            e.to_neuron = o;
            e.weight = w[static_cast<std::size_t>(o) * static_cast<std::size_t>(in_dim) +
                         static_cast<std::size_t>(i)];
            e.zscore = (e.weight - mean) / sigma;
            edges.push_back(e);
        }
    }
    return edges;
}

std::vector<CircuitGraph> find_hubs(const neural::Network& net,
                                    const std::vector<cmni::NeuronId>& candidates,
                                    const std::vector<cmni::NeuronId>& differentiators,
                                    const Thresholds& th) {
    neural::check_network(net);
    if (candidates.empty()) {
        throw std::invalid_argument("hub search needs a non-empty mirror-candidate set");
    }
    if (!(th.mirror_share > 0.0) || !(th.differentiator_share >= 0.0) ||
        !(th.action_gap > 0.0) || !(th.edge_z >= 0.0) ||
        th.differentiator_share >= th.mirror_share) {
        throw std::invalid_argument("hub thresholds must be positive with "
                                    "differentiator_share < mirror_share");
    }

    const int layer1_width = net.layer_dims[1];
    std::set<int> cand;
    for (const auto& id : candidates) {
        if (id.layer != 1) continue;
        if (id.neuron < 0 || id.neuron >= layer1_width) {
            throw std::invalid_argument("candidate neuron L1N" + std::to_string(id.neuron) +
                                        " outside layer width " + std::to_string(layer1_width));
        }
        cand.insert(id.neuron);
    }
    if (cand.empty()) {
        throw std::invalid_argument("no layer-1 candidates to trace into layer 2");
    }
    std::set<int> diff;
    for (const auto& id : differentiators) {
        if (id.layer != 1) continue;
        if (id.neuron < 0 || id.neuron >= layer1_width) {
            throw std::invalid_argument("differentiator neuron L1N" + std::to_string(id.neuron) +
                                        " outside layer width " + std::to_string(layer1_width));
        }
        diff.insert(id.neuron);
    }

    const std::vector<WeightEdge> incoming = edge_zscores(net, 1, 2);
    const int hub_width = net.layer_dims[2];
    const int output_layer = net.layer_count();  // probe numbering of the softmax layer
    const bool hub_is_output = output_layer == 2;
    const bool next_is_output = output_layer == 3;

    std::vector<WeightEdge> outgoing_all;
    if (net.layer_count() >= 3) outgoing_all = edge_zscores(net, 2, 3);

    std::vector<CircuitGraph> hubs;
    for (int h = 0; h < hub_width; ++h) {
        double cand_sum = 0.0;
        double diff_sum = 0.0;
        for (const auto& e : incoming) {
            if (e.to_neuron != h || e.weight <= 0.0 || e.zscore <= 0.0) continue;
            if (cand.count(e.from_neuron)) cand_sum += e.zscore;
            if (diff.count(e.from_neuron)) diff_sum += e.zscore;
        }
        const double denom = cand_sum + diff_sum;
        if (denom <= 0.0) continue;

        CircuitGraph g;
        g.hub_layer = 2;
        g.hub_neuron = h;
        g.candidate_share = cand_sum / denom;
        if (g.candidate_share >= th.mirror_share) {
            g.kind = HubKind::MirrorDriven;
        } else if (g.candidate_share <= th.differentiator_share) {
            g.kind = HubKind::DifferentiatorDriven;
        } else {
            g.kind = HubKind::Mixed;
        }

        for (const auto& e : incoming) {
            if (e.to_neuron == h && std::abs(e.zscore) >= th.edge_z) g.incoming.push_back(e);
        }
        sort_by_strength(g.incoming);

        if (!outgoing_all.empty()) {
            for (const auto& e : outgoing_all) {
                if (e.from_neuron == h && std::abs(e.zscore) >= th.edge_z) {
                    g.outgoing.push_back(e);
                }
            }
            sort_by_strength(g.outgoing);
        }

        if (hub_is_output) {
            // The hub is itself an action neuron.
            g.action_target = static_cast<env::Action>(h);
        } else if (next_is_output) {
            double best = -std::numeric_limits<double>::infinity();
            double second = -std::numeric_limits<double>::infinity();
            int best_neuron = -1;
            for (const auto& e : outgoing_all) {
                if (e.from_neuron != h) continue;
                if (e.zscore > best) {
                    second = best;
                    best = e.zscore;
                    best_neuron = e.to_neuron;
                } else if (e.zscore > second) {
                    second = e.zscore;
                }
            }
            if (best_neuron >= 0 && best - second >= th.action_gap) {
                g.action_target = static_cast<env::Action>(best_neuron);
            }
        }
        // Deeper stacks: layer 3 is hidden, so no action label applies.

        g.name = std::string(hub_kind_name(g.kind)) + ":L2N" + std::to_string(h);
        if (g.action_target) {
            g.name += std::string("->") + env::action_name(*g.action_target);
        }
        hubs.push_back(std::move(g));
    }
    return hubs;
}

void export_graphs(const std::vector<CircuitGraph>& graphs, const std::filesystem::path& path) {
    json doc{{"schema_version", 1}, {"kind", "circuit_graphs"}, {"graphs", json::array()}};
    for (const auto& g : graphs) {
        json jg{{"name", g.name},
                {"hub_kind", hub_kind_name(g.kind)},
                {"hub_layer", g.hub_layer},
                {"hub_neuron", g.hub_neuron},
                {"candidate_share", g.candidate_share},
                {"incoming", json::array()},
                {"outgoing", json::array()}};
        if (g.action_target) {
            jg["action_target"] = env::action_name(*g.action_target);
        } else {
            jg["action_target"] = nullptr;
        }
        for (const auto& e : g.incoming) jg["incoming"].push_back(edge_to_json(e));
        for (const auto& e : g.outgoing) jg["outgoing"].push_back(edge_to_json(e));
        doc["graphs"].push_back(std::move(jg));
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << doc.dump(2) << '\n';
    if (!out) throw std::runtime_error("failed writing " + path.string());

    const std::filesystem::path summary_path =
        path.parent_path() / (path.stem().string() + "_summary.txt");
    std::ofstream txt(summary_path, std::ios::binary | std::ios::trunc);
    if (!txt) throw std::runtime_error("cannot open " + summary_path.string() + " for writing");
    if (graphs.empty()) txt << "no hubs found\n";
    for (const auto& g : graphs) {
        txt << "hub L" << g.hub_layer << "N" << g.hub_neuron << " [" << hub_kind_name(g.kind)
            << "] candidate-share " << format_g(g.candidate_share);
        if (g.action_target) txt << " action " << env::action_name(*g.action_target);
        txt << '\n';
        for (const auto& e : g.incoming) {
            txt << "  in  L" << e.from_layer << "N" << e.from_neuron << " -> L" << e.to_layer
                << "N" << e.to_neuron << " weight " << format_g(e.weight) << " z "
                << format_g(e.zscore) << '\n';
        }
        for (const auto& e : g.outgoing) {
            txt << "  out L" << e.from_layer << "N" << e.from_neuron << " -> L" << e.to_layer
                << "N" << e.to_neuron << " weight " << format_g(e.weight) << " z "
                << format_g(e.zscore) << '\n';
        }
    }
    if (!txt) throw std::runtime_error("failed writing " + summary_path.string());
}

std::vector<CircuitGraph> read_graphs(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw std::runtime_error(path.string() + ": not valid JSON: " + e.what());
    }
    try {
        if (doc.at("kind").get<std::string>() != "circuit_graphs" ||
            doc.at("schema_version").get<int>() != 1) {
            throw std::runtime_error(path.string() + ": not a circuit_graphs document");
        }
        std::vector<CircuitGraph> graphs;
        for (const auto& jg : doc.at("graphs")) {
            CircuitGraph g;
            g.name = jg.at("name").get<std::string>();
            g.kind = hub_kind_from_name(jg.at("hub_kind").get<std::string>());
            g.hub_layer = jg.at("hub_layer").get<int>();
            g.hub_neuron = jg.at("hub_neuron").get<int>();
            g.candidate_share = jg.at("candidate_share").get<double>();
            if (!jg.at("action_target").is_null()) {
                const std::string name = jg.at("action_target").get<std::string>();
                bool found = false;
                for (env::Action a : env::kAllActions) {
                    if (name == env::action_name(a)) {
                        g.action_target = a;
                        found = true;
                    }
                }
                if (!found) {
                    throw std::runtime_error(path.string() + ": unknown action '" + name + "'");
                }
            }
            for (const auto& je : jg.at("incoming")) g.incoming.push_back(edge_from_json(je));
            for (const auto& je : jg.at("outgoing")) g.outgoing.push_back(edge_from_json(je));
            graphs.push_back(std::move(g));
        }
        return graphs;
    } catch (const json::exception& e) {
        throw std::runtime_error(path.string() + ": malformed circuit graphs: " + e.what());
    }
}

}  // namespace frogtoad::circuits
