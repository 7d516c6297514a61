#include "frogtoad/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"

#include "frogtoad/rng.hpp"

namespace frogtoad::config {

namespace {

using nlohmann::json;

// Same stream tag the sweep grid uses, so a config that omits per-run seeds
// reproduces the stock grid's seeding exactly.
constexpr std::uint64_t kStreamGrid = 0x51EE;

[[noreturn]] void fail(const std::string& origin, const std::string& msg) {
    throw ConfigError(origin + ": " + msg);
}

std::string join_path(const std::string& prefix, const std::string& key) {
    return prefix.empty() ? key : prefix + "." + key;
}

void check_keys(const json& obj, const std::string& origin, const std::string& prefix,
                std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) {
        fail(origin, prefix.empty() ? "top level must be a JSON object"
                                    : "'" + prefix + "' must be an object");
    }
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed) {
            if (it.key() == k) {
                known = true;
                break;
            }
        }
        if (!known) fail(origin, "unknown key '" + join_path(prefix, it.key()) + "'");
    }
}

double get_real(const json& obj, const std::string& origin, const std::string& prefix,
                const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) fail(origin, "'" + join_path(prefix, key) + "' must be a number");
    return v.get<double>();
}

long long get_int(const json& obj, const std::string& origin, const std::string& prefix,
                  const char* key, long long fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) {
        fail(origin, "'" + join_path(prefix, key) + "' must be an integer");
    }
    return v.get<long long>();
}

std::uint64_t get_seed(const json& obj, const std::string& origin, const std::string& prefix,
                       const char* key, std::uint64_t fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() &&
                                   v.get<long long>() < 0)) {
        fail(origin, "'" + join_path(prefix, key) + "' must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

neural::Hyperparams parse_hp(const json& obj, const std::string& origin,
                             const std::string& prefix, neural::Hyperparams base,
                             std::uint64_t derived_seed) {
    check_keys(obj, origin, prefix,
               {"learning_rate", "hidden_layers", "neurons_per_layer", "batch_size",
                "dropout_rate", "max_epochs", "patience", "seed"});
    base.learning_rate = get_real(obj, origin, prefix, "learning_rate", base.learning_rate);
    base.hidden_layers =
        static_cast<int>(get_int(obj, origin, prefix, "hidden_layers", base.hidden_layers));
    base.neurons_per_layer = static_cast<int>(
        get_int(obj, origin, prefix, "neurons_per_layer", base.neurons_per_layer));
    base.batch_size = static_cast<int>(get_int(obj, origin, prefix, "batch_size", base.batch_size));
    base.dropout_rate = get_real(obj, origin, prefix, "dropout_rate", base.dropout_rate);
    base.max_epochs = static_cast<int>(get_int(obj, origin, prefix, "max_epochs", base.max_epochs));
    base.patience = static_cast<int>(get_int(obj, origin, prefix, "patience", base.patience));
    base.seed = get_seed(obj, origin, prefix, "seed", derived_seed);
    return base;
}

json hp_to_json(const neural::Hyperparams& hp) {
    return json{{"learning_rate", hp.learning_rate},
                {"hidden_layers", hp.hidden_layers},
                {"neurons_per_layer", hp.neurons_per_layer},
                {"batch_size", hp.batch_size},
                {"dropout_rate", hp.dropout_rate},
                {"max_epochs", hp.max_epochs},
                {"patience", hp.patience},
                {"seed", hp.seed}};
}

}  // namespace

void check_run_config(const RunConfig& cfg) {
    try {
        env::check_config(cfg.world);
        oracle::check_config(cfg.oracle);
        dataset::check_spec(cfg.split);
        neural::check_hyperparams(cfg.training);
        for (const auto& hp : cfg.grid) neural::check_hyperparams(hp);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    if (cfg.out_root.empty()) throw ConfigError("config: out_root must not be empty");
    if (cfg.dataset_count < 1) throw ConfigError("config: dataset.count must be >= 1");
    if (cfg.dataset_count <= cfg.split.test_size) {
        throw ConfigError("config: dataset.count (" + std::to_string(cfg.dataset_count) +
                          ") must exceed dataset.test_size (" +
                          std::to_string(cfg.split.test_size) + ") so training rows remain");
    }
    if (cfg.probe_count < 1) throw ConfigError("config: probe.count must be >= 1");
    if (cfg.probe_count > static_cast<std::size_t>(cfg.split.test_size)) {
        throw ConfigError("config: probe.count cannot exceed dataset.test_size");
    }

    for (double v : {cfg.cmni_thresholds.candidate_mns, cfg.cmni_thresholds.differentiator_max_delta,
                     cfg.cmni_thresholds.differentiator_min_delta}) {
        if (!std::isfinite(v)) throw ConfigError("config: thresholds.cmni values must be finite");
    }
    const auto& ct = cfg.circuit_thresholds;
    if (!(ct.mirror_share > 0.0 && ct.mirror_share <= 1.0) ||
        !(ct.differentiator_share >= 0.0) || ct.differentiator_share >= ct.mirror_share) {
        throw ConfigError("config: thresholds.circuits shares must satisfy "
                          "0 <= differentiator_share < mirror_share <= 1");
    }
    if (!(ct.action_gap > 0.0) || !(ct.edge_z >= 0.0)) {
        throw ConfigError("config: thresholds.circuits.action_gap must be > 0 and edge_z >= 0");
    }
    const auto& rf = cfg.report_flags;
    if (!(rf.mirror_positive_val_loss > 0.0) || !(rf.mirror_negative_cmni >= 0.0) ||
        !(rf.mirror_positive_cmni > rf.mirror_negative_cmni)) {
        throw ConfigError("config: thresholds.report must satisfy mirror_positive_val_loss > 0 "
                          "and mirror_positive_cmni > mirror_negative_cmni >= 0");
    }
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        fail(origin, std::string("not valid JSON: ") + e.what());
    }
    check_keys(doc, origin, "",
               {"seed", "out_root", "world", "oracle", "dataset", "training", "grid", "probe",
                "thresholds"});

    RunConfig cfg;
    cfg.seed = get_seed(doc, origin, "", "seed", cfg.seed);
    if (doc.contains("out_root")) {
        const json& v = doc.at("out_root");
        if (!v.is_string()) fail(origin, "'out_root' must be a string");
        cfg.out_root = v.get<std::string>();
    }

    if (doc.contains("world")) {
        const json& w = doc.at("world");
        check_keys(w, origin, "world",
                   {"rough_prob", "fly_prob", "rough_run_max", "start_energy_frog",
                    "start_energy_toad"});
        cfg.world.rough_prob = get_real(w, origin, "world", "rough_prob", cfg.world.rough_prob);
        cfg.world.fly_prob = get_real(w, origin, "world", "fly_prob", cfg.world.fly_prob);
        cfg.world.rough_run_max =
            static_cast<int>(get_int(w, origin, "world", "rough_run_max", cfg.world.rough_run_max));
        cfg.world.start_energy_frog = static_cast<int>(
            get_int(w, origin, "world", "start_energy_frog", cfg.world.start_energy_frog));
        cfg.world.start_energy_toad = static_cast<int>(
            get_int(w, origin, "world", "start_energy_toad", cfg.world.start_energy_toad));
    }

    if (doc.contains("oracle")) {
        const json& o = doc.at("oracle");
        check_keys(o, origin, "oracle", {"refill_ceiling", "help_min_energy", "leap_lookahead"});
        cfg.oracle.refill_ceiling = static_cast<int>(
            get_int(o, origin, "oracle", "refill_ceiling", cfg.oracle.refill_ceiling));
        cfg.oracle.help_min_energy = static_cast<int>(
            get_int(o, origin, "oracle", "help_min_energy", cfg.oracle.help_min_energy));
        cfg.oracle.leap_lookahead = static_cast<int>(
            get_int(o, origin, "oracle", "leap_lookahead", cfg.oracle.leap_lookahead));
    }

    if (doc.contains("dataset")) {
        const json& d = doc.at("dataset");
        check_keys(d, origin, "dataset", {"count", "test_size", "proportions"});
        cfg.dataset_count = get_int(d, origin, "dataset", "count", cfg.dataset_count);
        cfg.split.test_size = get_int(d, origin, "dataset", "test_size", cfg.split.test_size);
        if (d.contains("proportions")) {
            const json& p = d.at("proportions");
            if (!p.is_array() || p.size() != 4) {
                fail(origin, "'dataset.proportions' must be an array of 4 numbers");
            }
            for (std::size_t i = 0; i < 4; ++i) {
                if (!p[i].is_number()) {
                    fail(origin, "'dataset.proportions' must be an array of 4 numbers");
                }
                cfg.split.proportions[i] = p[i].get<double>();
            }
        }
    }

    if (doc.contains("training")) {
        cfg.training = parse_hp(doc.at("training"), origin, "training", cfg.training,
                                mix_seed(cfg.seed, kStreamGrid, 0));
    } else {
        cfg.training.seed = mix_seed(cfg.seed, kStreamGrid, 0);
    }

    if (doc.contains("grid")) {
        const json& g = doc.at("grid");
        if (!g.is_array()) fail(origin, "'grid' must be an array");
        for (std::size_t i = 0; i < g.size(); ++i) {
            cfg.grid.push_back(parse_hp(g[i], origin, "grid[" + std::to_string(i) + "]",
                                        cfg.training, mix_seed(cfg.seed, kStreamGrid, i)));
        }
    }

    if (doc.contains("probe")) {
        const json& p = doc.at("probe");
        check_keys(p, origin, "probe", {"count"});
        const long long count = get_int(p, origin, "probe", "count",
                                        static_cast<long long>(cfg.probe_count));
        if (count < 0) fail(origin, "'probe.count' must be non-negative");
        cfg.probe_count = static_cast<std::size_t>(count);
    }

    if (doc.contains("thresholds")) {
        const json& t = doc.at("thresholds");
        check_keys(t, origin, "thresholds", {"cmni", "circuits", "report"});
        if (t.contains("cmni")) {
            const json& c = t.at("cmni");
            check_keys(c, origin, "thresholds.cmni",
                       {"candidate_mns", "differentiator_max_delta", "differentiator_min_delta"});
            cfg.cmni_thresholds.candidate_mns = get_real(
                c, origin, "thresholds.cmni", "candidate_mns", cfg.cmni_thresholds.candidate_mns);
            cfg.cmni_thresholds.differentiator_max_delta =
                get_real(c, origin, "thresholds.cmni", "differentiator_max_delta",
                         cfg.cmni_thresholds.differentiator_max_delta);
            cfg.cmni_thresholds.differentiator_min_delta =
                get_real(c, origin, "thresholds.cmni", "differentiator_min_delta",
                         cfg.cmni_thresholds.differentiator_min_delta);
        }
        if (t.contains("circuits")) {
            const json& c = t.at("circuits");
            check_keys(c, origin, "thresholds.circuits",
                       {"mirror_share", "differentiator_share", "action_gap", "edge_z"});
            cfg.circuit_thresholds.mirror_share =
                get_real(c, origin, "thresholds.circuits", "mirror_share",
                         cfg.circuit_thresholds.mirror_share);
            cfg.circuit_thresholds.differentiator_share =
                get_real(c, origin, "thresholds.circuits", "differentiator_share",
                         cfg.circuit_thresholds.differentiator_share);
            cfg.circuit_thresholds.action_gap = get_real(
                c, origin, "thresholds.circuits", "action_gap", cfg.circuit_thresholds.action_gap);
            cfg.circuit_thresholds.edge_z = get_real(c, origin, "thresholds.circuits", "edge_z",
                                                     cfg.circuit_thresholds.edge_z);
        }
        if (t.contains("report")) {
            const json& c = t.at("report");
            check_keys(c, origin, "thresholds.report",
                       {"mirror_positive_val_loss", "mirror_positive_cmni",
                        "mirror_negative_cmni"});
            cfg.report_flags.mirror_positive_val_loss =
                get_real(c, origin, "thresholds.report", "mirror_positive_val_loss",
                         cfg.report_flags.mirror_positive_val_loss);
            cfg.report_flags.mirror_positive_cmni =
                get_real(c, origin, "thresholds.report", "mirror_positive_cmni",
                         cfg.report_flags.mirror_positive_cmni);
            cfg.report_flags.mirror_negative_cmni =
                get_real(c, origin, "thresholds.report", "mirror_negative_cmni",
                         cfg.report_flags.mirror_negative_cmni);
        }
    }

    check_run_config(cfg);
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.string());
}

RunConfig default_config() { return parse_config("{}", "<defaults>"); }

void write_config(const std::filesystem::path& path, const RunConfig& cfg) {
    json doc{{"seed", cfg.seed},
             {"out_root", cfg.out_root.string()},
             {"world",
              {{"rough_prob", cfg.world.rough_prob},
               {"fly_prob", cfg.world.fly_prob},
               {"rough_run_max", cfg.world.rough_run_max},
               {"start_energy_frog", cfg.world.start_energy_frog},
               {"start_energy_toad", cfg.world.start_energy_toad}}},
             {"oracle",
              {{"refill_ceiling", cfg.oracle.refill_ceiling},
               {"help_min_energy", cfg.oracle.help_min_energy},
               {"leap_lookahead", cfg.oracle.leap_lookahead}}},
             {"dataset",
              {{"count", cfg.dataset_count},
               {"test_size", cfg.split.test_size},
               {"proportions", cfg.split.proportions}}},
             {"training", hp_to_json(cfg.training)},
             {"grid", json::array()},
             {"probe", {{"count", cfg.probe_count}}},
             {"thresholds",
              {{"cmni",
                {{"candidate_mns", cfg.cmni_thresholds.candidate_mns},
                 {"differentiator_max_delta", cfg.cmni_thresholds.differentiator_max_delta},
                 {"differentiator_min_delta", cfg.cmni_thresholds.differentiator_min_delta}}},
               {"circuits",
                {{"mirror_share", cfg.circuit_thresholds.mirror_share},
                 {"differentiator_share", cfg.circuit_thresholds.differentiator_share},
                 {"action_gap", cfg.circuit_thresholds.action_gap},
                 {"edge_z", cfg.circuit_thresholds.edge_z}}},
               {"report",
                {{"mirror_positive_val_loss", cfg.report_flags.mirror_positive_val_loss},
                 {"mirror_positive_cmni", cfg.report_flags.mirror_positive_cmni},
                 {"mirror_negative_cmni", cfg.report_flags.mirror_negative_cmni}}}}}};
    for (const auto& hp : cfg.grid) doc["grid"].push_back(hp_to_json(hp));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << doc.dump(2) << '\n';
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace frogtoad::config
