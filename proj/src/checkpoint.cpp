#include "frogtoad/checkpoint.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace frogtoad::neural {

namespace {

using nlohmann::json;

// Stamps are synthetic: they encode the seed, not wall time, so reruns with
// the same seed reproduce every artifact byte for byte.
constexpr std::time_t kStampBase = 1704067200;  // 2024-01-01T00:00:00Z
constexpr std::uint64_t kStampSpan = 63072000;  // two years of seconds

std::string format_g(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

json hyperparams_to_json(const Hyperparams& hp) {
    return json{{"learning_rate", hp.learning_rate},
                {"hidden_layers", hp.hidden_layers},
                {"neurons_per_layer", hp.neurons_per_layer},
                {"batch_size", hp.batch_size},
                {"dropout_rate", hp.dropout_rate},
                {"max_epochs", hp.max_epochs},
                {"patience", hp.patience},
                {"seed", hp.seed}};
}

Hyperparams hyperparams_from_json(const json& j) {
    Hyperparams hp;
    hp.learning_rate = j.at("learning_rate").get<double>();
    hp.hidden_layers = j.at("hidden_layers").get<int>();
    hp.neurons_per_layer = j.at("neurons_per_layer").get<int>();
    hp.batch_size = j.at("batch_size").get<int>();
    hp.dropout_rate = j.at("dropout_rate").get<double>();
    hp.max_epochs = j.at("max_epochs").get<int>();
    hp.patience = j.at("patience").get<int>();
    hp.seed = j.at("seed").get<std::uint64_t>();
    return hp;
}

}  // namespace

std::string run_stamp_from_seed(std::uint64_t seed) {
    const std::time_t t = kStampBase + static_cast<std::time_t>(seed % kStampSpan);
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y%m%d-%H%M%S", &tm_utc);
    return buf;
}

std::string checkpoint_filename(const std::string& run_stamp, const Hyperparams& hp,
                                int epoch, double val_loss) {
    char tail[64];
    std::snprintf(tail, sizeof(tail), "%.4f", val_loss);
    std::ostringstream name;
    name << "checkpoint-" << run_stamp << "-actrelu_bs" << hp.batch_size << "_dr"
         << format_g(hp.dropout_rate) << "_ep" << hp.max_epochs << "_nl" << hp.hidden_layers
         << "_nn" << hp.neurons_per_layer << "_lr" << format_g(hp.learning_rate) << "-epoch"
         << epoch << "-valLoss" << tail;
    return name.str();
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
    check_network(ckpt.net);
    check_hyperparams(ckpt.hp);
    if (ckpt.epoch < 1) throw std::invalid_argument("checkpoint epoch must be >= 1");
    if (!std::isfinite(ckpt.val_loss) || ckpt.val_loss < 0.0) {
        throw std::invalid_argument("checkpoint val_loss must be finite and >= 0");
    }

    json doc{{"schema_version", kCheckpointSchemaVersion},
             {"kind", "checkpoint"},
             {"run_stamp", ckpt.run_stamp},
             {"epoch", ckpt.epoch},
             {"val_loss", ckpt.val_loss},
             {"hyperparams", hyperparams_to_json(ckpt.hp)},
             {"network", json{{"layer_dims", ckpt.net.layer_dims},
                              {"weights", ckpt.net.weights},
                              {"biases", ckpt.net.biases}}}};

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << doc.dump() << '\n';
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CorruptCheckpointError("cannot open " + path.string());

    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw CorruptCheckpointError(path.string() + ": not valid JSON: " + e.what());
    }

    if (!doc.is_object() || !doc.contains("schema_version") || !doc.contains("kind")) {
        throw CorruptCheckpointError(path.string() + ": missing schema header");
    }
    if (!doc["kind"].is_string() || doc["kind"].get<std::string>() != "checkpoint" ||
        !doc["schema_version"].is_number_integer() ||
        doc["schema_version"].get<int>() != kCheckpointSchemaVersion) {
        throw SchemaMismatchError(path.string() + ": expected checkpoint schema version " +
                                  std::to_string(kCheckpointSchemaVersion));
    }

    Checkpoint ckpt;
    try {
        ckpt.run_stamp = doc.at("run_stamp").get<std::string>();
        ckpt.epoch = doc.at("epoch").get<int>();
        ckpt.val_loss = doc.at("val_loss").get<double>();
        ckpt.hp = hyperparams_from_json(doc.at("hyperparams"));
        const json& net = doc.at("network");
        ckpt.net.layer_dims = net.at("layer_dims").get<std::vector<int>>();
        ckpt.net.weights = net.at("weights").get<std::vector<std::vector<double>>>();
        ckpt.net.biases = net.at("biases").get<std::vector<std::vector<double>>>();
    } catch (const json::exception& e) {
        throw CorruptCheckpointError(path.string() + ": malformed checkpoint fields: " + e.what());
    }

    try {
        check_network(ckpt.net);
        check_hyperparams(ckpt.hp);
        if (ckpt.epoch < 1) throw std::invalid_argument("epoch must be >= 1");
        if (!std::isfinite(ckpt.val_loss) || ckpt.val_loss < 0.0) {
            throw std::invalid_argument("val_loss must be finite and >= 0");
        }
    } catch (const std::invalid_argument& e) {
        throw CorruptCheckpointError(path.string() + ": inconsistent checkpoint: " + e.what());
    }
    return ckpt;
}

}  // namespace frogtoad::neural
