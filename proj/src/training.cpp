#include "frogtoad/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "json.hpp"

#include "frogtoad/rng.hpp"

namespace frogtoad::neural {

namespace {

using nlohmann::json;

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEpsilon = 1e-8;

// Stream tags for the independent RNG streams a training run draws from.
constexpr std::uint64_t kStreamShuffle = 0xE90C;
constexpr std::uint64_t kStreamDropout = 0xD909;
constexpr std::uint64_t kStreamGridSeed = 0x51EE;

struct AdamState {
    Gradients m;
    Gradients v;
    long step = 0;
};

void adam_update(Network& net, const Gradients& grad_sum, double inv_batch, AdamState& adam,
                 double lr) {
    ++adam.step;
    const double bc1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(adam.step));
    const double bc2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(adam.step));
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        auto update = [&](std::vector<double>& params, const std::vector<double>& gsum,
                          std::vector<double>& m, std::vector<double>& v) {
            for (std::size_t i = 0; i < params.size(); ++i) {
                const double g = gsum[i] * inv_batch;
                m[i] = kAdamBeta1 * m[i] + (1.0 - kAdamBeta1) * g;
                v[i] = kAdamBeta2 * v[i] + (1.0 - kAdamBeta2) * g * g;
                params[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + kAdamEpsilon);
            }
        };
        update(net.weights[l], grad_sum.weights[l], adam.m.weights[l], adam.v.weights[l]);
        update(net.biases[l], grad_sum.biases[l], adam.m.biases[l], adam.v.biases[l]);
    }
}

void check_labels(const dataset::Dataset& data, const char* what) {
    if (data.rows.empty()) {
        throw std::invalid_argument(std::string(what) + " split is empty");
    }
    for (std::size_t i = 0; i < data.rows.size(); ++i) {
        if (data.rows[i].label >= kOutputDim) {
            throw std::invalid_argument(std::string(what) + " split row " + std::to_string(i) +
                                        " has label " + std::to_string(data.rows[i].label));
        }
    }
}

std::string format_g(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

std::string format_f6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
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

}  // namespace

double validation_loss(const Network& net, const dataset::Dataset& val) {
    check_labels(val, "validation");
    std::vector<double> input(static_cast<std::size_t>(kInputDim));
    double total = 0.0;
    for (const auto& row : val.rows) {
        for (int i = 0; i < kInputDim; ++i) {
            input[static_cast<std::size_t>(i)] = row.features[static_cast<std::size_t>(i)];
        }
        const ForwardResult fr = forward(net, input);
        total += loss(fr.probs, static_cast<env::Action>(row.label));
    }
    return total / static_cast<double>(val.rows.size());
}

TrainResult train(const dataset::Dataset& train_data, const dataset::Dataset& val_data,
                  const Hyperparams& hp, const std::filesystem::path& out_dir) {
    check_hyperparams(hp);
    check_labels(train_data, "training");
    check_labels(val_data, "validation");
    std::filesystem::create_directories(out_dir);

    Network net = init_network(
        std::vector<int>(static_cast<std::size_t>(hp.hidden_layers), hp.neurons_per_layer),
        hp.seed);

    AdamState adam{zero_like(net), zero_like(net), 0};
    Gradients grad_sum = zero_like(net);

    const std::size_t n = train_data.rows.size();
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::vector<double> input(static_cast<std::size_t>(kInputDim));

    TrainResult result;
    result.run_stamp = run_stamp_from_seed(hp.seed);
    double best_val = std::numeric_limits<double>::infinity();
    int bad_streak = 0;

    for (int epoch = 1; epoch <= hp.max_epochs; ++epoch) {
        SplitMix64 shuffle_rng(mix_seed(hp.seed, kStreamShuffle, static_cast<std::uint64_t>(epoch)));
        for (std::size_t i = n; i > 1; --i) {
            const std::uint64_t j = shuffle_rng.next_below(i);
            std::swap(order[i - 1], order[j]);
        }
        SplitMix64 dropout_rng(mix_seed(hp.seed, kStreamDropout, static_cast<std::uint64_t>(epoch)));
        const bool use_dropout = hp.dropout_rate > 0.0;

        double epoch_loss = 0.0;
        int batch_index = 0;
        for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(hp.batch_size)) {
            const std::size_t stop = std::min(n, start + static_cast<std::size_t>(hp.batch_size));
            grad_sum.zero();
            double batch_loss = 0.0;
            for (std::size_t k = start; k < stop; ++k) {
                const auto& row = train_data.rows[order[k]];
                for (int i = 0; i < kInputDim; ++i) {
                    input[static_cast<std::size_t>(i)] = row.features[static_cast<std::size_t>(i)];
                }
                DropoutMask mask;
                if (use_dropout) mask = draw_mask(net, hp.dropout_rate, dropout_rng);
                batch_loss += backward(net, input, static_cast<env::Action>(row.label),
                                       use_dropout ? &mask : nullptr, grad_sum);
            }
            if (!std::isfinite(batch_loss)) {
                throw std::runtime_error("training diverged: non-finite loss at epoch " +
                                         std::to_string(epoch) + ", batch " +
                                         std::to_string(batch_index) +
                                         " (learning_rate=" + format_g(hp.learning_rate) + ")");
            }
            adam_update(net, grad_sum, 1.0 / static_cast<double>(stop - start), adam,
                        hp.learning_rate);
            epoch_loss += batch_loss;
            ++batch_index;
        }

        const double val_loss = validation_loss(net, val_data);
        if (!std::isfinite(val_loss)) {
            throw std::runtime_error("training diverged: non-finite validation loss at epoch " +
                                     std::to_string(epoch));
        }

        Checkpoint ckpt{net, hp, epoch, val_loss, result.run_stamp};
        const std::string file =
            checkpoint_filename(result.run_stamp, hp, epoch, val_loss) + ".json";
        save_checkpoint(out_dir / file, ckpt);

        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = epoch_loss / static_cast<double>(n);
        rec.val_loss = val_loss;
        rec.checkpoint = file;
        result.epochs.push_back(rec);

        if (val_loss < best_val) {
            best_val = val_loss;
            result.best_epoch = epoch;
            result.best_val_loss = val_loss;
            result.best_checkpoint = file;
            bad_streak = 0;
        } else {
            ++bad_streak;
            if (bad_streak >= hp.patience) {
                result.stopped_early = true;
                break;
            }
        }
    }

    result.epochs[static_cast<std::size_t>(result.best_epoch) - 1].best = true;

    json manifest{{"schema_version", 1},
                  {"kind", "train_manifest"},
                  {"run_stamp", result.run_stamp},
                  {"hyperparams", hyperparams_to_json(hp)},
                  {"best_epoch", result.best_epoch},
                  {"best_val_loss", result.best_val_loss},
                  {"best_checkpoint", result.best_checkpoint},
                  {"stopped_early", result.stopped_early},
                  {"epochs", json::array()}};
    for (const auto& rec : result.epochs) {
        manifest["epochs"].push_back(json{{"epoch", rec.epoch},
                                          {"train_loss", rec.train_loss},
                                          {"val_loss", rec.val_loss},
                                          {"checkpoint", rec.checkpoint},
                                          {"best", rec.best}});
    }
    std::ofstream mf(out_dir / "train_manifest.json", std::ios::binary | std::ios::trunc);
    if (!mf) throw std::runtime_error("cannot write " + (out_dir / "train_manifest.json").string());
    mf << manifest.dump(2) << '\n';

    return result;
}

std::vector<SweepEntry> sweep(const std::vector<Hyperparams>& grid,
                              const dataset::Dataset& train_data,
                              const dataset::Dataset& val_data,
                              const std::filesystem::path& out_dir) {
    if (grid.empty()) throw std::invalid_argument("sweep grid is empty");
    for (const auto& hp : grid) check_hyperparams(hp);
    std::filesystem::create_directories(out_dir);

    std::vector<SweepEntry> entries;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        char sub[16];
        std::snprintf(sub, sizeof(sub), "cfg%03zu", i);
        SweepEntry entry;
        entry.hp = grid[i];
        try {
            const TrainResult tr = train(train_data, val_data, grid[i], out_dir / sub);
            entry.status = "ok";
            entry.best_epoch = tr.best_epoch;
            entry.best_val_loss = tr.best_val_loss;
            entry.best_checkpoint = std::string(sub) + "/" + tr.best_checkpoint;
        } catch (const std::exception& e) {
            entry.status = "failed";
            entry.error = e.what();
        }
        entries.push_back(std::move(entry));
    }

    std::ofstream csv(out_dir / "sweep_manifest.csv", std::ios::binary | std::ios::trunc);
    if (!csv) throw std::runtime_error("cannot write " + (out_dir / "sweep_manifest.csv").string());
    csv << "index,learning_rate,hidden_layers,neurons_per_layer,batch_size,dropout_rate,"
           "max_epochs,patience,seed,status,best_epoch,best_val_loss,best_checkpoint,error\n";
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        csv << i << ',' << format_g(e.hp.learning_rate) << ',' << e.hp.hidden_layers << ','
            << e.hp.neurons_per_layer << ',' << e.hp.batch_size << ','
            << format_g(e.hp.dropout_rate) << ',' << e.hp.max_epochs << ',' << e.hp.patience << ','
            << e.hp.seed << ',' << e.status << ',' << e.best_epoch << ','
            << format_f6(e.best_val_loss) << ',' << e.best_checkpoint << ',' << e.error << '\n';
    }
    return entries;
}

std::vector<SweepEntry> read_sweep_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": empty file");
    const std::string expected =
        "index,learning_rate,hidden_layers,neurons_per_layer,batch_size,dropout_rate,"
        "max_epochs,patience,seed,status,best_epoch,best_val_loss,best_checkpoint,error";
    if (line != expected) {
        throw std::runtime_error(path.string() + ":1: unexpected header '" + line + "'");
    }

    std::vector<SweepEntry> entries;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        // The error column is last and may contain commas: take exactly 13
        // comma-separated fields and treat the remainder as the error text.
        std::vector<std::string> fields;
        std::size_t start = 0;
        for (int f = 0; f < 13; ++f) {
            const std::size_t comma = line.find(',', start);
            if (comma == std::string::npos) {
                throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                         ": expected 14 fields");
            }
            fields.push_back(line.substr(start, comma - start));
            start = comma + 1;
        }
        fields.push_back(line.substr(start));

        auto bad = [&](const char* what) -> std::runtime_error {
            return std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                      ": malformed " + what);
        };
        try {
            SweepEntry e;
            const std::size_t index = std::stoul(fields[0]);
            if (index != entries.size()) throw bad("index (rows must be 0,1,2,...)");
            e.hp.learning_rate = std::stod(fields[1]);
            e.hp.hidden_layers = std::stoi(fields[2]);
            e.hp.neurons_per_layer = std::stoi(fields[3]);
            e.hp.batch_size = std::stoi(fields[4]);
            e.hp.dropout_rate = std::stod(fields[5]);
            e.hp.max_epochs = std::stoi(fields[6]);
            e.hp.patience = std::stoi(fields[7]);
            e.hp.seed = std::stoull(fields[8]);
            e.status = fields[9];
            if (e.status != "ok" && e.status != "failed") throw bad("status");
            e.best_epoch = std::stoi(fields[10]);
            e.best_val_loss = std::stod(fields[11]);
            e.best_checkpoint = fields[12];
            e.error = fields[13];
            entries.push_back(std::move(e));
        } catch (const std::invalid_argument&) {
            throw bad("number");
        } catch (const std::out_of_range&) {
            throw bad("number (out of range)");
        }
    }
    return entries;
}

std::vector<Hyperparams> default_grid(std::uint64_t seed, int max_epochs) {
    struct Point {
        double lr;
        int layers;
        int neurons;
    };
    const Point points[] = {{5e-5, 1, 15}, {1e-5, 1, 15}, {4e-6, 1, 15},
                            {5e-5, 2, 11}, {1e-5, 2, 11}, {5e-5, 3, 10}};
    std::vector<Hyperparams> grid;
    for (std::size_t i = 0; i < std::size(points); ++i) {
        Hyperparams hp;
        hp.learning_rate = points[i].lr;
        hp.hidden_layers = points[i].layers;
        hp.neurons_per_layer = points[i].neurons;
        hp.batch_size = 25;
        hp.dropout_rate = 0.1;
        hp.max_epochs = max_epochs;
        hp.seed = mix_seed(seed, kStreamGridSeed, i);
        grid.push_back(hp);
    }
    return grid;
}

}  // namespace frogtoad::neural
