#include "frogtoad/network.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace frogtoad::neural {

namespace {

constexpr double kLossEpsilon = 1e-12;

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

// Scratch buffers shared by forward/backward so the training loop does not
// allocate per example.
struct Scratch {
    std::vector<std::vector<double>> z;      // pre-activations, one per layer
    std::vector<std::vector<double>> a;      // post-activations per hidden layer
    std::vector<std::vector<double>> delta;  // back-propagated errors

    void fit(const Network& net) {
        const int layers = net.layer_count();
        z.resize(layers);
        a.resize(layers > 0 ? layers - 1 : 0);
        delta.resize(layers);
        for (int l = 0; l < layers; ++l) {
            z[l].resize(static_cast<std::size_t>(net.layer_dims[l + 1]));
            delta[l].resize(z[l].size());
            if (l < layers - 1) a[l].resize(z[l].size());
        }
    }
};

thread_local Scratch tl_scratch;

// z = W x + b for one layer.
void affine(const std::vector<double>& w, const std::vector<double>& b,
            const double* x, int in_dim, std::vector<double>& out) {
    const int out_dim = static_cast<int>(b.size());
    for (int o = 0; o < out_dim; ++o) {
        const double* row = w.data() + static_cast<std::size_t>(o) * in_dim;
        double acc = b[static_cast<std::size_t>(o)];
        for (int i = 0; i < in_dim; ++i) acc += row[i] * x[i];
        out[static_cast<std::size_t>(o)] = acc;
    }
}

void softmax(const std::vector<double>& z, std::array<double, kOutputDim>& probs) {
    double zmax = z[0];
    for (double v : z) zmax = std::max(zmax, v);
    double sum = 0.0;
    for (int o = 0; o < kOutputDim; ++o) {
        probs[static_cast<std::size_t>(o)] = std::exp(z[static_cast<std::size_t>(o)] - zmax);
        sum += probs[static_cast<std::size_t>(o)];
    }
    for (double& p : probs) p /= sum;
}

void check_mask(const Network& net, const DropoutMask* mask) {
    if (mask == nullptr) return;
    const std::size_t hidden_layers = static_cast<std::size_t>(net.layer_count()) - 1;
    require(mask->keep.size() == hidden_layers,
            "dropout mask covers " + std::to_string(mask->keep.size()) +
                " hidden layers, network has " + std::to_string(hidden_layers));
    for (std::size_t l = 0; l < hidden_layers; ++l) {
        require(mask->keep[l].size() == static_cast<std::size_t>(net.layer_dims[l + 1]),
                "dropout mask layer " + std::to_string(l + 1) + " has " +
                    std::to_string(mask->keep[l].size()) + " entries, expected " +
                    std::to_string(net.layer_dims[l + 1]));
    }
    require(std::isfinite(mask->keep_scale) && mask->keep_scale >= 1.0,
            "dropout keep_scale must be a finite value >= 1");
}

// Runs the full forward pass into scratch; returns output probabilities.
std::array<double, kOutputDim> run_forward(const Network& net,
                                           const std::vector<double>& input,
                                           const DropoutMask* mask, Scratch& s) {
    const int layers = net.layer_count();
    const double* x = input.data();
    int in_dim = net.layer_dims[0];
    for (int l = 0; l < layers; ++l) {
        affine(net.weights[static_cast<std::size_t>(l)], net.biases[static_cast<std::size_t>(l)],
               x, in_dim, s.z[static_cast<std::size_t>(l)]);
        if (l < layers - 1) {
            auto& act = s.a[static_cast<std::size_t>(l)];
            const auto& z = s.z[static_cast<std::size_t>(l)];
            for (std::size_t i = 0; i < z.size(); ++i) {
                double v = z[i] > 0.0 ? z[i] : 0.0;
                if (mask != nullptr) {
                    v = mask->keep[static_cast<std::size_t>(l)][i] != 0 ? v * mask->keep_scale : 0.0;
                }
                act[i] = v;
            }
            x = act.data();
            in_dim = net.layer_dims[static_cast<std::size_t>(l) + 1];
        }
    }
    std::array<double, kOutputDim> probs{};
    softmax(s.z[static_cast<std::size_t>(layers) - 1], probs);
    return probs;
}

}  // namespace

void check_hyperparams(const Hyperparams& hp) {
    require(std::isfinite(hp.learning_rate) && hp.learning_rate > 0.0,
            "learning_rate must be a finite value > 0");
    require(hp.hidden_layers >= 1 && hp.hidden_layers <= 3,
            "hidden_layers must be in [1, 3], got " + std::to_string(hp.hidden_layers));
    require(hp.neurons_per_layer >= 5 && hp.neurons_per_layer <= 50,
            "neurons_per_layer must be in [5, 50], got " + std::to_string(hp.neurons_per_layer));
    require(hp.batch_size >= 20 && hp.batch_size <= 25,
            "batch_size must be in [20, 25], got " + std::to_string(hp.batch_size));
    require(std::isfinite(hp.dropout_rate) && hp.dropout_rate >= 0.0 && hp.dropout_rate < 1.0,
            "dropout_rate must be in [0, 1)");
    require(hp.max_epochs >= 1, "max_epochs must be >= 1");
    require(hp.patience >= 1, "patience must be >= 1");
}

void check_network(const Network& net) {
    require(net.layer_dims.size() >= 2, "network needs at least input and output layers");
    require(net.layer_dims.front() == kInputDim,
            "input layer must have " + std::to_string(kInputDim) + " units");
    require(net.layer_dims.back() == kOutputDim,
            "output layer must have " + std::to_string(kOutputDim) + " units");
    const std::size_t layers = net.layer_dims.size() - 1;
    require(net.weights.size() == layers && net.biases.size() == layers,
            "weight/bias matrix count must match layer_dims");
    for (std::size_t l = 0; l < layers; ++l) {
        const int in_dim = net.layer_dims[l];
        const int out_dim = net.layer_dims[l + 1];
        require(in_dim >= 1 && out_dim >= 1, "layer dimensions must be positive");
        require(net.weights[l].size() ==
                    static_cast<std::size_t>(in_dim) * static_cast<std::size_t>(out_dim),
                "weight matrix " + std::to_string(l) + " has wrong size");
        require(net.biases[l].size() == static_cast<std::size_t>(out_dim),
                "bias vector " + std::to_string(l) + " has wrong size");
        for (double w : net.weights[l]) require(std::isfinite(w), "non-finite weight");
        for (double b : net.biases[l]) require(std::isfinite(b), "non-finite bias");
    }
}

Network init_network(const std::vector<int>& hidden_dims, std::uint64_t seed) {
    Network net;
    net.layer_dims.push_back(kInputDim);
    for (int h : hidden_dims) {
        require(h >= 1, "hidden layer width must be >= 1");
        net.layer_dims.push_back(h);
    }
    net.layer_dims.push_back(kOutputDim);

    const std::size_t layers = net.layer_dims.size() - 1;
    for (std::size_t l = 0; l < layers; ++l) {
        const int in_dim = net.layer_dims[l];
        const int out_dim = net.layer_dims[l + 1];
        SplitMix64 rng(mix_seed(seed, 0x1417, static_cast<std::uint64_t>(l)));
        const double limit = std::sqrt(6.0 / static_cast<double>(in_dim));
        std::vector<double> w(static_cast<std::size_t>(in_dim) * out_dim);
        for (double& v : w) v = (2.0 * rng.next_double() - 1.0) * limit;
        net.weights.push_back(std::move(w));
        net.biases.emplace_back(static_cast<std::size_t>(out_dim), 0.0);
    }
    check_network(net);
    return net;
}

DropoutMask draw_mask(const Network& net, double rate, SplitMix64& rng) {
    require(std::isfinite(rate) && rate >= 0.0 && rate < 1.0, "dropout rate must be in [0, 1)");
    DropoutMask mask;
    mask.keep_scale = 1.0 / (1.0 - rate);
    const int hidden_layers = net.layer_count() - 1;
    mask.keep.resize(static_cast<std::size_t>(hidden_layers));
    for (int l = 0; l < hidden_layers; ++l) {
        auto& layer = mask.keep[static_cast<std::size_t>(l)];
        layer.resize(static_cast<std::size_t>(net.layer_dims[static_cast<std::size_t>(l) + 1]));
        for (auto& k : layer) k = rng.next_double() >= rate ? 1 : 0;
    }
    return mask;
}

ForwardResult forward(const Network& net, const std::vector<double>& input,
                      const DropoutMask* mask) {
    require(static_cast<int>(input.size()) == net.layer_dims.front(),
            "input has " + std::to_string(input.size()) + " values, expected " +
                std::to_string(net.layer_dims.front()));
    check_mask(net, mask);
    Scratch& s = tl_scratch;
    s.fit(net);
    ForwardResult result;
    result.probs = run_forward(net, input, mask, s);
    result.hidden.assign(s.a.begin(), s.a.end());
    return result;
}

double loss(const std::array<double, kOutputDim>& probs, env::Action label) {
    const int idx = static_cast<int>(label);
    require(idx >= 0 && idx < kOutputDim, "label out of range");
    return -std::log(std::max(probs[static_cast<std::size_t>(idx)], kLossEpsilon));
}

void Gradients::zero() {
    for (auto& w : weights) std::fill(w.begin(), w.end(), 0.0);
    for (auto& b : biases) std::fill(b.begin(), b.end(), 0.0);
}

Gradients zero_like(const Network& net) {
    Gradients g;
    for (const auto& w : net.weights) g.weights.emplace_back(w.size(), 0.0);
    for (const auto& b : net.biases) g.biases.emplace_back(b.size(), 0.0);
    return g;
}

double backward(const Network& net, const std::vector<double>& input,
                env::Action label, const DropoutMask* mask, Gradients& out) {
    require(static_cast<int>(input.size()) == net.layer_dims.front(),
            "input has " + std::to_string(input.size()) + " values, expected " +
                std::to_string(net.layer_dims.front()));
    check_mask(net, mask);
    require(out.weights.size() == net.weights.size() && out.biases.size() == net.biases.size(),
            "gradient buffers do not match the network");

    Scratch& s = tl_scratch;
    s.fit(net);
    const std::array<double, kOutputDim> probs = run_forward(net, input, mask, s);
    const double example_loss = loss(probs, label);

    const int layers = net.layer_count();
    const int last = layers - 1;

    // Softmax + cross-entropy collapses to p - y at the output.
    auto& dout = s.delta[static_cast<std::size_t>(last)];
    for (int o = 0; o < kOutputDim; ++o) dout[static_cast<std::size_t>(o)] = probs[static_cast<std::size_t>(o)];
    dout[static_cast<std::size_t>(static_cast<int>(label))] -= 1.0;

    for (int l = last; l >= 0; --l) {
        const auto& delta = s.delta[static_cast<std::size_t>(l)];
        const double* prev =
            l == 0 ? input.data() : s.a[static_cast<std::size_t>(l) - 1].data();
        const int in_dim = net.layer_dims[static_cast<std::size_t>(l)];
        const int out_dim = net.layer_dims[static_cast<std::size_t>(l) + 1];

        auto& gw = out.weights[static_cast<std::size_t>(l)];
        auto& gb = out.biases[static_cast<std::size_t>(l)];
        for (int o = 0; o < out_dim; ++o) {
            const double d = delta[static_cast<std::size_t>(o)];
            gb[static_cast<std::size_t>(o)] += d;
            double* grow = gw.data() + static_cast<std::size_t>(o) * in_dim;
            for (int i = 0; i < in_dim; ++i) grow[i] += d * prev[i];
        }

        if (l == 0) break;

        // Push the error through W^T, the dropout mask, and the ReLU gate.
        auto& dprev = s.delta[static_cast<std::size_t>(l) - 1];
        const auto& w = net.weights[static_cast<std::size_t>(l)];
        const auto& zprev = s.z[static_cast<std::size_t>(l) - 1];
        for (int i = 0; i < in_dim; ++i) {
            double acc = 0.0;
            for (int o = 0; o < out_dim; ++o) {
                acc += w[static_cast<std::size_t>(o) * in_dim + static_cast<std::size_t>(i)] *
                       delta[static_cast<std::size_t>(o)];
            }
            if (mask != nullptr) {
                acc = mask->keep[static_cast<std::size_t>(l) - 1][static_cast<std::size_t>(i)] != 0
                          ? acc * mask->keep_scale
                          : 0.0;
            }
            dprev[static_cast<std::size_t>(i)] = zprev[static_cast<std::size_t>(i)] > 0.0 ? acc : 0.0;
        }
    }
    return example_loss;
}

std::vector<double> to_input(const std::array<std::uint8_t, kInputDim>& features) {
    std::vector<double> input(kInputDim);
    for (int i = 0; i < kInputDim; ++i) input[static_cast<std::size_t>(i)] = features[static_cast<std::size_t>(i)];
    return input;
}

}  // namespace frogtoad::neural
