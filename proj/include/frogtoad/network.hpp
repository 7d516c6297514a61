#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "frogtoad/env.hpp"
#include "frogtoad/rng.hpp"

namespace frogtoad::neural {

inline constexpr int kInputDim = env::kStateDim;
inline constexpr int kOutputDim = 4;

// Spec envelope for the sweep space; checked before any training starts.
struct Hyperparams {
    double learning_rate = 5e-5;
    int hidden_layers = 1;      // 1..3
    int neurons_per_layer = 15; // 5..50
    int batch_size = 25;        // 20..25
    double dropout_rate = 0.0;  // [0,1)
    int max_epochs = 50;
    int patience = 10;
    std::uint64_t seed = 1;

    bool operator==(const Hyperparams&) const = default;
};

void check_hyperparams(const Hyperparams& hp);

// Fully-connected stack: ReLU on hidden layers, softmax on the output.
// weights[l] is row-major (out x in) between layer_dims[l] and
// layer_dims[l+1].
struct Network {
    std::vector<int> layer_dims;  // {100, h1, ..., hk, 4}
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;

    int layer_count() const { return static_cast<int>(weights.size()); }

    bool operator==(const Network&) const = default;
};

// Dimension chaining and finiteness; throws std::invalid_argument.
void check_network(const Network& net);

// Seeded uniform fan-in init (±sqrt(6/fan_in)), zero biases.
Network init_network(const std::vector<int>& hidden_dims, std::uint64_t seed);

// Inverted-dropout mask over hidden layers: kept activations are scaled by
// 1/(1-rate) at train time so inference needs no rescaling.
struct DropoutMask {
    double keep_scale = 1.0;
    std::vector<std::vector<std::uint8_t>> keep;  // per hidden layer
};

DropoutMask draw_mask(const Network& net, double rate, SplitMix64& rng);

struct ForwardResult {
    std::vector<std::vector<double>> hidden;  // post-ReLU (masked if training)
    std::array<double, kOutputDim> probs;     // softmax, sums to 1
};

// mask == nullptr means inference mode.
ForwardResult forward(const Network& net, const std::vector<double>& input,
                      const DropoutMask* mask = nullptr);

// Cross-entropy -log p[label], clamped at 1e-12.
double loss(const std::array<double, kOutputDim>& probs, env::Action label);

struct Gradients {
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;

    void zero();
};

Gradients zero_like(const Network& net);

// Adds this example's exact loss gradients into `out` and returns the
// example's loss. Same mask semantics as forward.
double backward(const Network& net, const std::vector<double>& input,
                env::Action label, const DropoutMask* mask, Gradients& out);

// Feature bytes -> network input.
std::vector<double> to_input(const std::array<std::uint8_t, kInputDim>& features);

}  // namespace frogtoad::neural
