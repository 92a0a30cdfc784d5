#pragma once

#include <cstdint>
#include <span>

#include "linobs/linalg.hpp"

namespace linobs {

/// Two-hidden-layer perceptron with linear output. Parameters live in one
/// flat vector laid out as [w1 (h1 x in, row-major), b1, w2 (h2 x h1), b2,
/// w0 (out x h2), b0].
struct MlpConfig {
    int input_dim = 0;
    int hidden1 = 5;
    int hidden2 = 5;
    int output_dim = 0;
    enum class Activation { Sigmoid, Identity };
    Activation activation = Activation::Sigmoid;

    int param_count() const {
        return hidden1 * (input_dim + 1) + hidden2 * (hidden1 + 1) + output_dim * (hidden2 + 1);
    }
    void validate() const;
};

/// Scratch buffers so repeated forward passes allocate nothing.
struct MlpWorkspace {
    Vec a1, a2;
};

void mlp_forward(const MlpConfig& cfg, std::span<const double> params,
                 std::span<const double> x, MlpWorkspace& ws, std::span<double> out);
Vec mlp_forward(const MlpConfig& cfg, std::span<const double> params, std::span<const double> x);

/// Derivative of the output with respect to the input, out_dim x in_dim.
Matrix mlp_input_jacobian(const MlpConfig& cfg, std::span<const double> params,
                          std::span<const double> x);

/// Deterministic initial parameters, uniform in [-0.5, 0.5): entry i is drawn
/// from the splitmix64 finalizer applied to seed and i, so results are
/// bit-identical across platforms and never depend on call order.
Vec mlp_init_random(const MlpConfig& cfg, std::uint64_t seed);

/// Fan-balanced initial parameters (Glorot uniform): each layer's weights
/// uniform in +-sqrt(6/(fan_in+fan_out)), biases zero. Same counter-based
/// draws as mlp_init_random. Default start for training.
Vec mlp_init_glorot(const MlpConfig& cfg, std::uint64_t seed);

} // namespace linobs
