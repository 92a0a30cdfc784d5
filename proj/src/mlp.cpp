#include "linobs/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace linobs {

void MlpConfig::validate() const {
    if (input_dim < 1 || hidden1 < 1 || hidden2 < 1 || output_dim < 1)
        throw std::invalid_argument("MlpConfig: all layer widths must be positive");
}

namespace {

inline double activate(MlpConfig::Activation a, double v) {
    return a == MlpConfig::Activation::Sigmoid ? 1.0 / (1.0 + std::exp(-v)) : v;
}

inline double activate_slope(MlpConfig::Activation act, double a) {
    return act == MlpConfig::Activation::Sigmoid ? a * (1.0 - a) : 1.0;
}

} // namespace

void mlp_forward(const MlpConfig& cfg, std::span<const double> params,
                 std::span<const double> x, MlpWorkspace& ws, std::span<double> out) {
    const int in = cfg.input_dim, h1 = cfg.hidden1, h2 = cfg.hidden2, no = cfg.output_dim;
    const double* w1 = params.data();
    const double* b1 = w1 + h1 * in;
    const double* w2 = b1 + h1;
    const double* b2 = w2 + h2 * h1;
    const double* w0 = b2 + h2;
    const double* b0 = w0 + no * h2;

    ws.a1.resize(h1);
    ws.a2.resize(h2);
    for (int i = 0; i < h1; ++i) {
        double s = b1[i];
        const double* row = w1 + i * in;
        for (int j = 0; j < in; ++j) s += row[j] * x[j];
        ws.a1[i] = activate(cfg.activation, s);
    }
    for (int i = 0; i < h2; ++i) {
        double s = b2[i];
        const double* row = w2 + i * h1;
        for (int j = 0; j < h1; ++j) s += row[j] * ws.a1[j];
        ws.a2[i] = activate(cfg.activation, s);
    }
    for (int i = 0; i < no; ++i) {
        double s = b0[i];
        const double* row = w0 + i * h2;
        for (int j = 0; j < h2; ++j) s += row[j] * ws.a2[j];
        out[i] = s;
    }
}

Vec mlp_forward(const MlpConfig& cfg, std::span<const double> params, std::span<const double> x) {
    cfg.validate();
    if (static_cast<int>(params.size()) != cfg.param_count())
        throw std::invalid_argument("mlp_forward: parameter vector length mismatch");
    if (static_cast<int>(x.size()) != cfg.input_dim)
        throw std::invalid_argument("mlp_forward: input length mismatch");
    Vec out(cfg.output_dim);
    MlpWorkspace ws;
    mlp_forward(cfg, params, x, ws, out);
    return out;
}

Matrix mlp_input_jacobian(const MlpConfig& cfg, std::span<const double> params,
                          std::span<const double> x) {
    cfg.validate();
    if (static_cast<int>(params.size()) != cfg.param_count())
        throw std::invalid_argument("mlp_input_jacobian: parameter vector length mismatch");
    if (static_cast<int>(x.size()) != cfg.input_dim)
        throw std::invalid_argument("mlp_input_jacobian: input length mismatch");
    const int in = cfg.input_dim, h1 = cfg.hidden1, h2 = cfg.hidden2, no = cfg.output_dim;
    const double* w1 = params.data();
    const double* b1 = w1 + h1 * in;
    const double* w2 = b1 + h1;
    const double* w0 = params.data() + h1 * (in + 1) + h2 * (h1 + 1);

    MlpWorkspace ws;
    Vec out(no);
    mlp_forward(cfg, params, x, ws, out);

    // m1 = diag(slope(a1)) * w1, then m2 = diag(slope(a2)) * w2 * m1,
    // jacobian = w0 * m2; chain rule through both hidden layers.
    Matrix m1(h1, in);
    for (int i = 0; i < h1; ++i) {
        const double d = activate_slope(cfg.activation, ws.a1[i]);
        for (int j = 0; j < in; ++j) m1(i, j) = d * w1[i * in + j];
    }
    Matrix m2(h2, in);
    for (int i = 0; i < h2; ++i) {
        const double d = activate_slope(cfg.activation, ws.a2[i]);
        for (int j = 0; j < in; ++j) {
            double s = 0.0;
            for (int k = 0; k < h1; ++k) s += w2[i * h1 + k] * m1(k, j);
            m2(i, j) = d * s;
        }
    }
    Matrix jac(no, in);
    for (int i = 0; i < no; ++i)
        for (int j = 0; j < in; ++j) {
            double s = 0.0;
            for (int k = 0; k < h2; ++k) s += w0[i * h2 + k] * m2(k, j);
            jac(i, j) = s;
        }
    return jac;
}

namespace {

inline std::uint64_t splitmix64(std::uint64_t v) {
    v += 0x9E3779B97F4A7C15ULL;
    v = (v ^ (v >> 30)) * 0xBF58476D1CE4E5B9ULL;
    v = (v ^ (v >> 27)) * 0x94D049BB133111EBULL;
    return v ^ (v >> 31);
}

} // namespace

Vec mlp_init_random(const MlpConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    const int count = cfg.param_count();
    Vec params(count);
    for (int i = 0; i < count; ++i) {
        const std::uint64_t z = splitmix64(splitmix64(seed) ^ (0x9E3779B97F4A7C15ULL * (i + 1)));
        const double u = static_cast<double>(z >> 11) * 0x1.0p-53;
        params[i] = u - 0.5;
    }
    return params;
}

Vec mlp_init_glorot(const MlpConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    Vec params(cfg.param_count(), 0.0);
    const struct {
        int fan_in, fan_out;
    } layers[] = {{cfg.input_dim, cfg.hidden1},
                  {cfg.hidden1, cfg.hidden2},
                  {cfg.hidden2, cfg.output_dim}};
    int pos = 0;
    int counter = 0;
    for (const auto& layer : layers) {
        const double bound = std::sqrt(6.0 / (layer.fan_in + layer.fan_out));
        const int weights = layer.fan_out * layer.fan_in;
        for (int i = 0; i < weights; ++i) {
            const std::uint64_t z =
                splitmix64(splitmix64(seed) ^ (0x9E3779B97F4A7C15ULL * (++counter)));
            const double u = static_cast<double>(z >> 11) * 0x1.0p-53;
            params[pos + i] = (2.0 * u - 1.0) * bound;
        }
        pos += weights + layer.fan_out;  // biases stay zero
    }
    return params;
}

} // namespace linobs
