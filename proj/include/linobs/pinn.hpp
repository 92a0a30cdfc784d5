#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "linobs/lm.hpp"
#include "linobs/metrics.hpp"
#include "linobs/mlp.hpp"
#include "linobs/system.hpp"
#include "linobs/transform_map.hpp"

namespace linobs {

/// Training points for one subdomain, as a tensor-product grid.
struct CollocationSet {
    std::vector<Vec> points;
    std::vector<int> counts;  // per-dimension grid counts; product = points.size()
};

/// Equispaced tensor grid with per_dim nodes along each axis.
CollocationSet make_collocation(const Vec& lo, const Vec& hi, int per_dim);

/// Jacobian anchor at the origin, from the first-order matrix equation
/// j f = a j + b h.
struct PhaseTarget {
    Matrix j0;
};

PhaseTarget make_phase_target(const LinearizationData& lin, const Matrix& a);

/// Nested subdomain family: per-stage lower bounds (upper corner fixed at 0),
/// strictly decreasing so every stage's domain contains the previous one.
struct ContinuationSchedule {
    std::vector<double> lower_bounds;
    void validate() const;
};

/// Residual stack for a candidate transform: for each collocation point and
/// each output j, T(phi(x))_j - row_j(a) . T(x) - b_j(h(x)); then the n
/// entries of T(0); then the n*n entries of dT/dx(0) - j0, row-major. All
/// blocks carry equal weight.
Vec residual_for_map(const DiscreteSystem& sys, const ObserverSpec& obs, const TransformMap& map,
                     const CollocationSet& colloc, const PhaseTarget& phase);

/// Same residual stack for an MLP candidate given its flat parameters.
Vec residual_vector(const DiscreteSystem& sys, const ObserverSpec& obs, const MlpConfig& cfg,
                    std::span<const double> params, const CollocationSet& colloc,
                    const PhaseTarget& phase);

/// Reusable residual evaluator for the training loop: precomputes phi(x_i)
/// and b(h(x_i)) once per collocation set and allocates nothing per call.
class PinnResidual {
public:
    PinnResidual(const DiscreteSystem& sys, const ObserverSpec& obs, const MlpConfig& cfg,
                 const CollocationSet& colloc, const PhaseTarget& phase);
    int length() const { return static_cast<int>(point_count_) * n_ + n_ + n_ * n_; }
    void operator()(std::span<const double> params, Vec& out);

private:
    MlpConfig cfg_;
    int n_ = 0;
    std::size_t point_count_ = 0;
    Vec a_flat_;
    Vec pts_;
    Vec phi_pts_;
    Vec inj_;
    Matrix j0_;
    Vec origin_;
    MlpWorkspace ws_;
    Vec tx_, tphi_;
};

/// MLP-backed transform, carrying how it was produced.
class TrainedMap final : public TransformMap {
public:
    TrainedMap() = default;
    TrainedMap(MlpConfig cfg, Vec params);

    int input_dim() const override { return cfg.input_dim; }
    int output_dim() const override { return cfg.output_dim; }
    Vec eval(std::span<const double> x) const override;
    Matrix jacobian(std::span<const double> x) const override;

    MlpConfig cfg;
    Vec params;
    std::string source;             // benchmark or problem identifier
    std::vector<double> schedule;   // stage lower bounds used (empty: single domain)
    std::uint64_t seed = 0;
    double final_cost = 0.0;
};

struct StageReport {
    double lower_bound = 0.0;
    double final_cost = 0.0;
    double mean_square_residual = 0.0;
    long iterations = 0;
    long fevals = 0;
    LmStop reason = LmStop::StepTol;
};

struct TrainResult {
    TrainedMap map;
    std::vector<StageReport> stages;
};

/// One LM run over a fixed collocation set, starting from p0.
TrainResult train(const DiscreteSystem& sys, const ObserverSpec& obs, const MlpConfig& cfg,
                  const CollocationSet& colloc, const PhaseTarget& phase, Vec p0,
                  const LmOptions& lm_opts);

/// Nested-domain continuation: stage k trains on [lower_bounds[k], 0]^n with a
/// fresh 15x15 equispaced grid, warm-started from stage k-1 (stage 0 from
/// mlp_init_glorot(seed)). A stage that throws aborts the whole run with its
/// index in the message.
TrainResult greedy_train(const DiscreteSystem& sys, const ObserverSpec& obs,
                         const ContinuationSchedule& schedule, const MlpConfig& cfg,
                         const LmOptions& lm_opts, std::uint64_t seed);

struct VerifyReport {
    double max_residual = 0.0;  // max over grid of the equation defect
    double origin_norm = 0.0;   // |T(0)|_inf
};

VerifyReport verify_transform(const TransformMap& map, const DiscreteSystem& sys,
                              const ObserverSpec& obs, const std::vector<Vec>& grid);

/// Per-stage training grid width (15 points per axis).
inline constexpr int kCollocationPerDim = 15;

} // namespace linobs
