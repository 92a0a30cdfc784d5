#include "linobs/pinn.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace linobs {

CollocationSet make_collocation(const Vec& lo, const Vec& hi, int per_dim) {
    if (lo.size() != hi.size() || lo.empty())
        throw std::invalid_argument("make_collocation: bound shape mismatch");
    GridSpec spec;
    spec.kind = GridKind::Equispaced;
    for (std::size_t d = 0; d < lo.size(); ++d) {
        spec.intervals.push_back({lo[d], hi[d]});
        spec.counts.push_back(per_dim);
    }
    CollocationSet out;
    out.points = make_grid(spec);
    out.counts = spec.counts;
    return out;
}

PhaseTarget make_phase_target(const LinearizationData& lin, const Matrix& a) {
    const Matrix c = lin.b * lin.h;
    PhaseTarget phase{sylvester_solve(lin.f, a, c)};
    const Matrix defect = phase.j0 * lin.f - a * phase.j0 - c;
    if (defect.inf_norm() > 1e-10)
        throw std::runtime_error("make_phase_target: first-order equation residual " +
                                 std::to_string(defect.inf_norm()));
    return phase;
}

void ContinuationSchedule::validate() const {
    if (lower_bounds.empty())
        throw std::invalid_argument("ContinuationSchedule: empty schedule");
    double prev = 0.0;
    for (double lb : lower_bounds) {
        if (!(lb < prev))
            throw std::invalid_argument(
                "ContinuationSchedule: lower bounds must be negative and strictly decreasing");
        prev = lb;
    }
}

Vec residual_for_map(const DiscreteSystem& sys, const ObserverSpec& obs, const TransformMap& map,
                     const CollocationSet& colloc, const PhaseTarget& phase) {
    const int n = sys.n;
    const std::size_t m = colloc.points.size();
    Vec out(m * n + n + n * n);
    for (std::size_t i = 0; i < m; ++i) {
        const Vec& x = colloc.points[i];
        Vec phix;
        try {
            phix = step(sys, x);
        } catch (const EvalDomainError& e) {
            std::ostringstream os;
            os << "residual: dynamics undefined at collocation point " << i << ": " << e.what();
            throw std::runtime_error(os.str());
        }
        const Vec tx = map.eval(x);
        const Vec tphi = map.eval(phix);
        const double y = eval(sys.h, x);
        const Vec yv{y};
        for (int j = 0; j < n; ++j) {
            double s = tphi[j] - eval(obs.b[j], yv);
            for (int k = 0; k < n; ++k) s -= obs.a(j, k) * tx[k];
            out[i * n + j] = s;
        }
    }
    const Vec origin(n, 0.0);
    const Vec t0 = map.eval(origin);
    for (int j = 0; j < n; ++j) out[m * n + j] = t0[j];
    const Matrix j0 = map.jacobian(origin);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            out[m * n + n + r * n + c] = j0(r, c) - phase.j0(r, c);
    return out;
}

PinnResidual::PinnResidual(const DiscreteSystem& sys, const ObserverSpec& obs,
                           const MlpConfig& cfg, const CollocationSet& colloc,
                           const PhaseTarget& phase)
    : cfg_(cfg), n_(sys.n), point_count_(colloc.points.size()), j0_(phase.j0) {
    cfg_.validate();
    if (cfg_.input_dim != n_ || cfg_.output_dim != n_)
        throw std::invalid_argument("PinnResidual: network width must match state dimension");
    if (point_count_ == 0) throw std::invalid_argument("PinnResidual: empty collocation set");

    a_flat_.resize(static_cast<std::size_t>(n_) * n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) a_flat_[i * n_ + j] = obs.a(i, j);

    pts_.resize(point_count_ * n_);
    phi_pts_.resize(point_count_ * n_);
    inj_.resize(point_count_ * n_);
    for (std::size_t i = 0; i < point_count_; ++i) {
        const Vec& x = colloc.points[i];
        if (static_cast<int>(x.size()) != n_)
            throw std::invalid_argument("PinnResidual: point dimension mismatch");
        Vec phix;
        double y = 0.0;
        try {
            phix = step(sys, x);
            y = eval(sys.h, x);
        } catch (const EvalDomainError& e) {
            std::ostringstream os;
            os << "residual: dynamics undefined at collocation point " << i << ": " << e.what();
            throw std::runtime_error(os.str());
        }
        const Vec yv{y};
        for (int j = 0; j < n_; ++j) {
            pts_[i * n_ + j] = x[j];
            phi_pts_[i * n_ + j] = phix[j];
            inj_[i * n_ + j] = eval(obs.b[j], yv);
        }
    }
    origin_.assign(n_, 0.0);
    tx_.resize(n_);
    tphi_.resize(n_);
}

void PinnResidual::operator()(std::span<const double> params, Vec& out) {
    out.resize(length());
    const std::span<const double> p = params;
    for (std::size_t i = 0; i < point_count_; ++i) {
        mlp_forward(cfg_, p, std::span<const double>(pts_.data() + i * n_, n_), ws_, tx_);
        mlp_forward(cfg_, p, std::span<const double>(phi_pts_.data() + i * n_, n_), ws_, tphi_);
        for (int j = 0; j < n_; ++j) {
            double s = tphi_[j] - inj_[i * n_ + j];
            const double* arow = a_flat_.data() + static_cast<std::size_t>(j) * n_;
            for (int k = 0; k < n_; ++k) s -= arow[k] * tx_[k];
            out[i * n_ + j] = s;
        }
    }
    mlp_forward(cfg_, p, origin_, ws_, tx_);
    for (int j = 0; j < n_; ++j) out[point_count_ * n_ + j] = tx_[j];
    const Matrix j0hat = mlp_input_jacobian(cfg_, p, origin_);
    const std::size_t base = point_count_ * n_ + n_;
    for (int r = 0; r < n_; ++r)
        for (int c = 0; c < n_; ++c)
            out[base + static_cast<std::size_t>(r) * n_ + c] = j0hat(r, c) - j0_(r, c);
}

Vec residual_vector(const DiscreteSystem& sys, const ObserverSpec& obs, const MlpConfig& cfg,
                    std::span<const double> params, const CollocationSet& colloc,
                    const PhaseTarget& phase) {
    PinnResidual res(sys, obs, cfg, colloc, phase);
    Vec out;
    res(params, out);
    return out;
}

TrainedMap::TrainedMap(MlpConfig c, Vec p) : cfg(c), params(std::move(p)) {
    cfg.validate();
    if (static_cast<int>(params.size()) != cfg.param_count())
        throw std::invalid_argument("TrainedMap: parameter vector length mismatch");
}

Vec TrainedMap::eval(std::span<const double> x) const {
    return mlp_forward(cfg, params, x);
}

Matrix TrainedMap::jacobian(std::span<const double> x) const {
    return mlp_input_jacobian(cfg, params, x);
}

TrainResult train(const DiscreteSystem& sys, const ObserverSpec& obs, const MlpConfig& cfg,
                  const CollocationSet& colloc, const PhaseTarget& phase, Vec p0,
                  const LmOptions& lm_opts) {
    PinnResidual res(sys, obs, cfg, colloc, phase);
    const auto fn = [&res](std::span<const double> p, Vec& out) { res(p, out); };
    LmResult lm = minimize(fn, std::move(p0), lm_opts);

    TrainResult out;
    out.map = TrainedMap(cfg, std::move(lm.x));
    out.map.final_cost = lm.cost;
    StageReport stage;
    stage.lower_bound = colloc.points.empty() ? 0.0 : colloc.points.front()[0];
    stage.final_cost = lm.cost;
    stage.mean_square_residual = lm.cost / res.length();
    stage.iterations = lm.iterations;
    stage.fevals = lm.fevals;
    stage.reason = lm.reason;
    out.stages.push_back(stage);
    return out;
}

TrainResult greedy_train(const DiscreteSystem& sys, const ObserverSpec& obs,
                         const ContinuationSchedule& schedule, const MlpConfig& cfg,
                         const LmOptions& lm_opts, std::uint64_t seed) {
    schedule.validate();
    const LinearizationData lin = linearize(sys, obs);
    const PhaseTarget phase = make_phase_target(lin, obs.a);

    TrainResult out;
    Vec params = mlp_init_glorot(cfg, seed);
    for (std::size_t k = 0; k < schedule.lower_bounds.size(); ++k) {
        const double lb = schedule.lower_bounds[k];
        const Vec lo(sys.n, lb);
        const Vec hi(sys.n, 0.0);
        try {
            const CollocationSet colloc = make_collocation(lo, hi, kCollocationPerDim);
            PinnResidual res(sys, obs, cfg, colloc, phase);
            const auto fn = [&res](std::span<const double> p, Vec& o) { res(p, o); };
            LmResult lm = minimize(fn, std::move(params), lm_opts);
            params = std::move(lm.x);
            StageReport stage;
            stage.lower_bound = lb;
            stage.final_cost = lm.cost;
            stage.mean_square_residual = lm.cost / res.length();
            stage.iterations = lm.iterations;
            stage.fevals = lm.fevals;
            stage.reason = lm.reason;
            out.stages.push_back(stage);
        } catch (const std::exception& e) {
            std::ostringstream os;
            os << "greedy_train: stage " << k + 1 << " (lower bound " << lb << ") failed: "
               << e.what();
            throw std::runtime_error(os.str());
        }
    }
    out.map = TrainedMap(cfg, std::move(params));
    out.map.schedule = schedule.lower_bounds;
    out.map.seed = seed;
    out.map.final_cost = out.stages.back().final_cost;
    return out;
}

VerifyReport verify_transform(const TransformMap& map, const DiscreteSystem& sys,
                              const ObserverSpec& obs, const std::vector<Vec>& grid) {
    VerifyReport rep;
    const int n = sys.n;
    for (const Vec& x : grid) {
        const Vec phix = step(sys, x);
        const Vec tx = map.eval(x);
        const Vec tphi = map.eval(phix);
        const double y = eval(sys.h, x);
        const Vec yv{y};
        for (int j = 0; j < n; ++j) {
            double s = tphi[j] - eval(obs.b[j], yv);
            for (int k = 0; k < n; ++k) s -= obs.a(j, k) * tx[k];
            rep.max_residual = std::max(rep.max_residual, std::abs(s));
        }
    }
    const Vec origin(n, 0.0);
    rep.origin_norm = inf_norm(map.eval(origin));
    return rep;
}

} // namespace linobs
