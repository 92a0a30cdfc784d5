#include "linobs/lm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace linobs {

void LmOptions::validate() const {
    if (max_fevals < 2 || max_iters < 1) throw std::invalid_argument("LmOptions: budgets must be positive");
    if (!(fd_step > 0.0) || !(step_tol > 0.0) || !(cost_tol > 0.0))
        throw std::invalid_argument("LmOptions: tolerances must be positive");
    if (rel_cost_tol < 0.0 || rel_cost_tol >= 1.0)
        throw std::invalid_argument("LmOptions: rel_cost_tol must be in [0, 1)");
    if (!(lambda0 > 0.0) || !(lambda_up > 1.0) || !(lambda_down > 1.0) || !(lambda_max > lambda0))
        throw std::invalid_argument("LmOptions: damping controls out of range");
}

const char* to_string(LmStop s) {
    switch (s) {
        case LmStop::StepTol:
            return "step-tol";
        case LmStop::CostTol:
            return "cost-tol";
        case LmStop::RelCostTol:
            return "rel-cost-tol";
        case LmStop::MaxIter:
            return "max-iter";
        case LmStop::MaxFeval:
            return "max-feval";
        case LmStop::Singular:
            return "singular";
    }
    return "unknown";
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void eval_column(const ResidualFn& fn, Vec& x, int j, double step,
                 std::span<const double> base, Vec& scratch, Vec& col) {
    const double saved = x[j];
    x[j] = saved + step;
    try {
        fn(x, scratch);
    } catch (const std::exception& e) {
        x[j] = saved;
        throw std::runtime_error("residual evaluation failed while perturbing parameter " +
                                 std::to_string(j) + ": " + e.what());
    }
    x[j] = saved;
    if (scratch.size() != base.size())
        throw std::runtime_error("residual length changed during Jacobian evaluation");
    col.resize(base.size());
    const double inv = 1.0 / step;
    for (std::size_t i = 0; i < base.size(); ++i) col[i] = (scratch[i] - base[i]) * inv;
}

} // namespace

Matrix fd_jacobian(const ResidualFn& fn, std::span<const double> x, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("fd_jacobian: step must be positive");
    Vec base;
    fn(x, base);
    const int m = static_cast<int>(base.size());
    const int p = static_cast<int>(x.size());
    Matrix jac(m, p);
    Vec xq(x.begin(), x.end()), scratch, col;
    for (int j = 0; j < p; ++j) {
        eval_column(fn, xq, j, step, base, scratch, col);
        for (int i = 0; i < m; ++i) jac(i, j) = col[i];
    }
    return jac;
}

LmResult minimize(const ResidualFn& fn, Vec x0, const LmOptions& opts) {
    opts.validate();
    const int p = static_cast<int>(x0.size());
    if (p < 1) throw std::invalid_argument("minimize: empty parameter vector");

    Vec r;
    fn(x0, r);
    long fevals = 1;
    const std::size_t m = r.size();
    if (m == 0) throw std::invalid_argument("minimize: empty residual");
    double cost = dot(r, r);
    if (cost < opts.cost_tol) return {std::move(x0), cost, 0, fevals, LmStop::CostTol};

    double lambda = opts.lambda0;
    long iter = 0;
    std::vector<Vec> cols(p);
    Vec xq(p), scratch, neg_g(p), xt(p), rt;
    Matrix jtj(p, p), aug(p, p);

    while (true) {
        if (iter >= opts.max_iters) return {std::move(x0), cost, iter, fevals, LmStop::MaxIter};
        if (fevals + p > opts.max_fevals)
            return {std::move(x0), cost, iter, fevals, LmStop::MaxFeval};
        ++iter;

        xq = x0;
        for (int j = 0; j < p; ++j) eval_column(fn, xq, j, opts.fd_step, r, scratch, cols[j]);
        fevals += p;
        for (int a = 0; a < p; ++a)
            for (int b = a; b < p; ++b) {
                const double v = dot(cols[a], cols[b]);
                jtj(a, b) = v;
                jtj(b, a) = v;
            }
        for (int a = 0; a < p; ++a) neg_g[a] = -dot(cols[a], r);

        // Marquardt scale per direction; a dead parameter (zero Jacobian
        // column) gets a floor so damping still regularizes it, freezing the
        // direction instead of making the normal equations singular.
        double max_diag = 0.0;
        for (int d = 0; d < p; ++d) max_diag = std::max(max_diag, jtj(d, d));
        const double scale_floor = max_diag > 0.0 ? 1e-12 * max_diag : 1.0;

        while (true) {
            aug = jtj;
            for (int d = 0; d < p; ++d) aug(d, d) += lambda * std::max(jtj(d, d), scale_floor);
            Vec delta;
            try {
                delta = lu_solve(aug, neg_g);
            } catch (const SingularMatrixError&) {
                lambda *= opts.lambda_up;
                if (lambda > opts.lambda_max)
                    return {std::move(x0), cost, iter, fevals, LmStop::Singular};
                continue;
            }
            if (inf_norm(delta) < opts.step_tol)
                return {std::move(x0), cost, iter, fevals, LmStop::StepTol};
            if (fevals + 1 > opts.max_fevals)
                return {std::move(x0), cost, iter, fevals, LmStop::MaxFeval};
            for (int d = 0; d < p; ++d) xt[d] = x0[d] + delta[d];
            fn(xt, rt);
            ++fevals;
            const double ct = dot(rt, rt);
            if (ct < cost) {
                const double gain = cost - ct;
                x0 = xt;
                r = rt;
                cost = ct;
                lambda = std::max(lambda / opts.lambda_down, 1e-15);
                if (cost < opts.cost_tol)
                    return {std::move(x0), cost, iter, fevals, LmStop::CostTol};
                if (opts.rel_cost_tol > 0.0 && gain <= opts.rel_cost_tol * (cost + gain))
                    return {std::move(x0), cost, iter, fevals, LmStop::RelCostTol};
                break;
            }
            lambda *= opts.lambda_up;
            if (lambda > opts.lambda_max)
                return {std::move(x0), cost, iter, fevals, LmStop::StepTol};
        }
    }
}

} // namespace linobs
