#pragma once

#include <functional>
#include <span>

#include "linobs/linalg.hpp"

namespace linobs {

struct LmOptions {
    long max_fevals = 500000;
    long max_iters = 50000;
    double fd_step = 1e-5;
    double step_tol = 1e-12;
    double cost_tol = 1e-14;
    double rel_cost_tol = 0.0;  // stop when an accepted step improves cost by less than this fraction; 0 disables
    double lambda0 = 1e-3;
    double lambda_up = 10.0;
    double lambda_down = 10.0;
    double lambda_max = 1e12;

    void validate() const;
};

enum class LmStop { StepTol, CostTol, RelCostTol, MaxIter, MaxFeval, Singular };
const char* to_string(LmStop s);

struct LmResult {
    Vec x;
    double cost = 0.0;  // sum of squared residuals at x
    long iterations = 0;
    long fevals = 0;
    LmStop reason = LmStop::StepTol;
};

/// Residual callback: writes the residual vector for parameters x into out
/// (resizing it as needed). Must be deterministic.
using ResidualFn = std::function<void(std::span<const double>, Vec&)>;

/// Forward-difference Jacobian: column j is (r(x + step e_j) - r(x)) / step.
/// A callback failure is rethrown with the offending column noted.
Matrix fd_jacobian(const ResidualFn& fn, std::span<const double> x, double step);

/// Damped Gauss-Newton minimization of |r(x)|^2 with Marquardt scaling:
/// (J'J + lambda diag(J'J)) delta = -J'r. The damping factor falls on each
/// accepted step and rises on each rejection; the Jacobian is rebuilt only at
/// accepted points. The accepted cost sequence never increases.
LmResult minimize(const ResidualFn& fn, Vec x0, const LmOptions& opts);

} // namespace linobs
