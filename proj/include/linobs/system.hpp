#pragma once

#include <span>
#include <string>
#include <vector>

#include "linobs/expr.hpp"
#include "linobs/linalg.hpp"

namespace linobs {

/// Discrete-time system x(t+1) = phi(x(t)), y(t) = h(x(t)) with a fixed point
/// at the origin (after shifting by `equilibrium`, which defaults to zero).
struct DiscreteSystem {
    int n = 0;
    std::vector<Expr> phi;  // n components, arity n
    Expr h;                 // arity n
    Vec equilibrium;        // size n

    /// Validates arities and the fixed-point conditions phi(0)=0, h(0)=0
    /// (to 1e-12); throws std::invalid_argument on violation.
    static DiscreteSystem create(std::vector<Expr> phi, Expr h, Vec equilibrium = {});
};

/// Target filter z(t+1) = a z(t) + b(y(t)). Stability of `a` and b(0)=0 are
/// checked by `observer_issues`, not at construction.
struct ObserverSpec {
    Matrix a;             // n x n
    std::vector<Expr> b;  // n components, arity 1 (input y)
};

/// First-order data at the origin.
struct LinearizationData {
    Matrix f;  // n x n, d(phi)/dx
    Matrix h;  // 1 x n, dh/dx
    Matrix b;  // n x 1, db/dy
};

/// One step of the dynamics.
Vec step(const DiscreteSystem& sys, std::span<const double> x);

/// Central finite differences (step 1e-6) with a half-step cross-check; a
/// discrepancy above 1e-6 throws, flagging a non-smooth map at the origin.
LinearizationData linearize(const DiscreteSystem& sys, const ObserverSpec& obs);

struct ObservabilityReport {
    bool observable = false;
    int rank = 0;
    Matrix o;  // stacked rows h, h f, ..., h f^(n-1)
};

ObservabilityReport check_observability(const LinearizationData& lin);

enum class ResonanceStatus { Pass, Fail, Warning };

struct ResonanceReport {
    ResonanceStatus status = ResonanceStatus::Pass;
    std::string detail;
    std::vector<int> multi_index;  // set on Fail
    int lambda_index = -1;         // set on Fail
};

/// Checks the eigenvalues k of f (plant) against the eigenvalues lambda of a
/// (filter): no product prod k_i^{m_i} with |m| >= 1 up to the finite bound
/// M_max may equal any lambda_j to within 1e-9. Requires all |k_i| < 1;
/// otherwise the bound is undefined and the check reports Warning.
ResonanceReport check_resonance(const LinearizationData& lin, const ObserverSpec& obs);

/// Human-readable problems with an observer spec: unstable a, or b(0) != 0.
/// Empty when the spec is usable.
std::vector<std::string> observer_issues(const ObserverSpec& obs);

} // namespace linobs
