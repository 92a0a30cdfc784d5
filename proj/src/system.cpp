#include "linobs/system.hpp"

#include <cmath>
#include <sstream>

namespace linobs {

namespace {

void check_arity(const Expr& e, int arity, const char* what) {
    if (e.empty()) throw std::invalid_argument(std::string(what) + ": empty expression");
    if (e.arity() != arity)
        throw std::invalid_argument(std::string(what) + ": arity mismatch");
}

} // namespace

DiscreteSystem DiscreteSystem::create(std::vector<Expr> phi, Expr h, Vec equilibrium) {
    const int n = static_cast<int>(phi.size());
    if (n < 1) throw std::invalid_argument("DiscreteSystem: need at least one state");
    for (const Expr& p : phi) check_arity(p, n, "DiscreteSystem phi");
    check_arity(h, n, "DiscreteSystem h");
    if (equilibrium.empty()) equilibrium.assign(n, 0.0);
    if (static_cast<int>(equilibrium.size()) != n)
        throw std::invalid_argument("DiscreteSystem: equilibrium length mismatch");

    const Vec origin(n, 0.0);
    for (int i = 0; i < n; ++i) {
        const double v = eval(phi[i], origin);
        if (std::abs(v) > 1e-12)
            throw std::invalid_argument("DiscreteSystem: phi" + std::to_string(i + 1) +
                                        "(0) = " + std::to_string(v) + ", not a fixed point");
    }
    const double hv = eval(h, origin);
    if (std::abs(hv) > 1e-12)
        throw std::invalid_argument("DiscreteSystem: h(0) nonzero");

    DiscreteSystem sys;
    sys.n = n;
    sys.phi = std::move(phi);
    sys.h = std::move(h);
    sys.equilibrium = std::move(equilibrium);
    return sys;
}

Vec step(const DiscreteSystem& sys, std::span<const double> x) {
    Vec out(sys.n);
    for (int i = 0; i < sys.n; ++i) out[i] = eval(sys.phi[i], x);
    return out;
}

namespace {

double central_diff(const Expr& e, Vec& x, int j, double h) {
    const double saved = x[j];
    x[j] = saved + h;
    const double fp = eval(e, x);
    x[j] = saved - h;
    const double fm = eval(e, x);
    x[j] = saved;
    return (fp - fm) / (2.0 * h);
}

} // namespace

LinearizationData linearize(const DiscreteSystem& sys, const ObserverSpec& obs) {
    const int n = sys.n;
    if (obs.a.rows() != n || obs.a.cols() != n)
        throw std::invalid_argument("linearize: observer matrix shape mismatch");
    if (static_cast<int>(obs.b.size()) != n)
        throw std::invalid_argument("linearize: injection component count mismatch");

    constexpr double kStep = 1e-6;
    constexpr double kCheckTol = 1e-6;
    LinearizationData lin;
    lin.f = Matrix(n, n);
    lin.h = Matrix(1, n);
    lin.b = Matrix(n, 1);

    Vec x(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double full = central_diff(sys.phi[i], x, j, kStep);
            const double half = central_diff(sys.phi[i], x, j, kStep * 0.5);
            if (std::abs(full - half) > kCheckTol)
                throw std::runtime_error("linearize: derivative of phi" + std::to_string(i + 1) +
                                         " wrt x" + std::to_string(j + 1) +
                                         " unstable under step refinement");
            lin.f(i, j) = full;
        }
    for (int j = 0; j < n; ++j) {
        const double full = central_diff(sys.h, x, j, kStep);
        const double half = central_diff(sys.h, x, j, kStep * 0.5);
        if (std::abs(full - half) > kCheckTol)
            throw std::runtime_error("linearize: derivative of h wrt x" + std::to_string(j + 1) +
                                     " unstable under step refinement");
        lin.h(0, j) = full;
    }
    Vec y(1, 0.0);
    for (int i = 0; i < n; ++i) {
        const double full = central_diff(obs.b[i], y, 0, kStep);
        const double half = central_diff(obs.b[i], y, 0, kStep * 0.5);
        if (std::abs(full - half) > kCheckTol)
            throw std::runtime_error("linearize: derivative of b" + std::to_string(i + 1) +
                                     " unstable under step refinement");
        lin.b(i, 0) = full;
    }
    return lin;
}

ObservabilityReport check_observability(const LinearizationData& lin) {
    const int n = lin.f.rows();
    ObservabilityReport rep;
    rep.o = Matrix(n, n);
    Matrix row = lin.h;
    for (int k = 0; k < n; ++k) {
        for (int j = 0; j < n; ++j) rep.o(k, j) = row(0, j);
        row = row * lin.f;
    }
    rep.rank = rank(rep.o);
    rep.observable = rep.rank == n;
    return rep;
}

namespace {

using cd = std::complex<double>;

// Depth-first walk over multi-indices with total degree in [1, max_degree],
// tracking the running eigenvalue product.
bool walk_products(const std::vector<cd>& k, const std::vector<cd>& lambda, int var,
                   int remaining, cd product, bool nonempty, std::vector<int>& m,
                   ResonanceReport& rep) {
    if (var == static_cast<int>(k.size())) {
        if (!nonempty) return false;
        for (std::size_t j = 0; j < lambda.size(); ++j) {
            if (std::abs(product - lambda[j]) <= 1e-9) {
                rep.status = ResonanceStatus::Fail;
                rep.multi_index = m;
                rep.lambda_index = static_cast<int>(j);
                std::ostringstream os;
                os << "resonance: product for m=(";
                for (std::size_t i = 0; i < m.size(); ++i)
                    os << (i ? "," : "") << m[i];
                os << ") matches lambda_" << j + 1;
                rep.detail = os.str();
                return true;
            }
        }
        return false;
    }
    cd p = product;
    for (int e = 0; e <= remaining; ++e) {
        m.push_back(e);
        if (walk_products(k, lambda, var + 1, remaining - e, p, nonempty || e > 0, m, rep))
            return true;
        m.pop_back();
        p *= k[var];
    }
    return false;
}

} // namespace

ResonanceReport check_resonance(const LinearizationData& lin, const ObserverSpec& obs) {
    const auto k = eigenvalues(lin.f);
    const auto lambda = eigenvalues(obs.a);
    ResonanceReport rep;

    double max_k = 0.0;
    for (const cd& v : k) max_k = std::max(max_k, std::abs(v));
    if (max_k >= 1.0) {
        rep.status = ResonanceStatus::Warning;
        rep.detail = "plant spectrum outside the Poincare domain; finite resonance bound undefined";
        return rep;
    }

    double min_lambda = 0.0;
    for (const cd& v : lambda) {
        const double a = std::abs(v);
        if (a > 1e-9 && (min_lambda == 0.0 || a < min_lambda)) min_lambda = a;
    }
    int max_degree = 1;
    if (min_lambda > 0.0 && max_k > 0.0 && min_lambda < 1.0)
        max_degree = static_cast<int>(std::ceil(std::log(min_lambda) / std::log(max_k))) + 1;
    max_degree = std::max(max_degree, 1);

    std::vector<int> m;
    if (walk_products(k, lambda, 0, max_degree, cd(1.0), false, m, rep)) return rep;

    rep.status = ResonanceStatus::Pass;
    std::ostringstream os;
    os << "no resonance up to total degree " << max_degree;
    rep.detail = os.str();
    return rep;
}

std::vector<std::string> observer_issues(const ObserverSpec& obs) {
    std::vector<std::string> issues;
    const int n = obs.a.rows();
    if (obs.a.cols() != n) {
        issues.push_back("observer matrix is not square");
        return issues;
    }
    for (const auto& ev : eigenvalues(obs.a))
        if (std::abs(ev) >= 1.0) {
            std::ostringstream os;
            os << "observer matrix has eigenvalue of magnitude " << std::abs(ev)
               << " (must be < 1)";
            issues.push_back(os.str());
            break;
        }
    if (static_cast<int>(obs.b.size()) != n)
        issues.push_back("injection map has wrong component count");
    const Vec zero{0.0};
    for (std::size_t i = 0; i < obs.b.size(); ++i) {
        if (obs.b[i].empty()) {
            issues.push_back("injection component " + std::to_string(i + 1) + " is empty");
            continue;
        }
        const double v = eval(obs.b[i], zero);
        if (std::abs(v) > 1e-12)
            issues.push_back("injection component " + std::to_string(i + 1) + " nonzero at y=0");
    }
    return issues;
}

} // namespace linobs
