#include "linobs/observer.hpp"

#include <cmath>
#include <sstream>

namespace linobs {

NewtonFailure::NewtonFailure(const std::string& what, int iterations, double residual)
    : std::runtime_error(what), iterations_(iterations), residual_(residual) {}

namespace {

Vec sub(std::span<const double> a, std::span<const double> b) {
    Vec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

} // namespace

Vec newton_invert(const TransformMap& map, std::span<const double> z,
                  std::span<const double> x0, const NewtonOptions& opts, int* iterations) {
    const int n = map.input_dim();
    if (map.output_dim() != n)
        throw std::invalid_argument("newton_invert: map must be square");
    if (static_cast<int>(z.size()) != n || static_cast<int>(x0.size()) != n)
        throw std::invalid_argument("newton_invert: dimension mismatch");

    Vec x(x0.begin(), x0.end());
    Vec r = sub(map.eval(x), z);
    double last_step = 0.0;
    for (int it = 0; it <= opts.max_iters; ++it) {
        if (inf_norm(r) <= opts.abs_tol && last_step <= opts.rel_tol * (1.0 + inf_norm(x))) {
            if (iterations) *iterations = it;
            return x;
        }
        if (it == opts.max_iters) break;

        Matrix jac;
        try {
            jac = map.jacobian(x);
        } catch (const EvalDomainError& e) {
            throw NewtonFailure(std::string("newton_invert: Jacobian left the map domain: ") +
                                    e.what(),
                                it, inf_norm(r));
        }
        Vec neg_r(n);
        for (int i = 0; i < n; ++i) neg_r[i] = -r[i];
        Vec delta;
        try {
            delta = lu_solve(jac, neg_r);
        } catch (const SingularMatrixError& e) {
            throw NewtonFailure(std::string("newton_invert: singular Jacobian: ") + e.what(), it,
                                inf_norm(r));
        }

        // Back off when the proposed point leaves the map's domain.
        Vec xt(n);
        bool placed = false;
        for (int halvings = 0; halvings <= 10; ++halvings) {
            for (int i = 0; i < n; ++i) xt[i] = x[i] + delta[i];
            try {
                Vec rt = sub(map.eval(xt), z);
                x = xt;
                r = std::move(rt);
                last_step = inf_norm(delta);
                placed = true;
                break;
            } catch (const EvalDomainError&) {
                for (double& d : delta) d *= 0.5;
            }
        }
        if (!placed)
            throw NewtonFailure("newton_invert: step left the map domain after 10 halvings", it,
                                inf_norm(r));
    }
    throw NewtonFailure("newton_invert: no convergence within iteration cap", opts.max_iters,
                        inf_norm(r));
}

Trajectory simulate(const DiscreteSystem& sys, const ObserverSpec& obs, const TransformMap& tmap,
                    std::span<const double> x0, std::span<const double> z0, int horizon,
                    const NewtonOptions& opts, std::span<const double> newton_x0) {
    const int n = sys.n;
    if (static_cast<int>(x0.size()) != n || static_cast<int>(z0.size()) != n)
        throw std::invalid_argument("simulate: dimension mismatch");
    if (horizon < 0) throw std::invalid_argument("simulate: negative horizon");

    Trajectory traj;
    traj.n = n;
    Vec x(x0.begin(), x0.end());
    Vec z(z0.begin(), z0.end());
    Vec guess = newton_x0.empty() ? Vec(n, 0.0) : Vec(newton_x0.begin(), newton_x0.end());

    for (int t = 0; t < horizon; ++t) {
        const double y = eval(sys.h, x);
        int iters = 0;
        Vec xhat;
        try {
            xhat = newton_invert(tmap, z, guess, opts, &iters);
        } catch (const NewtonFailure& e) {
            std::ostringstream os;
            os << "simulate: inversion failed at step " << t << ": " << e.what();
            throw NewtonFailure(os.str(), e.iterations(), e.residual());
        }
        guess = xhat;

        traj.x.push_back(x);
        traj.z.push_back(z);
        traj.xhat.push_back(xhat);
        traj.y.push_back(y);
        traj.ez.push_back(sub(tmap.eval(x), z));
        traj.ex.push_back(sub(x, xhat));
        traj.newton_iters.push_back(iters);

        if (t + 1 == horizon) break;
        x = step(sys, x);
        Vec zn = obs.a * z;
        const Vec yv{y};
        for (int i = 0; i < n; ++i) zn[i] += eval(obs.b[i], yv);
        z = std::move(zn);
    }
    return traj;
}

double error_dynamics_check(const DiscreteSystem& sys, const ObserverSpec& obs,
                            const TransformMap& tmap, std::span<const double> x0,
                            std::span<const double> z0, int horizon) {
    const int n = sys.n;
    Vec x(x0.begin(), x0.end());
    Vec z(z0.begin(), z0.end());
    Vec ez = sub(tmap.eval(x), z);
    double worst = 0.0;
    for (int t = 0; t < horizon; ++t) {
        const double y = eval(sys.h, x);
        const Vec yv{y};
        x = step(sys, x);
        Vec zn = obs.a * z;
        for (int i = 0; i < n; ++i) zn[i] += eval(obs.b[i], yv);
        z = std::move(zn);
        const Vec ez_next = sub(tmap.eval(x), z);
        const Vec a_ez = obs.a * ez;
        for (int i = 0; i < n; ++i)
            worst = std::max(worst, std::abs(ez_next[i] - a_ez[i]));
        ez = ez_next;
    }
    return worst;
}

} // namespace linobs
