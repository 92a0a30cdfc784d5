#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "linobs/system.hpp"
#include "linobs/transform_map.hpp"

namespace linobs {

struct NewtonOptions {
    double abs_tol = 1e-6;
    double rel_tol = 1e-6;
    int max_iters = 50;
};

class NewtonFailure : public std::runtime_error {
public:
    NewtonFailure(const std::string& what, int iterations, double residual);
    int iterations() const { return iterations_; }
    double residual() const { return residual_; }

private:
    int iterations_;
    double residual_;
};

/// Solve T(x) = z by damped Newton from x0. Convergence requires both
/// |T(x)-z|_inf <= abs_tol and the last step |dx|_inf <= rel_tol*(1+|x|_inf).
/// A step that leaves the map's domain is halved, up to ten times.
Vec newton_invert(const TransformMap& map, std::span<const double> z,
                  std::span<const double> x0, const NewtonOptions& opts = {},
                  int* iterations = nullptr);

/// Joint rollout of the plant, the filter z(t+1) = a z(t) + b(y(t)), and the
/// reconstruction xhat(t) = T^-1(z(t)). Holds exactly `horizon` time points.
struct Trajectory {
    int n = 0;
    std::vector<Vec> x, z, xhat;
    Vec y;
    std::vector<Vec> ez;  // T(x(t)) - z(t)
    std::vector<Vec> ex;  // x(t) - xhat(t)
    std::vector<int> newton_iters;
    std::size_t size() const { return x.size(); }
};

/// newton_x0 seeds the first inversion (later steps warm-start from the
/// previous estimate); when empty the origin is used.
Trajectory simulate(const DiscreteSystem& sys, const ObserverSpec& obs, const TransformMap& tmap,
                    std::span<const double> x0, std::span<const double> z0, int horizon,
                    const NewtonOptions& opts = {}, std::span<const double> newton_x0 = {});

/// Max over the trajectory of |e_z(t+1) - a e_z(t)|_inf with e_z = T(x) - z;
/// zero exactly when T solves the transform equations along the orbit.
double error_dynamics_check(const DiscreteSystem& sys, const ObserverSpec& obs,
                            const TransformMap& tmap, std::span<const double> x0,
                            std::span<const double> z0, int horizon);

} // namespace linobs
