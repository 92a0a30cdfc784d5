#pragma once

#include <stdexcept>
#include <vector>

#include "linobs/system.hpp"
#include "linobs/taylor.hpp"
#include "linobs/transform_map.hpp"

namespace linobs {

/// Polynomial transform: one truncated series per output component, all about
/// the origin with zero constant term.
struct PolyMap {
    std::vector<TruncatedSeries> components;
    int arity() const { return components.empty() ? 0 : components[0].arity(); }
    int order() const { return components.empty() ? 0 : components[0].order(); }
};

/// Thrown when the homogeneous degree-N solve is singular, i.e. an eigenvalue
/// product of the plant matches an observer eigenvalue at that degree.
class SeriesResonanceError : public std::runtime_error {
public:
    explicit SeriesResonanceError(int degree);
    int degree() const { return degree_; }

private:
    int degree_;
};

/// Solve the transform equations degree by degree up to the given total
/// degree: degree 1 from the first-order matrix equation, each higher degree
/// from a dense linear system assembled by probing unit coefficient vectors.
PolyMap solve_series(const DiscreteSystem& sys, const ObserverSpec& obs, int order);

Vec eval_polymap(const PolyMap& map, std::span<const double> x);

/// TransformMap adapter with the exact polynomial Jacobian.
class PolyTransform final : public TransformMap {
public:
    explicit PolyTransform(PolyMap map);
    int input_dim() const override { return map_.arity(); }
    int output_dim() const override { return static_cast<int>(map_.components.size()); }
    Vec eval(std::span<const double> x) const override;
    Matrix jacobian(std::span<const double> x) const override;
    const PolyMap& poly() const { return map_; }

private:
    PolyMap map_;
    std::vector<std::vector<TruncatedSeries>> grads_;  // [component][variable]
};

} // namespace linobs
