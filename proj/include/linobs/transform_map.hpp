#pragma once

#include <span>
#include <vector>

#include "linobs/expr.hpp"
#include "linobs/linalg.hpp"

namespace linobs {

/// An evaluable coordinate change with a Jacobian. Implementations that know
/// their derivative in closed form override jacobian(); the base class falls
/// back to central finite differences with step 1e-6.
class TransformMap {
public:
    virtual ~TransformMap() = default;
    virtual int input_dim() const = 0;
    virtual int output_dim() const = 0;
    virtual Vec eval(std::span<const double> x) const = 0;
    virtual Matrix jacobian(std::span<const double> x) const;
};

/// Transform defined by one expression per output component; inputs bind
/// positionally to x1..xn.
class ExprTransform final : public TransformMap {
public:
    explicit ExprTransform(std::vector<Expr> components);
    int input_dim() const override { return arity_; }
    int output_dim() const override { return static_cast<int>(components_.size()); }
    Vec eval(std::span<const double> x) const override;

private:
    std::vector<Expr> components_;
    int arity_;
};

} // namespace linobs
