#include "linobs/transform_map.hpp"

#include <stdexcept>

namespace linobs {

Matrix TransformMap::jacobian(std::span<const double> x) const {
    constexpr double kStep = 1e-6;
    const int in = input_dim();
    const int out = output_dim();
    if (static_cast<int>(x.size()) != in)
        throw std::invalid_argument("TransformMap::jacobian: input length mismatch");
    Matrix jac(out, in);
    Vec xq(x.begin(), x.end());
    for (int j = 0; j < in; ++j) {
        const double saved = xq[j];
        xq[j] = saved + kStep;
        const Vec fp = eval(xq);
        xq[j] = saved - kStep;
        const Vec fm = eval(xq);
        xq[j] = saved;
        for (int i = 0; i < out; ++i) jac(i, j) = (fp[i] - fm[i]) / (2.0 * kStep);
    }
    return jac;
}

ExprTransform::ExprTransform(std::vector<Expr> components) : components_(std::move(components)) {
    if (components_.empty())
        throw std::invalid_argument("ExprTransform: need at least one component");
    arity_ = components_[0].arity();
    for (const Expr& c : components_)
        if (c.empty() || c.arity() != arity_)
            throw std::invalid_argument("ExprTransform: component arity mismatch");
}

Vec ExprTransform::eval(std::span<const double> x) const {
    Vec out(components_.size());
    for (std::size_t i = 0; i < components_.size(); ++i) out[i] = linobs::eval(components_[i], x);
    return out;
}

} // namespace linobs
