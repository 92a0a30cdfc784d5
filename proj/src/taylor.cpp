#include "linobs/taylor.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>

namespace linobs {

namespace {

constexpr int kMaxExponent = 15;

std::uint64_t pack(std::span<const int> alpha) {
    std::uint64_t key = 0;
    for (std::size_t i = 0; i < alpha.size(); ++i)
        key |= static_cast<std::uint64_t>(alpha[i]) << (4 * i);
    return key;
}

void enumerate(int remaining_vars, int budget, std::vector<int>& prefix,
               std::vector<std::vector<int>>& out) {
    if (remaining_vars == 1) {
        prefix.push_back(budget);
        out.push_back(prefix);
        prefix.pop_back();
        return;
    }
    for (int e = budget; e >= 0; --e) {
        prefix.push_back(e);
        enumerate(remaining_vars - 1, budget - e, prefix, out);
        prefix.pop_back();
    }
}

} // namespace

SeriesLayout::SeriesLayout(int arity, int order) : arity_(arity), order_(order) {
    if (arity < 1 || arity > 15) throw std::invalid_argument("SeriesLayout: arity must be in [1,15]");
    if (order < 0 || order > kMaxExponent)
        throw std::invalid_argument("SeriesLayout: order must be in [0,15]");
    for (int d = 0; d <= order; ++d) {
        std::vector<int> prefix;
        enumerate(arity, d, prefix, exps_);
    }
    degree_.reserve(exps_.size());
    for (std::size_t i = 0; i < exps_.size(); ++i) {
        int d = 0;
        for (int e : exps_[i]) d += e;
        degree_.push_back(d);
        lookup_.emplace(pack(exps_[i]), static_cast<int>(i));
    }
    const std::size_t n = exps_.size();
    if (n <= 512) {
        mul_table_.assign(n * n, -1);
        std::vector<int> sum(arity);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (degree_[i] + degree_[j] > order) continue;
                for (int v = 0; v < arity; ++v) sum[v] = exps_[i][v] + exps_[j][v];
                mul_table_[i * n + j] = index_of(sum);
            }
    } else {
        throw std::invalid_argument("SeriesLayout: layout too large");
    }
}

std::shared_ptr<const SeriesLayout> SeriesLayout::get(int arity, int order) {
    static std::mutex mu;
    static std::unordered_map<int, std::shared_ptr<const SeriesLayout>> cache;
    const int key = arity * 64 + order;
    std::scoped_lock lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto layout = std::shared_ptr<const SeriesLayout>(new SeriesLayout(arity, order));
    cache.emplace(key, layout);
    return layout;
}

int SeriesLayout::index_of(std::span<const int> alpha) const {
    if (static_cast<int>(alpha.size()) != arity_)
        throw std::invalid_argument("SeriesLayout::index_of: arity mismatch");
    int d = 0;
    for (int e : alpha) {
        if (e < 0 || e > kMaxExponent)
            throw std::invalid_argument("SeriesLayout::index_of: exponent out of range");
        d += e;
    }
    if (d > order_) return -1;
    return lookup_.at(pack(alpha));
}

TruncatedSeries::TruncatedSeries(int arity, int order)
    : layout_(SeriesLayout::get(arity, order)), coeffs_(layout_->size(), 0.0) {}

TruncatedSeries TruncatedSeries::constant(int arity, int order, double c) {
    TruncatedSeries s(arity, order);
    s.coeffs_[0] = c;
    return s;
}

TruncatedSeries TruncatedSeries::variable(int arity, int order, int var) {
    if (order < 1) throw std::invalid_argument("TruncatedSeries::variable: order must be >= 1");
    if (var < 0 || var >= arity)
        throw std::invalid_argument("TruncatedSeries::variable: index out of range");
    TruncatedSeries s(arity, order);
    std::vector<int> alpha(arity, 0);
    alpha[var] = 1;
    s.set_coeff(alpha, 1.0);
    return s;
}

double TruncatedSeries::coeff(std::span<const int> alpha) const {
    const int idx = layout_->index_of(alpha);
    return idx < 0 ? 0.0 : coeffs_[idx];
}

void TruncatedSeries::set_coeff(std::span<const int> alpha, double value) {
    const int idx = layout_->index_of(alpha);
    if (idx < 0) throw std::invalid_argument("TruncatedSeries::set_coeff: degree above order");
    coeffs_[idx] = value;
}

void TruncatedSeries::check_same(const TruncatedSeries& rhs) const {
    if (!layout_ || !rhs.layout_) throw std::invalid_argument("TruncatedSeries: empty operand");
    if (layout_->arity() != rhs.layout_->arity() || layout_->order() != rhs.layout_->order())
        throw std::invalid_argument("TruncatedSeries: layout mismatch");
}

TruncatedSeries TruncatedSeries::operator+(const TruncatedSeries& rhs) const {
    check_same(rhs);
    TruncatedSeries out = *this;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) out.coeffs_[i] += rhs.coeffs_[i];
    return out;
}

TruncatedSeries TruncatedSeries::operator-(const TruncatedSeries& rhs) const {
    check_same(rhs);
    TruncatedSeries out = *this;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) out.coeffs_[i] -= rhs.coeffs_[i];
    return out;
}

TruncatedSeries TruncatedSeries::operator*(const TruncatedSeries& rhs) const {
    check_same(rhs);
    TruncatedSeries out(arity(), order());
    const int n = layout_->size();
    for (int i = 0; i < n; ++i) {
        const double a = coeffs_[i];
        if (a == 0.0) continue;
        for (int j = 0; j < n; ++j) {
            const double b = rhs.coeffs_[j];
            if (b == 0.0) continue;
            const int k = layout_->product_index(i, j);
            if (k >= 0) out.coeffs_[k] += a * b;
        }
    }
    return out;
}

TruncatedSeries TruncatedSeries::operator-() const {
    TruncatedSeries out = *this;
    for (double& c : out.coeffs_) c = -c;
    return out;
}

TruncatedSeries TruncatedSeries::scaled(double s) const {
    TruncatedSeries out = *this;
    for (double& c : out.coeffs_) c *= s;
    return out;
}

TruncatedSeries TruncatedSeries::pow_int(int k) const {
    if (k < 0) throw std::invalid_argument("TruncatedSeries::pow_int: negative exponent");
    TruncatedSeries acc = constant(arity(), order(), 1.0);
    for (int i = 0; i < k; ++i) acc = acc * *this;
    return acc;
}

TruncatedSeries TruncatedSeries::derivative(int var) const {
    if (var < 0 || var >= arity())
        throw std::invalid_argument("TruncatedSeries::derivative: index out of range");
    TruncatedSeries out(arity(), order());
    std::vector<int> alpha(arity());
    for (int i = 0; i < layout_->size(); ++i) {
        const auto exps = layout_->exponents(i);
        if (exps[var] == 0 || coeffs_[i] == 0.0) continue;
        for (int v = 0; v < arity(); ++v) alpha[v] = exps[v];
        alpha[var] -= 1;
        const int idx = layout_->index_of(alpha);
        out.coeffs_[idx] += exps[var] * coeffs_[i];
    }
    return out;
}

TruncatedSeries TruncatedSeries::degree_part(int d) const {
    TruncatedSeries out(arity(), order());
    for (int i = 0; i < layout_->size(); ++i)
        if (layout_->degree(i) == d) out.coeffs_[i] = coeffs_[i];
    return out;
}

double TruncatedSeries::evaluate(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != arity())
        throw std::invalid_argument("TruncatedSeries::evaluate: arity mismatch");
    std::vector<std::vector<double>> pw(arity());
    for (int v = 0; v < arity(); ++v) {
        pw[v].resize(order() + 1);
        pw[v][0] = 1.0;
        for (int d = 1; d <= order(); ++d) pw[v][d] = pw[v][d - 1] * x[v];
    }
    double s = 0.0;
    for (int i = 0; i < layout_->size(); ++i) {
        if (coeffs_[i] == 0.0) continue;
        double term = coeffs_[i];
        const auto exps = layout_->exponents(i);
        for (int v = 0; v < arity(); ++v) term *= pw[v][exps[v]];
        s += term;
    }
    return s;
}

TruncatedSeries TruncatedSeries::substitute(std::span<const TruncatedSeries> vars) const {
    if (static_cast<int>(vars.size()) != arity())
        throw std::invalid_argument("TruncatedSeries::substitute: arity mismatch");
    for (const auto& v : vars) check_same(v);
    std::vector<std::vector<TruncatedSeries>> pw(arity());
    for (int v = 0; v < arity(); ++v) {
        pw[v].reserve(order() + 1);
        pw[v].push_back(constant(arity(), order(), 1.0));
        for (int d = 1; d <= order(); ++d) pw[v].push_back(pw[v][d - 1] * vars[v]);
    }
    TruncatedSeries out(arity(), order());
    for (int i = 0; i < layout_->size(); ++i) {
        if (coeffs_[i] == 0.0) continue;
        const auto exps = layout_->exponents(i);
        TruncatedSeries term = constant(arity(), order(), coeffs_[i]);
        for (int v = 0; v < arity(); ++v)
            if (exps[v] > 0) term = term * pw[v][exps[v]];
        out = out + term;
    }
    return out;
}

TruncatedSeries compose_univariate(std::span<const double> outer, const TruncatedSeries& w) {
    if (outer.empty()) throw std::invalid_argument("compose_univariate: empty coefficients");
    if (w.constant_term() != 0.0)
        throw std::invalid_argument("compose_univariate: inner series must have zero constant term");
    TruncatedSeries acc = TruncatedSeries::constant(w.arity(), w.order(), outer.back());
    for (int k = static_cast<int>(outer.size()) - 2; k >= 0; --k) {
        acc = acc * w;
        acc.coeffs()[0] += outer[k];
    }
    return acc;
}

TruncatedSeries series_exp(const TruncatedSeries& s) {
    const double c = s.constant_term();
    const int k = s.order();
    std::vector<double> outer(k + 1);
    outer[0] = std::exp(c);
    for (int i = 1; i <= k; ++i) outer[i] = outer[i - 1] / i;
    TruncatedSeries w = s;
    w.coeffs()[0] = 0.0;
    return compose_univariate(outer, w);
}

TruncatedSeries series_ln(const TruncatedSeries& s) {
    const double c = s.constant_term();
    if (!(c > 0.0)) throw std::domain_error("series_ln: constant term must be positive");
    const int k = s.order();
    std::vector<double> outer(k + 1);
    outer[0] = std::log(c);
    double cpow = c;
    for (int i = 1; i <= k; ++i) {
        outer[i] = (i % 2 == 1 ? 1.0 : -1.0) / (i * cpow);
        cpow *= c;
    }
    TruncatedSeries w = s;
    w.coeffs()[0] = 0.0;
    return compose_univariate(outer, w);
}

TruncatedSeries series_sqrt(const TruncatedSeries& s) {
    const double c = s.constant_term();
    if (!(c > 0.0)) throw std::domain_error("series_sqrt: constant term must be positive");
    const int k = s.order();
    std::vector<double> outer(k + 1);
    outer[0] = std::sqrt(c);
    for (int i = 1; i <= k; ++i) outer[i] = outer[i - 1] * (0.5 - (i - 1)) / (i * c);
    TruncatedSeries w = s;
    w.coeffs()[0] = 0.0;
    return compose_univariate(outer, w);
}

TruncatedSeries series_reciprocal(const TruncatedSeries& s) {
    const double c = s.constant_term();
    if (c == 0.0) throw std::domain_error("series_reciprocal: constant term must be nonzero");
    const int k = s.order();
    std::vector<double> outer(k + 1);
    double sign = 1.0;
    double cpow = c;
    for (int i = 0; i <= k; ++i) {
        outer[i] = sign / cpow;
        sign = -sign;
        cpow *= c;
    }
    TruncatedSeries w = s;
    w.coeffs()[0] = 0.0;
    return compose_univariate(outer, w);
}

} // namespace linobs
