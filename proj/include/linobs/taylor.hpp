#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

namespace linobs {

/// Shared monomial ordering for dense truncated series of a given arity and
/// order: graded lexicographic, degree ascending, and within a degree the
/// exponent of x1 decides first (descending), then x2, and so on. Layouts are
/// cached per (arity, order); exponents are capped at 15 per variable so a
/// multi-index packs into one 64-bit key.
class SeriesLayout {
public:
    static std::shared_ptr<const SeriesLayout> get(int arity, int order);

    int arity() const { return arity_; }
    int order() const { return order_; }
    int size() const { return static_cast<int>(exps_.size()); }

    std::span<const int> exponents(int idx) const {
        return {exps_[idx].data(), exps_[idx].size()};
    }
    int degree(int idx) const { return degree_[idx]; }

    /// Index of a multi-index, or -1 when its total degree exceeds the order.
    int index_of(std::span<const int> alpha) const;

    /// Index of the product monomial of entries i and j, or -1 on overflow.
    int product_index(int i, int j) const { return mul_table_[static_cast<std::size_t>(i) * size() + j]; }

private:
    SeriesLayout(int arity, int order);

    int arity_;
    int order_;
    std::vector<std::vector<int>> exps_;
    std::vector<int> degree_;
    std::unordered_map<std::uint64_t, int> lookup_;
    std::vector<int> mul_table_;
};

/// Multivariate polynomial truncated at a fixed total degree, with dense
/// coefficients over a shared SeriesLayout. Arithmetic discards all terms
/// above the order.
class TruncatedSeries {
public:
    TruncatedSeries() = default;
    TruncatedSeries(int arity, int order);
    static TruncatedSeries constant(int arity, int order, double c);
    static TruncatedSeries variable(int arity, int order, int var);

    int arity() const { return layout_->arity(); }
    int order() const { return layout_->order(); }
    const SeriesLayout& layout() const { return *layout_; }

    double coeff(std::span<const int> alpha) const;
    void set_coeff(std::span<const int> alpha, double value);
    double constant_term() const { return coeffs_.empty() ? 0.0 : coeffs_[0]; }
    std::span<const double> coeffs() const { return coeffs_; }
    std::span<double> coeffs() { return coeffs_; }

    TruncatedSeries operator+(const TruncatedSeries& rhs) const;
    TruncatedSeries operator-(const TruncatedSeries& rhs) const;
    TruncatedSeries operator*(const TruncatedSeries& rhs) const;
    TruncatedSeries operator-() const;
    TruncatedSeries scaled(double s) const;
    TruncatedSeries pow_int(int k) const;

    /// Partial derivative with respect to variable var, same layout.
    TruncatedSeries derivative(int var) const;

    /// Keep only the terms of exactly the given total degree.
    TruncatedSeries degree_part(int d) const;

    double evaluate(std::span<const double> x) const;

    /// Substitute vars[i] for variable i (all series share this layout).
    TruncatedSeries substitute(std::span<const TruncatedSeries> vars) const;

private:
    std::shared_ptr<const SeriesLayout> layout_;
    std::vector<double> coeffs_;

    void check_same(const TruncatedSeries& rhs) const;
};

/// Composite a univariate Taylor polynomial (coefficients outer[0..K]) with a
/// series of zero constant term, by Horner evaluation.
TruncatedSeries compose_univariate(std::span<const double> outer, const TruncatedSeries& w);

/// Analytic compositions about the series' constant term. ln and sqrt require
/// a strictly positive constant term and reciprocal a nonzero one; violations
/// throw std::domain_error.
TruncatedSeries series_exp(const TruncatedSeries& s);
TruncatedSeries series_ln(const TruncatedSeries& s);
TruncatedSeries series_sqrt(const TruncatedSeries& s);
TruncatedSeries series_reciprocal(const TruncatedSeries& s);

} // namespace linobs
