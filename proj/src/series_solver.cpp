#include "linobs/series_solver.hpp"

#include <cmath>

namespace linobs {

SeriesResonanceError::SeriesResonanceError(int degree)
    : std::runtime_error("series solve singular at degree " + std::to_string(degree) +
                         " (resonant eigenvalue product)"),
      degree_(degree) {}

namespace {

// Degree-N block of T composed with phi minus a*T, as a function of T's
// coefficients; lower-degree coefficients of T contribute the inhomogeneity.
struct DegreeIndexer {
    std::vector<int> flat;  // layout indices of the degree-N monomials

    DegreeIndexer(const SeriesLayout& layout, int degree) {
        for (int i = 0; i < layout.size(); ++i)
            if (layout.degree(i) == degree) flat.push_back(i);
    }
};

// Extended-precision truncated series over a shared layout. A nearly resonant
// degree block (an eigenvalue product within ~1e-4 of a filter eigenvalue, as
// happens at degree 4 for the logarithmic benchmark) amplifies input and
// formation round-off by up to ~1e5, so double-precision coefficients cannot
// reach the accuracy the coefficient equations otherwise determine.
struct LdSeries {
    const SeriesLayout* layout = nullptr;
    std::vector<long double> c;

    explicit LdSeries(const SeriesLayout& lay) : layout(&lay), c(lay.size(), 0.0L) {}
};

LdSeries ld_mul(const LdSeries& a, const LdSeries& b) {
    LdSeries out(*a.layout);
    const int size = a.layout->size();
    for (int i = 0; i < size; ++i) {
        const long double ci = a.c[i];
        if (ci == 0.0L) continue;
        for (int j = 0; j < size; ++j) {
            const long double cj = b.c[j];
            if (cj == 0.0L) continue;
            const int k = a.layout->product_index(i, j);
            if (k >= 0) out.c[k] += ci * cj;
        }
    }
    return out;
}

// Horner evaluation of sum_k outer[k] * w^k; w must have zero constant term.
LdSeries ld_compose(const std::vector<long double>& outer, const LdSeries& w) {
    LdSeries r(*w.layout);
    r.c[0] = outer.back();
    for (int k = static_cast<int>(outer.size()) - 2; k >= 0; --k) {
        r = ld_mul(r, w);
        r.c[0] += outer[k];
    }
    return r;
}

LdSeries ld_eval(const ExprNode& node, std::span<const LdSeries> vars) {
    const SeriesLayout& lay = *vars[0].layout;
    const int order = lay.order();
    switch (node.kind) {
        case ExprNode::Kind::Constant: {
            LdSeries s(lay);
            s.c[0] = node.value;
            return s;
        }
        case ExprNode::Kind::Variable:
            return vars[node.var];
        case ExprNode::Kind::Unary: {
            LdSeries s = ld_eval(*node.lhs, vars);
            if (node.func == UnaryFunc::Neg) {
                for (long double& v : s.c) v = -v;
                return s;
            }
            const long double c0 = s.c[0];
            s.c[0] = 0.0L;
            std::vector<long double> outer(order + 1);
            switch (node.func) {
                case UnaryFunc::Exp: {
                    long double d = expl(c0);
                    for (int k = 0; k <= order; ++k) {
                        outer[k] = d;
                        d /= (k + 1);
                    }
                    break;
                }
                case UnaryFunc::Ln: {
                    if (!(c0 > 0.0L))
                        throw std::domain_error("series ln of non-positive constant term");
                    outer[0] = logl(c0);
                    long double p = 1.0L;
                    for (int k = 1; k <= order; ++k) {
                        p /= c0;
                        outer[k] = (k % 2 ? p : -p) / k;
                    }
                    break;
                }
                case UnaryFunc::Sqrt: {
                    if (!(c0 > 0.0L))
                        throw std::domain_error("series sqrt of non-positive constant term");
                    long double d = sqrtl(c0);
                    for (int k = 0; k <= order; ++k) {
                        outer[k] = d;
                        d *= (0.5L - k) / ((k + 1) * c0);
                    }
                    break;
                }
                case UnaryFunc::Neg:
                    break;
            }
            return ld_compose(outer, s);
        }
        case ExprNode::Kind::Binary: {
            if (node.op == BinaryOp::Pow) {
                const LdSeries base = ld_eval(*node.lhs, vars);
                LdSeries r(lay);
                r.c[0] = 1.0L;
                for (int k = 0; k < node.exponent; ++k) r = ld_mul(r, base);
                return r;
            }
            LdSeries a = ld_eval(*node.lhs, vars);
            const LdSeries b = ld_eval(*node.rhs, vars);
            switch (node.op) {
                case BinaryOp::Add:
                    for (int i = 0; i < lay.size(); ++i) a.c[i] += b.c[i];
                    return a;
                case BinaryOp::Sub:
                    for (int i = 0; i < lay.size(); ++i) a.c[i] -= b.c[i];
                    return a;
                case BinaryOp::Mul:
                    return ld_mul(a, b);
                case BinaryOp::Div: {
                    const long double c0 = b.c[0];
                    if (c0 == 0.0L)
                        throw std::domain_error("series division by zero constant term");
                    LdSeries w = b;
                    w.c[0] = 0.0L;
                    std::vector<long double> outer(order + 1);
                    long double p = 1.0L / c0;
                    for (int k = 0; k <= order; ++k) {
                        outer[k] = (k % 2 ? -p : p);
                        p /= c0;
                    }
                    return ld_mul(a, ld_compose(outer, w));
                }
                case BinaryOp::Pow:
                    break;
            }
            break;
        }
    }
    throw std::logic_error("ld_eval: unhandled expression node");
}

} // namespace

PolyMap solve_series(const DiscreteSystem& sys, const ObserverSpec& obs, int order) {
    if (order < 1) throw std::invalid_argument("solve_series: order must be >= 1");
    const int n = sys.n;
    const Vec origin(n, 0.0);

    std::vector<TruncatedSeries> phi_series;
    phi_series.reserve(n);
    for (int i = 0; i < n; ++i) {
        TruncatedSeries s = series_eval(sys.phi[i], origin, order);
        if (std::abs(s.constant_term()) > 1e-12)
            throw std::runtime_error("solve_series: dynamics not anchored at the origin");
        s.coeffs()[0] = 0.0;
        phi_series.push_back(std::move(s));
    }
    TruncatedSeries h_series = series_eval(sys.h, origin, order);
    std::vector<TruncatedSeries> inj_series;
    inj_series.reserve(n);
    for (int i = 0; i < n; ++i)
        inj_series.push_back(eval_over_series(obs.b[i], std::span(&h_series, 1)));

    const auto layout = SeriesLayout::get(n, order);
    std::vector<int> alpha(n);

    // Degree 1: the same linear system the first-order matrix equation encodes.
    Matrix f(n, n), c(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            std::fill(alpha.begin(), alpha.end(), 0);
            alpha[j] = 1;
            f(i, j) = phi_series[i].coeff(alpha);
            c(i, j) = inj_series[i].coeff(alpha);
        }
    const Matrix j0 = sylvester_solve(f, obs.a, c);

    PolyMap map;
    for (int i = 0; i < n; ++i) {
        TruncatedSeries t(n, order);
        for (int j = 0; j < n; ++j) {
            std::fill(alpha.begin(), alpha.end(), 0);
            alpha[j] = 1;
            t.set_coeff(alpha, j0(i, j));
        }
        map.components.push_back(std::move(t));
    }

    // Whole sweep in extended precision, inputs included: the amplification
    // acts on the round-off already present in the series coefficients of phi
    // and b(h), not just on the block solves.
    const int size = layout->size();
    std::vector<LdSeries> var_series;
    for (int v = 0; v < n; ++v) {
        LdSeries s(*layout);
        std::fill(alpha.begin(), alpha.end(), 0);
        alpha[v] = 1;
        s.c[layout->index_of(alpha)] = 1.0L;
        var_series.push_back(std::move(s));
    }
    std::vector<std::vector<long double>> phi_ld, inj_ld;
    for (int i = 0; i < n; ++i) {
        LdSeries s = ld_eval(*sys.phi[i].root(), var_series);
        s.c[0] = 0.0L;  // anchored at the origin, checked above
        phi_ld.push_back(std::move(s.c));
    }
    const LdSeries h_ld = ld_eval(*sys.h.root(), var_series);
    for (int i = 0; i < n; ++i)
        inj_ld.push_back(ld_eval(*obs.b[i].root(), std::span(&h_ld, 1)).c);
    std::vector<std::vector<long double>> t_ld(n, std::vector<long double>(size, 0.0L));
    for (int i = 0; i < n; ++i)
        for (int m = 0; m < size; ++m) t_ld[i][m] = map.components[i].coeffs()[m];

    // Truncated power table: pw[m] holds the series of prod_i phi_i^alpha(m)_i,
    // built by peeling one variable off a lower-degree entry (graded layout
    // guarantees the parent precedes m).
    std::vector<std::vector<long double>> pw(size, std::vector<long double>(size, 0.0L));
    pw[0][0] = 1.0L;
    for (int m = 1; m < size; ++m) {
        const auto exps = layout->exponents(m);
        int var = 0;
        while (exps[var] == 0) ++var;
        std::vector<int> parent(exps.begin(), exps.end());
        parent[var] -= 1;
        const int pidx = layout->index_of(parent);
        for (int i = 0; i < size; ++i) {
            const long double ci = pw[pidx][i];
            if (ci == 0.0L) continue;
            for (int j = 0; j < size; ++j) {
                const long double cj = phi_ld[var][j];
                if (cj == 0.0L) continue;
                const int k = layout->product_index(i, j);
                if (k >= 0) pw[m][k] += ci * cj;
            }
        }
    }

    // Degree 1 reruns as a refinement of the sylvester_solve seed (the rhs is
    // the residual of the current coefficients, so the solve is a correction);
    // degrees >= 2 start from zero and the solve is the coefficient block.
    for (int deg = 1; deg <= order; ++deg) {
        const DegreeIndexer idx(*layout, deg);
        const int monos = static_cast<int>(idx.flat.size());
        const int unknowns = n * monos;

        // Residual slice of T(phi) - A T - b(h) at this degree.
        std::vector<long double> rhs(unknowns);
        for (int i = 0; i < n; ++i)
            for (int q = 0; q < monos; ++q) {
                const int f = idx.flat[q];
                long double v = 0.0L;
                for (int m = 0; m < size; ++m)
                    if (t_ld[i][m] != 0.0L) v += t_ld[i][m] * pw[m][f];
                for (int j = 0; j < n; ++j)
                    v -= static_cast<long double>(obs.a(i, j)) * t_ld[j][f];
                v -= inj_ld[i][f];
                rhs[i * monos + q] = -v;
            }

        // Unknown degree-`deg` coefficients enter through the linear part of
        // the composition (the degree slice of pw) and through A T.
        std::vector<long double> mat(static_cast<std::size_t>(unknowns) * unknowns);
        for (int j = 0; j < n; ++j)
            for (int q = 0; q < monos; ++q) {
                const int col = j * monos + q;
                for (int i = 0; i < n; ++i)
                    for (int r = 0; r < monos; ++r) {
                        long double v = i == j ? pw[idx.flat[q]][idx.flat[r]] : 0.0L;
                        if (r == q) v -= obs.a(i, j);
                        mat[static_cast<std::size_t>(i * monos + r) * unknowns + col] = v;
                    }
            }

        // Pivoted elimination; the pivot floor matches lu_solve's.
        std::vector<int> perm(unknowns);
        for (int c = 0; c < unknowns; ++c) perm[c] = c;
        for (int c = 0; c < unknowns; ++c) {
            int piv = c;
            for (int r = c + 1; r < unknowns; ++r)
                if (fabsl(mat[static_cast<std::size_t>(r) * unknowns + c]) >
                    fabsl(mat[static_cast<std::size_t>(piv) * unknowns + c]))
                    piv = r;
            if (!(fabsl(mat[static_cast<std::size_t>(piv) * unknowns + c]) > 1e-13L))
                throw SeriesResonanceError(deg);
            if (piv != c) {
                for (int k = 0; k < unknowns; ++k)
                    std::swap(mat[static_cast<std::size_t>(piv) * unknowns + k],
                              mat[static_cast<std::size_t>(c) * unknowns + k]);
                std::swap(rhs[piv], rhs[c]);
            }
            for (int r = c + 1; r < unknowns; ++r) {
                const long double factor =
                    mat[static_cast<std::size_t>(r) * unknowns + c] /
                    mat[static_cast<std::size_t>(c) * unknowns + c];
                if (factor == 0.0L) continue;
                mat[static_cast<std::size_t>(r) * unknowns + c] = 0.0L;
                for (int k = c + 1; k < unknowns; ++k)
                    mat[static_cast<std::size_t>(r) * unknowns + k] -=
                        factor * mat[static_cast<std::size_t>(c) * unknowns + k];
                rhs[r] -= factor * rhs[c];
            }
        }
        for (int c = unknowns - 1; c >= 0; --c) {
            long double v = rhs[c];
            for (int k = c + 1; k < unknowns; ++k)
                v -= mat[static_cast<std::size_t>(c) * unknowns + k] * rhs[k];
            rhs[c] = v / mat[static_cast<std::size_t>(c) * unknowns + c];
        }

        for (int j = 0; j < n; ++j)
            for (int q = 0; q < monos; ++q) t_ld[j][idx.flat[q]] += rhs[j * monos + q];
    }

    for (int i = 0; i < n; ++i)
        for (int m = 0; m < size; ++m)
            map.components[i].coeffs()[m] = static_cast<double>(t_ld[i][m]);
    return map;
}

Vec eval_polymap(const PolyMap& map, std::span<const double> x) {
    Vec out(map.components.size());
    for (std::size_t i = 0; i < map.components.size(); ++i)
        out[i] = map.components[i].evaluate(x);
    return out;
}

PolyTransform::PolyTransform(PolyMap map) : map_(std::move(map)) {
    if (map_.components.empty()) throw std::invalid_argument("PolyTransform: empty map");
    grads_.resize(map_.components.size());
    for (std::size_t i = 0; i < map_.components.size(); ++i)
        for (int v = 0; v < map_.arity(); ++v)
            grads_[i].push_back(map_.components[i].derivative(v));
}

Vec PolyTransform::eval(std::span<const double> x) const {
    return eval_polymap(map_, x);
}

Matrix PolyTransform::jacobian(std::span<const double> x) const {
    Matrix jac(output_dim(), input_dim());
    for (int i = 0; i < jac.rows(); ++i)
        for (int j = 0; j < jac.cols(); ++j) jac(i, j) = grads_[i][j].evaluate(x);
    return jac;
}

} // namespace linobs
