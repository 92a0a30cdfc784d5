#include "linobs/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>

namespace linobs {

namespace {

using cd = std::complex<double>;

std::string fmt_complex(cd z) {
    std::ostringstream os;
    os << z.real();
    if (z.imag() != 0.0) os << (z.imag() < 0 ? "" : "+") << z.imag() << "i";
    return os.str();
}

} // namespace

double inf_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

Matrix::Matrix(int rows, int cols, double fill)
    : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("Matrix: negative dimension");
}

Matrix Matrix::identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const int r = static_cast<int>(rows.size());
    const int c = r == 0 ? 0 : static_cast<int>(rows.begin()->size());
    Matrix m(r, c);
    int i = 0;
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != c)
            throw std::invalid_argument("Matrix::from_rows: ragged rows");
        int j = 0;
        for (double v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

Matrix Matrix::operator+(const Matrix& rhs) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
        throw std::invalid_argument("Matrix::operator+: shape mismatch");
    Matrix out = *this;
    for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] += rhs.data_[i];
    return out;
}

Matrix Matrix::operator-(const Matrix& rhs) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
        throw std::invalid_argument("Matrix::operator-: shape mismatch");
    Matrix out = *this;
    for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] -= rhs.data_[i];
    return out;
}

Matrix Matrix::operator*(const Matrix& rhs) const {
    if (cols_ != rhs.rows_) throw std::invalid_argument("Matrix::operator*: shape mismatch");
    Matrix out(rows_, rhs.cols_);
    for (int i = 0; i < rows_; ++i)
        for (int k = 0; k < cols_; ++k) {
            const double a = (*this)(i, k);
            if (a == 0.0) continue;
            for (int j = 0; j < rhs.cols_; ++j) out(i, j) += a * rhs(k, j);
        }
    return out;
}

Vec Matrix::operator*(std::span<const double> v) const {
    if (cols_ != static_cast<int>(v.size()))
        throw std::invalid_argument("Matrix::operator*: vector length mismatch");
    Vec out(rows_, 0.0);
    for (int i = 0; i < rows_; ++i) {
        double s = 0.0;
        for (int j = 0; j < cols_; ++j) s += (*this)(i, j) * v[j];
        out[i] = s;
    }
    return out;
}

Matrix Matrix::scaled(double s) const {
    Matrix out = *this;
    for (double& x : out.data_) x *= s;
    return out;
}

Matrix Matrix::transposed() const {
    Matrix out(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
    return out;
}

double Matrix::inf_norm() const {
    double best = 0.0;
    for (int i = 0; i < rows_; ++i) {
        double s = 0.0;
        for (int j = 0; j < cols_; ++j) s += std::abs((*this)(i, j));
        best = std::max(best, s);
    }
    return best;
}

SingularMatrixError::SingularMatrixError(int column, double pivot)
    : std::runtime_error("singular system: pivot " + std::to_string(pivot) +
                         " in column " + std::to_string(column)),
      column_(column), pivot_(pivot) {}

EigenConvergenceError::EigenConvergenceError(int dim)
    : std::runtime_error("eigenvalue iteration failed to converge for dimension " +
                         std::to_string(dim)) {}

SpectraOverlapError::SpectraOverlapError(cd k, cd lambda)
    : std::runtime_error("spectra too close: k=" + fmt_complex(k) +
                         " vs lambda=" + fmt_complex(lambda)),
      k_(k), lambda_(lambda) {}

Vec lu_solve(const Matrix& m, std::span<const double> rhs) {
    const int n = m.rows();
    if (m.cols() != n) throw std::invalid_argument("lu_solve: matrix must be square");
    if (static_cast<int>(rhs.size()) != n)
        throw std::invalid_argument("lu_solve: rhs length mismatch");
    Matrix a = m;
    Vec b(rhs.begin(), rhs.end());
    constexpr double kPivotTol = 1e-13;
    for (int k = 0; k < n; ++k) {
        int p = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(p, k))) p = i;
        if (!(std::abs(a(p, k)) > kPivotTol)) throw SingularMatrixError(k, a(p, k));
        if (p != k) {
            for (int j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
            std::swap(b[k], b[p]);
        }
        for (int i = k + 1; i < n; ++i) {
            const double f = a(i, k) / a(k, k);
            if (f == 0.0) continue;
            for (int j = k; j < n; ++j) a(i, j) -= f * a(k, j);
            b[i] -= f * b[k];
        }
    }
    Vec x(n, 0.0);
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
        x[i] = s / a(i, i);
    }
    return x;
}

namespace {

// Householder similarity reduction to upper Hessenberg form, in place.
void to_hessenberg(Matrix& a) {
    const int n = a.rows();
    for (int k = 1; k <= n - 2; ++k) {
        double scale = 0.0;
        for (int i = k; i < n; ++i) scale += std::abs(a(i, k - 1));
        if (scale == 0.0) continue;
        std::vector<double> v(n, 0.0);
        double h = 0.0;
        for (int i = k; i < n; ++i) {
            v[i] = a(i, k - 1) / scale;
            h += v[i] * v[i];
        }
        const double f = v[k];
        const double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
        h -= f * g;
        if (h == 0.0) continue;
        v[k] = f - g;
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int i = k; i < n; ++i) s += v[i] * a(i, j);
            s /= h;
            for (int i = k; i < n; ++i) a(i, j) -= s * v[i];
        }
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = k; j < n; ++j) s += a(i, j) * v[j];
            s /= h;
            for (int j = k; j < n; ++j) a(i, j) -= s * v[j];
        }
        a(k, k - 1) = scale * g;
        for (int i = k + 1; i < n; ++i) a(i, k - 1) = 0.0;
    }
}

std::array<cd, 2> eig2(cd a, cd b, cd c, cd d) {
    const cd tr = a + d;
    const cd disc = std::sqrt(tr * tr - 4.0 * (a * d - b * c));
    return {(tr + disc) * 0.5, (tr - disc) * 0.5};
}

// Unitary Givens pair (c real, s complex) sending (f, g) to (r, 0).
void givens(cd f, cd g, double& c, cd& s) {
    if (g == cd(0.0)) {
        c = 1.0;
        s = cd(0.0);
        return;
    }
    if (f == cd(0.0)) {
        c = 0.0;
        s = std::conj(g) / std::abs(g);
        return;
    }
    const double d = std::hypot(std::abs(f), std::abs(g));
    c = std::abs(f) / d;
    s = (f / std::abs(f)) * std::conj(g) / d;
}

std::vector<cd> sort_eigs(std::vector<cd> e) {
    std::sort(e.begin(), e.end(), [](cd a, cd b) {
        const double ma = std::abs(a), mb = std::abs(b);
        if (ma != mb) return ma > mb;
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
    return e;
}

} // namespace

std::vector<cd> eigenvalues(const Matrix& m) {
    const int n = m.rows();
    if (m.cols() != n) throw std::invalid_argument("eigenvalues: matrix must be square");
    if (n == 0) return {};
    if (n > 8) throw std::invalid_argument("eigenvalues: dimension above 8 unsupported");
    if (n == 1) return {cd(m(0, 0))};
    if (n == 2) {
        auto [l1, l2] = eig2(m(0, 0), m(0, 1), m(1, 0), m(1, 1));
        return sort_eigs({l1, l2});
    }

    Matrix hess = m;
    to_hessenberg(hess);
    std::vector<std::vector<cd>> h(n, std::vector<cd>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) h[i][j] = cd(hess(i, j));

    std::vector<cd> eig(n);
    int hi = n - 1;
    int its = 0;
    const double eps = 4.0 * std::numeric_limits<double>::epsilon();
    while (hi >= 0) {
        if (hi == 0) {
            eig[0] = h[0][0];
            break;
        }
        int l = hi;
        while (l > 0) {
            const double s0 = std::abs(h[l - 1][l - 1]) + std::abs(h[l][l]);
            const double s = s0 == 0.0 ? 1.0 : s0;
            if (std::abs(h[l][l - 1]) <= eps * s) {
                h[l][l - 1] = cd(0.0);
                break;
            }
            --l;
        }
        if (l == hi) {
            eig[hi] = h[hi][hi];
            --hi;
            its = 0;
            continue;
        }
        if (++its > 40 * n) throw EigenConvergenceError(n);

        // Wilkinson shift from the trailing 2x2 of the active block.
        auto [mu1, mu2] = eig2(h[hi - 1][hi - 1], h[hi - 1][hi], h[hi][hi - 1], h[hi][hi]);
        cd mu = std::abs(mu1 - h[hi][hi]) < std::abs(mu2 - h[hi][hi]) ? mu1 : mu2;
        if (its % 13 == 0) mu = h[hi][hi] + cd(std::abs(h[hi][hi - 1]));

        // Explicit shifted QR step on the active block via Givens rotations.
        std::vector<double> cs(hi);
        std::vector<cd> sn(hi);
        for (int i = l; i <= hi; ++i) h[i][i] -= mu;
        for (int k = l; k < hi; ++k) {
            givens(h[k][k], h[k + 1][k], cs[k], sn[k]);
            for (int j = k; j < n; ++j) {
                const cd t0 = h[k][j], t1 = h[k + 1][j];
                h[k][j] = cs[k] * t0 + sn[k] * t1;
                h[k + 1][j] = -std::conj(sn[k]) * t0 + cs[k] * t1;
            }
        }
        for (int k = l; k < hi; ++k) {
            const int top = std::min(k + 2, hi);
            for (int i = 0; i <= top; ++i) {
                const cd t0 = h[i][k], t1 = h[i][k + 1];
                h[i][k] = cs[k] * t0 + std::conj(sn[k]) * t1;
                h[i][k + 1] = -sn[k] * t0 + cs[k] * t1;
            }
        }
        for (int i = l; i <= hi; ++i) h[i][i] += mu;
    }
    return sort_eigs(std::move(eig));
}

int rank(const Matrix& m, double tol) {
    if (m.rows() == 0 || m.cols() == 0) return 0;
    Matrix a = m;
    const double thresh = tol * m.inf_norm();
    const int limit = std::min(a.rows(), a.cols());
    int r = 0;
    for (int k = 0; k < limit; ++k) {
        int pr = k, pc = k;
        double best = 0.0;
        for (int i = k; i < a.rows(); ++i)
            for (int j = k; j < a.cols(); ++j)
                if (std::abs(a(i, j)) > best) {
                    best = std::abs(a(i, j));
                    pr = i;
                    pc = j;
                }
        if (!(best > thresh)) break;
        if (pr != k)
            for (int j = 0; j < a.cols(); ++j) std::swap(a(k, j), a(pr, j));
        if (pc != k)
            for (int i = 0; i < a.rows(); ++i) std::swap(a(i, k), a(i, pc));
        ++r;
        for (int i = k + 1; i < a.rows(); ++i) {
            const double f = a(i, k) / a(k, k);
            if (f == 0.0) continue;
            for (int j = k; j < a.cols(); ++j) a(i, j) -= f * a(k, j);
        }
    }
    return r;
}

Matrix sylvester_solve(const Matrix& f, const Matrix& a, const Matrix& c) {
    const int n = f.rows();
    if (f.cols() != n || a.rows() != n || a.cols() != n || c.rows() != n || c.cols() != n)
        throw std::invalid_argument("sylvester_solve: all matrices must be n x n");
    const auto kf = eigenvalues(f);
    const auto la = eigenvalues(a);
    for (const cd& k : kf)
        for (const cd& l : la)
            if (std::abs(k - l) <= 1e-8) throw SpectraOverlapError(k, l);

    // Row-major vectorization of j f = a j + c: the unknown j_{p,q} enters
    // equation (i,j) with coefficient [p==i] f_{q,j} - a_{i,p} [q==j].
    const int nn = n * n;
    Matrix sys(nn, nn);
    Vec rhs(nn, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const int row = i * n + j;
            rhs[row] = c(i, j);
            for (int p = 0; p < n; ++p)
                for (int q = 0; q < n; ++q) {
                    double coeff = 0.0;
                    if (p == i) coeff += f(q, j);
                    if (q == j) coeff -= a(i, p);
                    sys(row, p * n + q) = coeff;
                }
        }
    const Vec x = lu_solve(sys, rhs);
    Matrix jm(n, n);
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) jm(p, q) = x[p * n + q];
    return jm;
}

} // namespace linobs
