#pragma once

#include <complex>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace linobs {

using Vec = std::vector<double>;

/// Max absolute entry of a vector.
double inf_norm(std::span<const double> v);

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols, double fill = 0.0);
    static Matrix identity(int n);
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
    double operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    Matrix operator+(const Matrix& rhs) const;
    Matrix operator-(const Matrix& rhs) const;
    Matrix operator*(const Matrix& rhs) const;
    Vec operator*(std::span<const double> v) const;
    Matrix scaled(double s) const;
    Matrix transposed() const;

    /// Max absolute row sum.
    double inf_norm() const;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

/// Thrown by lu_solve when elimination hits a pivot at or below threshold.
class SingularMatrixError : public std::runtime_error {
public:
    SingularMatrixError(int column, double pivot);
    int column() const { return column_; }
    double pivot() const { return pivot_; }

private:
    int column_;
    double pivot_;
};

/// Thrown by eigenvalues() if QR iteration fails to deflate within its cap.
class EigenConvergenceError : public std::runtime_error {
public:
    explicit EigenConvergenceError(int dim);
};

/// Thrown by sylvester_solve when the two spectra nearly intersect.
class SpectraOverlapError : public std::runtime_error {
public:
    SpectraOverlapError(std::complex<double> k, std::complex<double> lambda);
    std::complex<double> k() const { return k_; }
    std::complex<double> lambda() const { return lambda_; }

private:
    std::complex<double> k_;
    std::complex<double> lambda_;
};

/// Solve m x = rhs by LU with partial pivoting. Pivot threshold 1e-13 (absolute).
Vec lu_solve(const Matrix& m, std::span<const double> rhs);

/// Eigenvalues sorted by descending magnitude (ties: descending real part, then
/// descending imaginary part). Analytic for n <= 2, shifted QR on Hessenberg
/// form for 3 <= n <= 8; larger inputs are rejected.
std::vector<std::complex<double>> eigenvalues(const Matrix& m);

/// Numerical rank via Gaussian elimination with complete pivoting; a pivot
/// counts while its magnitude exceeds tol * inf_norm of the input.
int rank(const Matrix& m, double tol = 1e-10);

/// Solve j * f = a * j + c for j, via the Kronecker-product linear system.
/// Requires the spectra of f and a to be separated by more than 1e-8.
Matrix sylvester_solve(const Matrix& f, const Matrix& a, const Matrix& c);

} // namespace linobs
