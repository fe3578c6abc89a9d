#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "cogarch/common.hpp"

// Dense small-matrix numerics for the state-space recursions: companion
// matrices, matrix exponentials, operator and logarithmic norms (Euclidean
// induced), and LU-based inversion. Everything here targets q <= ~10, so
// direct algorithms are used throughout; no iterative solvers.

namespace cogarch {

class Matrix {
public:
    Matrix(std::size_t rows, std::size_t cols);  // zero-filled
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

    static Matrix identity(std::size_t n);

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    const std::vector<double>& entries() const { return data_; }

    Matrix transpose() const;

    Matrix& operator+=(const Matrix& other);
    Matrix& operator-=(const Matrix& other);
    Matrix& operator*=(double s);

private:
    std::size_t rows_, cols_;
    std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(Matrix a, double s);
Matrix operator*(double s, Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);

class Vector {
public:
    explicit Vector(std::size_t dim);  // zero-filled
    explicit Vector(std::vector<double> entries);

    // k-th standard basis vector of the given dimension (0-based k).
    static Vector basis(std::size_t dim, std::size_t k);

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    std::size_t dim() const { return data_.size(); }
    const std::vector<double>& entries() const { return data_; }

    double norm() const;  // Euclidean

    Vector& operator+=(const Vector& other);
    Vector& operator-=(const Vector& other);
    Vector& operator*=(double s);

private:
    std::vector<double> data_;
};

Vector operator+(Vector a, const Vector& b);
Vector operator-(Vector a, const Vector& b);
Vector operator*(Vector a, double s);
Vector operator*(double s, Vector a);
Vector operator*(const Matrix& m, const Vector& v);

double dot(const Vector& a, const Vector& b);
Matrix outer(const Vector& a, const Vector& b);

// Companion matrix of the coefficient vector (b_1, ..., b_q): ones on the
// superdiagonal, last row (-b_q, ..., -b_1). Throws ShapeError on empty b.
Matrix build_companion(const std::vector<double>& b);

// exp(A*t) by scaling-and-squaring with a degree-13 Pade kernel.
// expm(A, 0) returns the identity exactly.
Matrix expm(const Matrix& a, double t);

// Operator norm induced by the Euclidean vector norm (largest singular value).
double induced_norm(const Matrix& a);

// Logarithmic norm for the Euclidean-induced norm: lambda_max((A + A^T)/2).
double log_norm(const Matrix& a);

// Closed form of y_n = a_n y_{n-1} + b_n after N steps:
//   y_N = [prod_{k=0}^{N-1} a_{N-k}] y_0 + b_N
//         + sum_{j=1}^{N-1} [prod_{h=1}^{j} a_{N+1-h}] b_{N-j}.
double linear_recursion_closed_form(const std::vector<double>& a_seq,
                                    const std::vector<double>& b_seq, double y0);

// Inverse via LU with partial pivoting. Refuses (NumericalError) when the
// 1-norm condition estimate exceeds cond_limit or a pivot degenerates.
Matrix inverse(const Matrix& a, double cond_limit = 1e12);

// Solve A x = rhs by LU with partial pivoting.
Vector solve(const Matrix& a, const Vector& rhs);

// Eigenvalues of a symmetric matrix by cyclic Jacobi, ascending order.
std::vector<double> symmetric_eigenvalues(const Matrix& a);

// Eigenvalues of a companion-form matrix (ones on the superdiagonal, zeros
// elsewhere above the last row) via Durand-Kerner iteration on the
// characteristic polynomial. Throws ShapeError when the matrix is not in
// companion form.
std::vector<std::complex<double>> companion_eigenvalues(const Matrix& a);

double max_real_part(const std::vector<std::complex<double>>& eigenvalues);

}  // namespace cogarch
