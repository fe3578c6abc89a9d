#include "cogarch/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace cogarch {

namespace {

void check_finite(const std::vector<double>& xs, const char* what) {
    for (double x : xs) {
        if (!std::isfinite(x)) throw DomainError(std::string(what) + ": non-finite entry");
    }
}

void check_same_shape(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw ShapeError("matrix shape mismatch");
}

void check_square(const Matrix& a) {
    if (!a.square()) throw ShapeError("square matrix required");
}

double norm1(const Matrix& a) {
    double best = 0.0;
    for (std::size_t c = 0; c < a.cols(); ++c) {
        double s = 0.0;
        for (std::size_t r = 0; r < a.rows(); ++r) s += std::abs(a(r, c));
        best = std::max(best, s);
    }
    return best;
}

// LU decomposition with partial pivoting, in place. Returns false when a
// pivot is numerically zero.
bool lu_factor(Matrix& m, std::vector<std::size_t>& piv) {
    const std::size_t n = m.rows();
    piv.resize(n);
    for (std::size_t i = 0; i < n; ++i) piv[i] = i;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t best = k;
        double best_abs = std::abs(m(k, k));
        for (std::size_t r = k + 1; r < n; ++r) {
            if (std::abs(m(r, k)) > best_abs) {
                best_abs = std::abs(m(r, k));
                best = r;
            }
        }
        if (best_abs < std::numeric_limits<double>::min() * 16) return false;
        if (best != k) {
            for (std::size_t c = 0; c < n; ++c) std::swap(m(k, c), m(best, c));
            std::swap(piv[k], piv[best]);
        }
        const double inv_pivot = 1.0 / m(k, k);
        for (std::size_t r = k + 1; r < n; ++r) {
            const double f = m(r, k) * inv_pivot;
            m(r, k) = f;
            for (std::size_t c = k + 1; c < n; ++c) m(r, c) -= f * m(k, c);
        }
    }
    return true;
}

void lu_solve_inplace(const Matrix& lu, const std::vector<std::size_t>& piv,
                      std::vector<double>& x) {
    const std::size_t n = lu.rows();
    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i) b[i] = x[piv[i]];
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) b[i] -= lu(i, j) * b[j];
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t j = i + 1; j < n; ++j) b[i] -= lu(i, j) * b[j];
        b[i] /= lu(i, i);
    }
    x = std::move(b);
}

Matrix lu_solve_matrix(const Matrix& lu, const std::vector<std::size_t>& piv,
                       const Matrix& rhs) {
    const std::size_t n = lu.rows();
    Matrix x(n, rhs.cols());
    std::vector<double> col(n);
    for (std::size_t c = 0; c < rhs.cols(); ++c) {
        for (std::size_t r = 0; r < n; ++r) col[r] = rhs(r, c);
        lu_solve_inplace(lu, piv, col);
        for (std::size_t r = 0; r < n; ++r) x(r, c) = col[r];
    }
    return x;
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {
    if (rows == 0 || cols == 0) throw ShapeError("matrix dimensions must be >= 1");
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (rows == 0 || cols == 0) throw ShapeError("matrix dimensions must be >= 1");
    if (data_.size() != rows * cols) throw ShapeError("entry count != rows*cols");
    check_finite(data_, "matrix");
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

Matrix& Matrix::operator+=(const Matrix& other) {
    check_same_shape(*this, other);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
    check_same_shape(*this, other);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

Matrix& Matrix::operator*=(double s) {
    for (double& x : data_) x *= s;
    return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(Matrix a, double s) { return a *= s; }
Matrix operator*(double s, Matrix a) { return a *= s; }

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw ShapeError("matrix product shape mismatch");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

Vector::Vector(std::size_t dim) : data_(dim, 0.0) {
    if (dim == 0) throw ShapeError("vector dimension must be >= 1");
}

Vector::Vector(std::vector<double> entries) : data_(std::move(entries)) {
    if (data_.empty()) throw ShapeError("vector dimension must be >= 1");
    check_finite(data_, "vector");
}

Vector Vector::basis(std::size_t dim, std::size_t k) {
    Vector v(dim);
    if (k >= dim) throw ShapeError("basis index out of range");
    v[k] = 1.0;
    return v;
}

double Vector::norm() const {
    double s = 0.0;
    for (double x : data_) s += x * x;
    return std::sqrt(s);
}

Vector& Vector::operator+=(const Vector& other) {
    if (dim() != other.dim()) throw ShapeError("vector shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

Vector& Vector::operator-=(const Vector& other) {
    if (dim() != other.dim()) throw ShapeError("vector shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

Vector& Vector::operator*=(double s) {
    for (double& x : data_) x *= s;
    return *this;
}

Vector operator+(Vector a, const Vector& b) { return a += b; }
Vector operator-(Vector a, const Vector& b) { return a -= b; }
Vector operator*(Vector a, double s) { return a *= s; }
Vector operator*(double s, Vector a) { return a *= s; }

Vector operator*(const Matrix& m, const Vector& v) {
    if (m.cols() != v.dim()) throw ShapeError("matrix-vector shape mismatch");
    Vector out(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < m.cols(); ++c) s += m(r, c) * v[c];
        out[r] = s;
    }
    return out;
}

double dot(const Vector& a, const Vector& b) {
    if (a.dim() != b.dim()) throw ShapeError("dot: shape mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) s += a[i] * b[i];
    return s;
}

Matrix outer(const Vector& a, const Vector& b) {
    Matrix m(a.dim(), b.dim());
    for (std::size_t r = 0; r < a.dim(); ++r)
        for (std::size_t c = 0; c < b.dim(); ++c) m(r, c) = a[r] * b[c];
    return m;
}

Matrix build_companion(const std::vector<double>& b) {
    if (b.empty()) throw ShapeError("companion matrix needs at least one coefficient");
    check_finite(b, "companion coefficients");
    const std::size_t q = b.size();
    Matrix m(q, q);
    for (std::size_t i = 0; i + 1 < q; ++i) m(i, i + 1) = 1.0;
    for (std::size_t j = 0; j < q; ++j) m(q - 1, j) = -b[q - 1 - j];
    return m;
}

Matrix expm(const Matrix& a, double t) {
    check_square(a);
    if (!std::isfinite(t)) throw DomainError("expm: non-finite time scale");
    const std::size_t n = a.rows();
    if (t == 0.0) return Matrix::identity(n);

    Matrix m = a * t;

    // Scaling so that the Pade argument is within the order-13 radius.
    const double theta13 = 5.371920351148152;
    int squarings = 0;
    const double nm = norm1(m);
    if (nm > theta13) {
        squarings = static_cast<int>(std::ceil(std::log2(nm / theta13)));
        m *= std::ldexp(1.0, -squarings);
    }

    static const double b[] = {64764752532480000.0, 32382376266240000.0,
                               7771770303897600.0,  1187353796428800.0,
                               129060195264000.0,   10559470521600.0,
                               670442572800.0,      33522128640.0,
                               1323241920.0,        40840800.0,
                               960960.0,            16380.0,
                               182.0,               1.0};

    const Matrix ident = Matrix::identity(n);
    const Matrix m2 = m * m;
    const Matrix m4 = m2 * m2;
    const Matrix m6 = m4 * m2;

    Matrix u_inner = m6 * b[13] + m4 * b[11] + m2 * b[9];
    Matrix u = m * (m6 * u_inner + m6 * b[7] + m4 * b[5] + m2 * b[3] + ident * b[1]);
    Matrix v_inner = m6 * b[12] + m4 * b[10] + m2 * b[8];
    Matrix v = m6 * v_inner + m6 * b[6] + m4 * b[4] + m2 * b[2] + ident * b[0];

    Matrix p = v + u;
    Matrix q = v - u;
    std::vector<std::size_t> piv;
    if (!lu_factor(q, piv)) throw NumericalError("expm: Pade denominator is singular");
    Matrix r = lu_solve_matrix(q, piv, p);

    for (int s = 0; s < squarings; ++s) r = r * r;
    return r;
}

double induced_norm(const Matrix& a) {
    check_square(a);
    const Matrix ata = a.transpose() * a;
    const std::vector<double> eig = symmetric_eigenvalues(ata);
    return std::sqrt(std::max(0.0, eig.back()));
}

double log_norm(const Matrix& a) {
    check_square(a);
    Matrix sym = a + a.transpose();
    sym *= 0.5;
    return symmetric_eigenvalues(sym).back();
}

double linear_recursion_closed_form(const std::vector<double>& a_seq,
                                    const std::vector<double>& b_seq, double y0) {
    if (a_seq.size() != b_seq.size()) throw ShapeError("coefficient length mismatch");
    const std::size_t n = a_seq.size();
    if (n == 0) return y0;
    // a_seq[i] holds a_{i+1}, b_seq[i] holds b_{i+1}.
    double head = y0;
    for (std::size_t k = 0; k < n; ++k) head *= a_seq[n - 1 - k];
    double total = head + b_seq[n - 1];
    double prod = 1.0;
    for (std::size_t j = 1; j + 1 <= n; ++j) {
        prod *= a_seq[n - j];  // a_{N+1-j}
        total += prod * b_seq[n - 1 - j];
    }
    return total;
}

Matrix inverse(const Matrix& a, double cond_limit) {
    check_square(a);
    Matrix lu = a;
    std::vector<std::size_t> piv;
    if (!lu_factor(lu, piv)) throw NumericalError("inverse: matrix is singular");
    Matrix inv = lu_solve_matrix(lu, piv, Matrix::identity(a.rows()));
    const double cond = norm1(a) * norm1(inv);
    if (!std::isfinite(cond) || cond > cond_limit)
        throw NumericalError("inverse: condition estimate " + std::to_string(cond) +
                             " exceeds limit");
    return inv;
}

Vector solve(const Matrix& a, const Vector& rhs) {
    check_square(a);
    if (a.rows() != rhs.dim()) throw ShapeError("solve: shape mismatch");
    Matrix lu = a;
    std::vector<std::size_t> piv;
    if (!lu_factor(lu, piv)) throw NumericalError("solve: matrix is singular");
    std::vector<double> x = rhs.entries();
    lu_solve_inplace(lu, piv, x);
    return Vector(std::move(x));
}

std::vector<double> symmetric_eigenvalues(const Matrix& a) {
    check_square(a);
    const std::size_t n = a.rows();
    Matrix m = a;
    // Symmetrize defensively; callers pass symmetric input.
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = r + 1; c < n; ++c) {
            const double v = 0.5 * (m(r, c) + m(c, r));
            m(r, c) = v;
            m(c, r) = v;
        }

    double scale = 0.0;
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) scale = std::max(scale, std::abs(m(r, c)));
    if (scale == 0.0) return std::vector<double>(n, 0.0);

    const double tol = 1e-15 * scale;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = r + 1; c < n; ++c) off = std::max(off, std::abs(m(r, c)));
        if (off <= tol) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(m(p, q)) <= tol * 1e-2) continue;
                const double theta = (m(q, q) - m(p, p)) / (2.0 * m(p, q));
                const double sign = theta >= 0.0 ? 1.0 : -1.0;
                const double tau =
                    sign / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(tau * tau + 1.0);
                const double s = tau * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double mkp = m(k, p), mkq = m(k, q);
                    m(k, p) = c * mkp - s * mkq;
                    m(k, q) = s * mkp + c * mkq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double mpk = m(p, k), mqk = m(q, k);
                    m(p, k) = c * mpk - s * mqk;
                    m(q, k) = s * mpk + c * mqk;
                }
            }
        }
    }

    std::vector<double> eig(n);
    for (std::size_t i = 0; i < n; ++i) eig[i] = m(i, i);
    std::sort(eig.begin(), eig.end());
    return eig;
}

std::vector<std::complex<double>> companion_eigenvalues(const Matrix& a) {
    check_square(a);
    const std::size_t q = a.rows();
    for (std::size_t r = 0; r + 1 < q; ++r)
        for (std::size_t c = 0; c < q; ++c) {
            const double expected = (c == r + 1) ? 1.0 : 0.0;
            if (a(r, c) != expected)
                throw ShapeError("companion_eigenvalues: not in companion form");
        }

    // Characteristic polynomial x^q + p_{q-1} x^{q-1} + ... + p_0 with
    // p_j = -A[q-1][j].
    std::vector<double> poly(q);
    for (std::size_t j = 0; j < q; ++j) poly[j] = -a(q - 1, j);

    if (q == 1) return {std::complex<double>(-poly[0], 0.0)};

    using cd = std::complex<double>;
    auto eval = [&](cd z) {
        cd acc(1.0, 0.0);
        for (std::size_t j = q; j-- > 0;) acc = acc * z + poly[j];
        return acc;
    };

    double radius = 1.0;
    for (double p : poly) radius = std::max(radius, std::abs(p));
    radius += 1.0;

    std::vector<cd> roots(q);
    const cd seed(0.4, 0.9);
    cd w = seed;
    for (std::size_t i = 0; i < q; ++i) {
        roots[i] = w * radius;
        w *= seed;
    }

    for (int iter = 0; iter < 1000; ++iter) {
        double max_step = 0.0;
        for (std::size_t i = 0; i < q; ++i) {
            cd denom(1.0, 0.0);
            for (std::size_t j = 0; j < q; ++j) {
                if (j == i) continue;
                denom *= roots[i] - roots[j];
            }
            if (std::abs(denom) < 1e-300) continue;
            const cd step = eval(roots[i]) / denom;
            roots[i] -= step;
            max_step = std::max(max_step, std::abs(step));
        }
        if (max_step < 1e-14 * radius) break;
    }
    return roots;
}

double max_real_part(const std::vector<std::complex<double>>& eigenvalues) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& z : eigenvalues) best = std::max(best, z.real());
    return best;
}

}  // namespace cogarch
