#pragma once

#include <cmath>
#include <vector>

#include "cogarch/levy.hpp"
#include "cogarch/linalg.hpp"
#include "cogarch/rng.hpp"
#include "cogarch/simulator.hpp"

// Shared independent oracles and generators for the test suites. Everything
// here must stay independent of the implementation path it checks: the
// Taylor exponential sums the series directly, the recursions below iterate
// the displayed formulas step by step.

namespace testsupport {

using namespace cogarch;

// Truncated Taylor series sum_{k<=terms} (A t)^k / k!.
inline Matrix taylor_expm(const Matrix& a, double t, int terms = 40) {
    const std::size_t n = a.rows();
    Matrix sum = Matrix::identity(n);
    Matrix power = Matrix::identity(n);
    const Matrix at = a * t;
    double factorial = 1.0;
    for (int k = 1; k <= terms; ++k) {
        power = power * at;
        factorial *= static_cast<double>(k);
        sum += power * (1.0 / factorial);
    }
    return sum;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    double m = 0.0;
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c)
            m = std::max(m, std::abs(a(r, c) - b(r, c)));
    return m;
}

inline double max_abs_diff(const Vector& a, const Vector& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline Matrix random_matrix(std::size_t n, Rng& rng, double scale = 1.0) {
    std::vector<double> entries(n * n);
    for (double& x : entries) x = scale * rng.normal();
    return Matrix(n, n, std::move(entries));
}

inline Vector random_vector(std::size_t n, Rng& rng, double scale = 1.0) {
    std::vector<double> entries(n);
    for (double& x : entries) x = scale * rng.normal();
    return Vector(std::move(entries));
}

// Random admissible COGARCH spec with small a and a stable companion
// polynomial prod (x + r_k), r_k in [0.3, 1.3].
inline CogarchSpec random_stable_spec(std::size_t p, std::size_t q, Rng& rng) {
    for (int attempt = 0; attempt < 200; ++attempt) {
        std::vector<double> roots(q);
        for (double& r : roots) r = 0.3 + rng.uniform();
        std::vector<double> poly{1.0};  // monic coefficients, descending powers
        for (double r : roots) {
            std::vector<double> next(poly.size() + 1, 0.0);
            for (std::size_t i = 0; i < poly.size(); ++i) {
                next[i] += poly[i];
                next[i + 1] += poly[i] * r;
            }
            poly = next;
        }
        std::vector<double> b(poly.begin() + 1, poly.end());
        std::vector<double> a(p);
        for (std::size_t k = 0; k < p; ++k)
            a[k] = (0.02 + 0.05 * rng.uniform()) * std::pow(0.5, static_cast<double>(k));
        const double alpha0 = 0.01 + 0.1 * rng.uniform();
        CogarchSpec spec(p, q, a, b, alpha0);
        if (stationarity_check(spec, 1.0).ok) return spec;
    }
    throw std::runtime_error("random_stable_spec: no admissible spec found");
}

// Exact state recursion on a jump-aligned grid, iterated directly from the
// displayed coefficients with the Taylor exponential:
//   Y_{t_i} = (I + dL_{t_i}^2 ea^T) e^{B dt_i} Y_{t_{i-1}} + alpha0 dL_{t_i}^2 e.
inline std::vector<Vector> aligned_recursion_oracle(const CogarchSpec& spec,
                                                    const Grid& grid,
                                                    const std::vector<double>& jump_at_knot,
                                                    const Vector& y0) {
    const Matrix b = spec.companion();
    const Matrix ea = outer(spec.e_vec(), spec.a_vec());
    std::vector<Vector> ys{y0};
    Vector y = y0;
    for (std::size_t i = 0; i < grid.cells(); ++i) {
        const double dt = grid.dt(i);
        const double z = jump_at_knot[i + 1] * jump_at_knot[i + 1];
        const Matrix c = (Matrix::identity(spec.q) + ea * z) * taylor_expm(b, dt);
        Vector d = spec.e_vec() * (spec.alpha0 * z);
        y = c * y + d;
        ys.push_back(y);
    }
    return ys;
}

}  // namespace testsupport
