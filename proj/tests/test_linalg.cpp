#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cogarch/linalg.hpp"
#include "cogarch/rng.hpp"
#include "support.hpp"

using namespace cogarch;
using namespace testsupport;

TEST_CASE("companion matrix layout") {
    SUBCASE("q=1 collapses to the negated coefficient") {
        const Matrix b = build_companion({0.7});
        CHECK(b.rows() == 1);
        CHECK(b(0, 0) == -0.7);
    }
    SUBCASE("q=2 displayed form") {
        const Matrix b = build_companion({1.0, 0.3});  // b1=1.0, b2=0.3
        CHECK(b(0, 0) == 0.0);
        CHECK(b(0, 1) == 1.0);
        CHECK(b(1, 0) == -0.3);
        CHECK(b(1, 1) == -1.0);
    }
    SUBCASE("q=3 subdiagonal of ones and reversed last row") {
        const Matrix b = build_companion({3.0, 2.0, 1.0});
        const std::vector<double> expected{0, 1, 0, 0, 0, 1, -1, -2, -3};
        CHECK(b.entries() == expected);
    }
    CHECK_THROWS_AS(build_companion({}), ShapeError);
}

TEST_CASE("expm basics and Taylor-series oracle") {
    const Matrix a(2, 2, {0.0, 1.0, -2.0, -3.0});

    SUBCASE("t=0 is the identity exactly") {
        const Matrix e = expm(a, 0.0);
        CHECK(e(0, 0) == 1.0);
        CHECK(e(0, 1) == 0.0);
        CHECK(e(1, 0) == 0.0);
        CHECK(e(1, 1) == 1.0);
    }
    SUBCASE("1x1 scalar exponential") {
        const Matrix m(1, 1, {-1.0});
        CHECK(expm(m, 1.0)(0, 0) == doctest::Approx(0.36787944117144233).epsilon(1e-14));
    }
    SUBCASE("frozen value and series oracle at t=0.5") {
        const Matrix e = expm(a, 0.5);
        // Frozen from the truncated-series oracle (independent evaluation).
        CHECK(e(0, 0) == doctest::Approx(0.8451818782538245).epsilon(1e-13));
        CHECK(e(0, 1) == doctest::Approx(0.23865121854119117).epsilon(1e-13));
        CHECK(e(1, 0) == doctest::Approx(-0.4773024370823821).epsilon(1e-13));
        CHECK(e(1, 1) == doctest::Approx(0.12922822263025124).epsilon(1e-13));
        CHECK(max_abs_diff(e, taylor_expm(a, 0.5)) < 1e-12);
    }
    SUBCASE("series oracle across random small matrices") {
        Rng rng(11);
        for (int rep = 0; rep < 30; ++rep) {
            const std::size_t q = 1 + rep % 4;
            const Matrix m = random_matrix(q, rng);
            const double t = 0.1 + rng.uniform();
            CHECK(max_abs_diff(expm(m, t), taylor_expm(m, t)) < 1e-11);
        }
    }
    CHECK_THROWS_AS(expm(Matrix(2, 3), 1.0), ShapeError);
}

TEST_CASE("induced norm") {
    CHECK(induced_norm(Matrix::identity(4)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(induced_norm(Matrix(2, 2, {2.0, 0.0, 0.0, -5.0})) ==
          doctest::Approx(5.0).epsilon(1e-12));

    SUBCASE("sup-definition sampling oracle") {
        const Matrix a(2, 2, {0.0, 1.0, -2.0, -3.0});
        const double sigma = induced_norm(a);
        CHECK(sigma == doctest::Approx(3.702459173643833).epsilon(1e-12));
        // Dense sweep of unit vectors z (10^4 angles plus seeded jitter).
        double best = 0.0;
        Rng rng(5);
        for (int k = 0; k < 10000; ++k) {
            const double theta =
                2.0 * M_PI * (static_cast<double>(k) + rng.uniform()) / 10000.0;
            const Vector z(std::vector<double>{std::cos(theta), std::sin(theta)});
            best = std::max(best, (a * z).norm());
        }
        CHECK(sigma == doctest::Approx(best).epsilon(1e-6));
        CHECK(sigma >= best - 1e-12);
    }
}

TEST_CASE("logarithmic norm") {
    CHECK(log_norm(Matrix::identity(3)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(log_norm(Matrix(2, 2, {-1.0, 0.0, 0.0, -4.0})) ==
          doctest::Approx(-1.0).epsilon(1e-12));

    SUBCASE("limit-definition oracle with Richardson check") {
        const Matrix a(2, 2, {0.0, 1.0, -2.0, -3.0});
        const double m = log_norm(a);
        CHECK(m == doctest::Approx(0.08113883008418966).epsilon(1e-12));
        auto quotient = [&](double t) {
            return (induced_norm(Matrix::identity(2) + a * t) - 1.0) / t;
        };
        const double q4 = quotient(1e-4), q5 = quotient(1e-5), q6 = quotient(1e-6);
        CHECK(std::abs(q6 - m) < 1e-3);
        // successive quotients approach m monotonically in error
        CHECK(std::abs(q5 - m) < std::abs(q4 - m) + 1e-12);
        const double richardson = q5 + (q5 - q4) * (1e-5) / (1e-4 - 1e-5);
        CHECK(std::abs(richardson - m) < 1e-3);
    }
}

TEST_CASE("linear recursion closed form") {
    CHECK(linear_recursion_closed_form({1, 1, 1}, {0, 0, 0}, 5.0) == 5.0);
    CHECK(linear_recursion_closed_form({2, 2}, {1, 1}, 0.0) == 3.0);
    CHECK_THROWS_AS(linear_recursion_closed_form({1, 2}, {1}, 0.0), ShapeError);

    SUBCASE("direct-iteration oracle and monotonicity, N=50") {
        Rng rng(42);
        for (int rep = 0; rep < 20; ++rep) {
            std::vector<double> a(50), b(50);
            for (double& x : a) x = 1.0 + rng.uniform();
            for (double& x : b) x = rng.uniform();
            const double y0 = rng.uniform();
            double y = y0, prev = y0, max_seen = y0;
            bool nondecreasing = true;
            for (std::size_t k = 0; k < 50; ++k) {
                y = a[k] * y + b[k];
                nondecreasing = nondecreasing && y >= prev - 1e-15;
                prev = y;
                max_seen = std::max(max_seen, y);
            }
            const double closed = linear_recursion_closed_form(a, b, y0);
            CHECK(std::abs(closed - y) <= 1e-12 * std::abs(y));
            CHECK(nondecreasing);
            CHECK(max_seen == doctest::Approx(y).epsilon(1e-15));
        }
    }
}

TEST_CASE("norm inequalities across random matrices") {
    Rng rng(7);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t q = 1 + rep % 4;
        const Matrix a = random_matrix(q, rng);
        const Matrix b = random_matrix(q, rng);

        // submultiplicativity and triangle inequality
        CHECK(induced_norm(a * b) <= induced_norm(a) * induced_norm(b) + 1e-10);
        CHECK(induced_norm(a + b) <= induced_norm(a) + induced_norm(b) + 1e-10);

        // vector compatibility
        const Vector x = random_vector(q, rng);
        CHECK((a * x).norm() <= induced_norm(a) * x.norm() + 1e-10);

        // scalar homogeneity (the statement gives <=; equality holds)
        const double alpha = 2.0 * rng.normal();
        CHECK(induced_norm(a * alpha) ==
              doctest::Approx(std::abs(alpha) * induced_norm(a)).epsilon(1e-10));

        // log-norm sandwich for t in (0, 2]
        const double t = 2.0 * rng.uniform();
        const double lhs = induced_norm(expm(a, t));
        CHECK(lhs <= std::exp(log_norm(a) * t) * (1.0 + 1e-8));
        CHECK(std::exp(log_norm(a) * t) <= std::exp(induced_norm(a) * t) * (1.0 + 1e-8));
    }
}

TEST_CASE("exponential-difference inequality") {
    Rng rng(13);
    for (int rep = 0; rep < 60; ++rep) {
        const std::size_t q = 1 + rep % 4;
        const Matrix a = random_matrix(q, rng);
        for (double t : {1e-2, 1e-1, 1.0}) {
            const Matrix lhs_mat = (expm(a, t) - Matrix::identity(q)) * (1.0 / t) - a;
            const double na_t = induced_norm(a * t);
            const double rhs = (std::exp(na_t) - 1.0 - na_t) / std::abs(t);
            CHECK(induced_norm(lhs_mat) <= rhs + 1e-8);
        }
    }
}

TEST_CASE("inverse with condition guard") {
    const Matrix a(2, 2, {1.0, 2.0, 3.0, 4.0});
    const Matrix inv = inverse(a);
    CHECK(max_abs_diff(a * inv, Matrix::identity(2)) < 1e-12);

    // nearly singular: condition estimate blows past the default limit
    const Matrix bad(2, 2, {1.0, 1.0, 1.0, 1.0 + 1e-14});
    CHECK_THROWS_AS(inverse(bad), NumericalError);
}

TEST_CASE("companion eigenvalues against characteristic roots") {
    // x^2 + x + 0.25 = (x + 0.5)^2
    const Matrix b = build_companion({1.0, 0.25});
    const auto eig = companion_eigenvalues(b);
    for (const auto& z : eig) {
        CHECK(std::abs(z.real() + 0.5) < 1e-4);
        CHECK(std::abs(z.imag()) < 1e-4);
    }
    // distinct real roots -0.1, -2: x^2 + 2.1x + 0.2
    const auto eig2 = companion_eigenvalues(build_companion({2.1, 0.2}));
    CHECK(max_real_part(eig2) == doctest::Approx(-0.1).epsilon(1e-9));
    CHECK_THROWS_AS(companion_eigenvalues(Matrix(2, 2, {1, 1, 1, 1})), ShapeError);
}
