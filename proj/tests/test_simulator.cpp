#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "cogarch/simulator.hpp"
#include "support.hpp"

using namespace cogarch;
using namespace testsupport;

namespace {

// Exact-path oracle: applies the displayed jump recursion with the Taylor
// exponential, independently of the simulator's propagation.
struct OracleState {
    Vector y;
    double g;
};

OracleState oracle_at(const CogarchSpec& spec, const JumpPath& noise, double t) {
    const Matrix b = spec.companion();
    const Vector a = spec.a_vec();
    Vector y(spec.q);
    double g = 0.0;
    double t_prev = 0.0;
    for (std::size_t k = 0; k < noise.times.size() && noise.times[k] <= t; ++k) {
        const double tau = noise.times[k];
        y = taylor_expm(b, tau - t_prev) * y;
        const double v_pre = spec.alpha0 + dot(a, y);
        g += std::sqrt(v_pre) * noise.sizes[k];
        const double z = noise.sizes[k] * noise.sizes[k];
        Vector d = spec.e_vec() * (z * v_pre);
        y += d;
        t_prev = tau;
    }
    y = taylor_expm(b, t - t_prev) * y;
    return {y, g};
}

// Innovations carrying the true squared jumps of a jump-aligned grid: the
// jump at knot t_i is assigned to the cell ending at t_i.
InnovationSeries aligned_innovations(const Grid& grid, const JumpPath& noise) {
    InnovationSeries s{grid, {}, {}, {}, {}, 0.0};
    const std::size_t n = grid.cells();
    s.epsilon.assign(n, 0.0);
    s.raw_first_jump.assign(n, 0.0);
    s.mean_v.assign(n, 0.0);
    s.sd_eta.assign(n, 1.0);
    for (std::size_t k = 0; k < noise.times.size(); ++k) {
        const auto it = std::lower_bound(grid.knots.begin(), grid.knots.end(),
                                         noise.times[k]);
        REQUIRE(it != grid.knots.end());
        REQUIRE(*it == noise.times[k]);
        const std::size_t cell = static_cast<std::size_t>(it - grid.knots.begin()) - 1;
        s.epsilon[cell] = noise.sizes[k] / std::sqrt(grid.dt(cell));
        s.raw_first_jump[cell] = noise.sizes[k];
    }
    return s;
}

Grid grid_with_jumps(double horizon, std::size_t cells, const JumpPath& noise) {
    std::vector<double> knots = Grid::uniform(horizon, cells).knots;
    knots.insert(knots.end(), noise.times.begin(), noise.times.end());
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
    return Grid(std::move(knots));
}

}  // namespace

TEST_CASE("spec construction and padding") {
    const CogarchSpec s(1, 3, {0.05}, {1.5, 0.75, 0.125}, 0.04);
    CHECK(s.a == std::vector<double>{0.05, 0.0, 0.0});
    CHECK_THROWS_AS(CogarchSpec(1, 1, {0.0}, {0.1}, 0.04), DomainError);   // a_p = 0
    CHECK_THROWS_AS(CogarchSpec(1, 1, {0.05}, {0.0}, 0.04), DomainError);  // b_q = 0
    CHECK_THROWS_AS(CogarchSpec(1, 1, {0.05}, {0.1}, 0.0), DomainError);   // alpha0
    CHECK_THROWS_AS(CogarchSpec(2, 1, {0.05, 0.01}, {0.1}, 0.04), ShapeError);
    CHECK_THROWS_AS(CogarchSpec(1, 2, {0.05, 0.01}, {1.0, 0.25}, 0.04), DomainError);
}

TEST_CASE("stationarity check") {
    SUBCASE("q=1 scalar cases") {
        const CogarchSpec ok(1, 1, {0.04}, {0.06}, 0.04);
        CHECK(stationarity_check(ok, 1.0).ok);
        const CogarchSpec bad(1, 1, {0.08}, {0.06}, 0.04);
        const StationarityReport r = stationarity_check(bad, 1.0);
        CHECK_FALSE(r.ok);
        bool found = false;
        for (const auto& reason : r.reasons)
            if (reason.find("b_q - a_1 mu") != std::string::npos) found = true;
        CHECK(found);
    }
    SUBCASE("q=2 eigenvalue oracle") {
        const CogarchSpec s(1, 2, {0.05}, {1.0, 0.3}, 0.04);
        CHECK(stationarity_check(s, 1.0).ok);
        // Btilde = [[0,1],[-0.25,-1]]: double eigenvalue at -0.5 (frozen).
        const auto eig = companion_eigenvalues(s.mean_dynamics(1.0));
        CHECK(max_real_part(eig) == doctest::Approx(-0.5).epsilon(1e-4));
        CHECK(max_real_part(eig) < 0.0);
    }
}

TEST_CASE("stationary mean") {
    const CogarchSpec s(1, 1, {0.038}, {0.053}, 0.04);
    const Vector m = stationary_mean(s, 1.0);
    CHECK(m[0] == doctest::Approx(2.666666666666667).epsilon(1e-12));

    // a_1 = 0 is reachable with p = 2: mean collapses to alpha0*mu/b_q.
    const CogarchSpec s2(2, 2, {0.0, 0.02}, {1.0, 0.25}, 0.04);
    const Vector m2 = stationary_mean(s2, 1.0);
    CHECK(m2[0] == doctest::Approx(0.04 / 0.25).epsilon(1e-12));
    CHECK(m2[1] == 0.0);

    const CogarchSpec tight(1, 1, {0.06}, {0.05}, 0.04);
    CHECK_THROWS_AS(stationary_mean(tight, 1.0), StationarityError);

    SUBCASE("q=2 ergodic-average oracle, 3-sigma band") {
        // long-run Monte Carlo average of the exact path's first component
        const CogarchSpec s(1, 2, {0.05}, {1.0, 0.3}, 0.04);
        const CompoundPoissonSpec noise_spec(1.0, NormalJumps{0.0, 1.0});
        const double horizon = 400.0;
        const Grid grid = Grid::uniform(horizon, 4000);
        std::vector<double> run_means;
        for (int rep = 0; rep < 12; ++rep) {
            const JumpPath noise = sample_jump_path(noise_spec, horizon, 6000 + rep);
            const SimulatedPath p =
                simulate_exact(s, noise, grid, stationary_mean(s, 1.0));
            double acc = 0.0;
            std::size_t count = 0;
            for (std::size_t i = 0; i < p.size(); ++i) {
                if (p.times[i] < 50.0) continue;  // burn-in
                acc += p.Y[i][0];
                ++count;
            }
            run_means.push_back(acc / static_cast<double>(count));
        }
        double mc = 0.0;
        for (double x : run_means) mc += x;
        mc /= static_cast<double>(run_means.size());
        double sd = 0.0;
        for (double x : run_means) sd += (x - mc) * (x - mc);
        sd = std::sqrt(sd / (run_means.size() - 1.0) / run_means.size());
        CHECK(std::abs(mc - stationary_mean(s, 1.0)[0]) <= 3.0 * sd);
    }
}

TEST_CASE("exact simulation") {
    const CogarchSpec spec(1, 1, {0.038}, {0.053}, 0.04);

    SUBCASE("no jumps, zero start: everything flat") {
        const JumpPath empty(10.0, {}, {});
        const SimulatedPath p =
            simulate_exact(spec, empty, Grid::uniform(10.0, 100), Vector(1));
        for (std::size_t i = 0; i < p.size(); ++i) {
            CHECK(p.G[i] == 0.0);
            CHECK(p.V[i] == doctest::Approx(0.04).epsilon(1e-15));
            CHECK(p.Y[i][0] == 0.0);
        }
    }

    SUBCASE("single jump hand computation") {
        const double z = 1.7;
        const JumpPath one(1.0, {0.5}, {z});
        const SimulatedPath p =
            simulate_exact(spec, one, Grid::uniform(1.0, 2), Vector(1));
        // record at the jump time exists
        const auto it = std::find(p.times.begin(), p.times.end(), 0.5);
        REQUIRE(it != p.times.end());
        const std::size_t k = static_cast<std::size_t>(it - p.times.begin());
        CHECK(p.is_jump[k] == 1);
        CHECK(p.Y[k][0] == doctest::Approx(0.04 * z * z).epsilon(1e-14));
        CHECK(p.V[k] ==
              doctest::Approx(0.04 * (1.0 + 0.038 * z * z)).epsilon(1e-14));
        CHECK(p.V_pre[k] == doctest::Approx(0.04).epsilon(1e-14));
        CHECK(p.G[k] == doctest::Approx(std::sqrt(0.04) * z).epsilon(1e-14));
    }

    SUBCASE("q=2 multi-jump path against the Taylor-recursion oracle") {
        const CogarchSpec spec2(1, 2, {0.05}, {1.0, 0.3}, 0.04);
        const JumpPath noise(5.0, {1.1, 3.7}, {0.8, -1.3});
        const SimulatedPath p =
            simulate_exact(spec2, noise, Grid::uniform(5.0, 10), Vector(2));
        for (std::size_t i = 0; i < p.size(); ++i) {
            const OracleState ref = oracle_at(spec2, noise, p.times[i]);
            CHECK(std::abs(p.Y[i][0] - ref.y[0]) < 1e-10);
            CHECK(std::abs(p.Y[i][1] - ref.y[1]) < 1e-10);
            CHECK(std::abs(p.G[i] - ref.g) < 1e-10);
        }
    }

    SUBCASE("horizon mismatch is rejected") {
        const JumpPath empty(10.0, {}, {});
        CHECK_THROWS_AS(simulate_exact(spec, empty, Grid::uniform(9.0, 10), Vector(1)),
                        DomainError);
    }

    SUBCASE("negative variance carries the offending time") {
        // a_1 < 0 fails the admissibility gate but the simulator still runs;
        // a large jump then pushes V below zero.
        const CogarchSpec hostile(1, 1, {-0.9}, {0.05}, 0.04);
        const JumpPath one(1.0, {0.5}, {3.0});
        try {
            simulate_exact(hostile, one, Grid::uniform(1.0, 4), Vector(1));
            FAIL("expected NonnegativityError");
        } catch (const NonnegativityError& e) {
            CHECK(e.time > 0.5);
            CHECK(e.time <= 1.0);
        }
    }
}

TEST_CASE("discrete simulation") {
    const CogarchSpec spec(1, 1, {0.038}, {0.053}, 0.04);

    SUBCASE("all-zero innovations: G constant, Y pure decay") {
        const Grid grid = Grid::uniform(2.0, 20);
        InnovationSeries s{grid, std::vector<double>(20, 0.0),
                           std::vector<double>(20, 0.0), std::vector<double>(20, 0.0),
                           std::vector<double>(20, 1.0), 0.1};
        const Vector y0(std::vector<double>{1.5});
        const SimulatedPath p = simulate_discrete(spec, s, y0);
        double y = 1.5;
        for (std::size_t i = 1; i < p.size(); ++i) {
            CHECK(p.G[i] == 0.0);
            y *= std::exp(-0.053 * grid.dt(i - 1));
            CHECK(p.Y[i][0] == doctest::Approx(y).epsilon(1e-12));
        }
        // with zero start, V stays at alpha0
        const SimulatedPath p0 = simulate_discrete(spec, s, Vector(1));
        for (std::size_t i = 0; i < p0.size(); ++i)
            CHECK(p0.V[i] == doctest::Approx(0.04).epsilon(1e-15));
    }

    SUBCASE("one-cell scalar expansion") {
        const Grid grid(std::vector<double>{0.0, 0.25});
        const double eps = 1.4;
        InnovationSeries s{grid, {eps}, {eps * 0.5}, {0.0}, {1.0}, 0.1};
        const double y0v = 0.7;
        const SimulatedPath p =
            simulate_discrete(spec, s, Vector(std::vector<double>{y0v}));
        const double w = eps * eps * 0.25;
        const double expected = (1.0 + w * 0.038) * std::exp(-0.053 * 0.25) * y0v +
                                0.04 * w;
        CHECK(p.Y[1][0] == doctest::Approx(expected).epsilon(1e-12));
        CHECK(p.G[1] ==
              doctest::Approx(std::sqrt((0.04 + 0.038 * y0v) * 0.25) * eps)
                  .epsilon(1e-12));
    }

    SUBCASE("p=q=1 reduction to the scalar scheme") {
        Rng rng(99);
        const Grid grid = Grid::uniform(5.0, 50);
        std::vector<double> eps(50);
        for (double& e : eps) e = rng.normal();
        InnovationSeries s{grid, eps, std::vector<double>(50, 0.0),
                           std::vector<double>(50, 0.0), std::vector<double>(50, 1.0),
                           0.1};
        const SimulatedPath p = simulate_discrete(spec, s, Vector(1));
        double y = 0.0;
        for (std::size_t i = 0; i < 50; ++i) {
            const double dt = grid.dt(i);
            const double w = eps[i] * eps[i] * dt;
            y = (1.0 + 0.038 * w) * std::exp(-0.053 * dt) * y + 0.04 * w;
            CHECK(std::abs(p.Y[i + 1][0] - y) <= 1e-12 * std::max(1.0, std::abs(y)));
        }
    }

    SUBCASE("negative variance aborts the recursion") {
        const CogarchSpec hostile(1, 1, {-0.9}, {0.05}, 0.04);
        const Grid grid = Grid::uniform(1.0, 4);
        InnovationSeries s{grid, {4.0, 0.0, 0.0, 0.0}, {1.0, 0.0, 0.0, 0.0},
                           std::vector<double>(4, 0.0), std::vector<double>(4, 1.0), 0.1};
        CHECK_THROWS_AS(simulate_discrete(hostile, s, Vector(1)), NonnegativityError);
    }

    SUBCASE("prefix measurability: rerun on truncated innovations") {
        Rng rng(123);
        const CompoundPoissonSpec noise_spec(1.0, NormalJumps{0.0, 1.0});
        const JumpPath path = sample_jump_path(noise_spec, 10.0, 7u);
        const Grid grid = Grid::uniform(10.0, 100);
        const InnovationSeries s = first_jump_innovations(path, grid, 0.2, noise_spec);
        const CogarchSpec spec2(1, 1, {0.038}, {0.053}, 0.04);
        const SimulatedPath full = simulate_discrete(spec2, s, Vector(1));

        const std::size_t keep = 40;
        InnovationSeries prefix{
            Grid(std::vector<double>(grid.knots.begin(), grid.knots.begin() + keep + 1)),
            std::vector<double>(s.epsilon.begin(), s.epsilon.begin() + keep),
            std::vector<double>(s.raw_first_jump.begin(), s.raw_first_jump.begin() + keep),
            std::vector<double>(s.mean_v.begin(), s.mean_v.begin() + keep),
            std::vector<double>(s.sd_eta.begin(), s.sd_eta.begin() + keep),
            s.threshold_m};
        const SimulatedPath head = simulate_discrete(spec2, prefix, Vector(1));
        for (std::size_t i = 0; i <= keep; ++i) {
            CHECK(head.G[i] == full.G[i]);
            CHECK(head.V[i] == full.V[i]);
            CHECK(head.Y[i][0] == full.Y[i][0]);
        }
    }
}

TEST_CASE("jump-aligned equivalence across random specs") {
    Rng rng(2024);
    const CompoundPoissonSpec noise_spec(1.0, NormalJumps{0.0, 1.0});
    for (int rep = 0; rep < 15; ++rep) {
        const std::size_t q = 1 + rep % 3;
        const CogarchSpec spec = random_stable_spec(1, q, rng);
        const JumpPath noise = sample_jump_path(noise_spec, 5.0, 500 + rep);
        const Grid grid = grid_with_jumps(5.0, 25, noise);

        std::vector<double> jump_at_knot(grid.knots.size(), 0.0);
        for (std::size_t k = 0; k < noise.times.size(); ++k) {
            const auto it =
                std::lower_bound(grid.knots.begin(), grid.knots.end(), noise.times[k]);
            jump_at_knot[static_cast<std::size_t>(it - grid.knots.begin())] =
                noise.sizes[k];
        }
        const Vector y0 = stationary_mean(spec, 1.0);
        const std::vector<Vector> oracle =
            aligned_recursion_oracle(spec, grid, jump_at_knot, y0);

        const SimulatedPath disc =
            simulate_discrete(spec, aligned_innovations(grid, noise), y0);
        const SimulatedPath exact =
            simulate_exact(spec, noise, grid, y0);

        REQUIRE(disc.size() == grid.knots.size());
        REQUIRE(exact.size() == grid.knots.size());
        for (std::size_t i = 0; i < grid.knots.size(); ++i) {
            CHECK(max_abs_diff(disc.Y[i], oracle[i]) < 1e-10);
            CHECK(max_abs_diff(exact.Y[i], oracle[i]) < 1e-10);
            CHECK(std::abs(disc.V[i] - exact.V[i]) < 1e-10);
        }
    }
}

TEST_CASE("identity V = alpha0 + a'Y holds on every record") {
    Rng rng(31);
    const CompoundPoissonSpec noise_spec(1.5, NormalJumps{0.1, 0.8});
    for (int rep = 0; rep < 5; ++rep) {
        const CogarchSpec spec = random_stable_spec(1, 2, rng);
        const JumpPath noise = sample_jump_path(noise_spec, 8.0, 900 + rep);
        const SimulatedPath exact =
            simulate_exact(spec, noise, Grid::uniform(8.0, 80),
                           stationary_mean(spec, levy_moments(noise_spec).mu_second));
        for (std::size_t i = 0; i < exact.size(); ++i)
            CHECK(std::abs(exact.V[i] - (spec.alpha0 + dot(spec.a_vec(), exact.Y[i]))) <
                  1e-10);

        const InnovationSeries innov = first_jump_innovations(
            noise, Grid::uniform(8.0, 40), 0.25, noise_spec);
        const SimulatedPath disc = simulate_discrete(spec, innov, Vector(2));
        for (std::size_t i = 0; i < disc.size(); ++i)
            CHECK(std::abs(disc.V[i] - (spec.alpha0 + dot(spec.a_vec(), disc.Y[i]))) <
                  1e-10);
    }
}

TEST_CASE("no-noise decay matches the spectral rate") {
    const CogarchSpec spec(1, 2, {0.05}, {1.0, 0.3}, 0.04);
    const JumpPath empty(100.0, {}, {});
    const Vector y0(std::vector<double>{1.0, 0.5});
    const SimulatedPath p =
        simulate_exact(spec, empty, Grid(std::vector<double>{0.0, 10.0, 50.0, 100.0}), y0);
    const double n10 = p.Y[1].norm(), n50 = p.Y[2].norm(), n100 = p.Y[3].norm();
    CHECK(n50 < n10);
    CHECK(n100 < n50);
    // decay rate bounded by the slowest eigenvalue of B
    const double rate = max_real_part(companion_eigenvalues(spec.companion()));
    CHECK(rate < 0.0);
    CHECK(n100 <= 10.0 * y0.norm() * std::exp(rate * 50.0));
    CHECK(p.G.back() == 0.0);
}
