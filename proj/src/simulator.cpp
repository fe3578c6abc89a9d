#include "cogarch/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <unordered_map>

namespace cogarch {

namespace {

// expm cache keyed by the bit pattern of dt; uniform grids hit one entry.
class ExpmCache {
public:
    explicit ExpmCache(const Matrix& base) : base_(base) {}

    const Matrix& at(double dt) {
        std::uint64_t key;
        static_assert(sizeof(key) == sizeof(dt));
        std::memcpy(&key, &dt, sizeof(key));
        auto it = cache_.find(key);
        if (it == cache_.end()) it = cache_.emplace(key, expm(base_, dt)).first;
        return it->second;
    }

private:
    Matrix base_;
    std::unordered_map<std::uint64_t, Matrix> cache_;
};

}  // namespace

CogarchSpec::CogarchSpec(std::size_t p_, std::size_t q_, std::vector<double> a_,
                         std::vector<double> b_, double alpha0_)
    : p(p_), q(q_), a(std::move(a_)), b(std::move(b_)), alpha0(alpha0_) {
    if (p < 1 || q < p) throw ShapeError("orders must satisfy 1 <= p <= q");
    if (b.size() != q) throw ShapeError("b must have length q");
    if (a.size() == p) {
        a.resize(q, 0.0);
    } else if (a.size() == q) {
        for (std::size_t k = p; k < q; ++k)
            if (a[k] != 0.0) throw DomainError("a_{p+1}..a_q must be zero");
    } else {
        throw ShapeError("a must have length p (or q with zero padding)");
    }
    for (double x : a)
        if (!std::isfinite(x)) throw DomainError("a coefficients must be finite");
    for (double x : b)
        if (!std::isfinite(x)) throw DomainError("b coefficients must be finite");
    if (!(alpha0 > 0.0) || !std::isfinite(alpha0))
        throw DomainError("alpha0 must be positive and finite");
    if (a[p - 1] == 0.0) throw DomainError("a_p must be nonzero (degenerate order p)");
    if (b[q - 1] == 0.0) throw DomainError("b_q must be nonzero (degenerate order q)");
}

Matrix CogarchSpec::mean_dynamics(double mu) const {
    Matrix m = companion();
    for (std::size_t j = 0; j < q; ++j) m(q - 1, j) += mu * a[j];
    return m;
}

StationarityReport stationarity_check(const CogarchSpec& spec, double mu) {
    if (!(mu > 0.0)) throw DomainError("mu must be positive");
    StationarityReport report;
    auto fail = [&](const std::string& why) {
        report.ok = false;
        report.reasons.push_back(why);
    };

    for (std::size_t k = 0; k < spec.q; ++k) {
        if (spec.a[k] < 0.0) {
            fail("a_" + std::to_string(k + 1) + " < 0");
        }
        if (!(spec.b[k] > 0.0)) {
            fail("b_" + std::to_string(k + 1) + " <= 0");
        }
    }
    if (!(spec.b[spec.q - 1] - spec.a[0] * mu > 0.0)) fail("b_q - a_1 mu <= 0");

    const double re_b = max_real_part(companion_eigenvalues(spec.companion()));
    if (!(re_b < 0.0)) fail("B has an eigenvalue with nonnegative real part");
    const double re_bt = max_real_part(companion_eigenvalues(spec.mean_dynamics(mu)));
    if (!(re_bt < 0.0)) fail("B + mu ea^T has an eigenvalue with nonnegative real part");

    return report;
}

Vector stationary_mean(const CogarchSpec& spec, double mu) {
    if (!(mu > 0.0)) throw DomainError("mu must be positive");
    const double denom = spec.b[spec.q - 1] - spec.a[0] * mu;
    if (!(denom > 0.0)) throw StationarityError("b_q - a_1 mu <= 0: no stationary mean");
    Vector out(spec.q);
    out[0] = spec.alpha0 * mu / denom;
    return out;
}

SimulatedPath simulate_exact(const CogarchSpec& spec, const JumpPath& noise,
                             const Grid& sample_grid, std::optional<Vector> y0,
                             double mu) {
    if (std::abs(sample_grid.horizon() - noise.horizon) >
        1e-12 * std::max(1.0, noise.horizon))
        throw DomainError("sample grid horizon does not match noise horizon");

    const StationarityReport stat = stationarity_check(spec, mu);
    Vector y = y0 ? *y0
                  : (stat.ok ? stationary_mean(spec, mu) : Vector(spec.q));
    if (y.dim() != spec.q) throw ShapeError("initial state dimension != q");

    // Record times: grid knots union jump times, jump flags attached.
    struct Event {
        double t;
        bool jump;
        double size;
    };
    std::vector<Event> events;
    events.reserve(sample_grid.knots.size() + noise.times.size());
    {
        std::size_t gi = 0, ji = 0;
        while (gi < sample_grid.knots.size() || ji < noise.times.size()) {
            if (ji >= noise.times.size() ||
                (gi < sample_grid.knots.size() &&
                 sample_grid.knots[gi] < noise.times[ji])) {
                events.push_back({sample_grid.knots[gi], false, 0.0});
                ++gi;
            } else if (gi >= sample_grid.knots.size() ||
                       noise.times[ji] < sample_grid.knots[gi]) {
                events.push_back({noise.times[ji], true, noise.sizes[ji]});
                ++ji;
            } else {  // jump exactly on a grid knot
                events.push_back({sample_grid.knots[gi], true, noise.sizes[ji]});
                ++gi;
                ++ji;
            }
        }
    }

    SimulatedPath path{PathKind::Exact, spec};
    path.stationarity_ok = stat.ok;
    const std::size_t n = events.size();
    path.times.reserve(n);
    path.G.reserve(n);
    path.V.reserve(n);
    path.V_pre.reserve(n);
    path.is_jump.reserve(n);
    path.Y.reserve(n);

    ExpmCache propagator(spec.companion());
    const Vector a_vec = spec.a_vec();

    double g = 0.0;
    double t_prev = 0.0;
    for (const Event& ev : events) {
        const double dt = ev.t - t_prev;
        if (dt > 0.0) y = propagator.at(dt) * y;
        t_prev = ev.t;

        const double v_pre = spec.alpha0 + dot(a_vec, y);
        if (v_pre < 0.0)
            throw NonnegativityError("variance went negative at t=" + std::to_string(ev.t),
                                     ev.t);
        double v_post = v_pre;
        if (ev.jump) {
            g += std::sqrt(v_pre) * ev.size;
            const double z = ev.size * ev.size;
            y[spec.q - 1] += z * v_pre;  // Y += dL^2 * V_- * e
            v_post = spec.alpha0 + dot(a_vec, y);
        }

        path.times.push_back(ev.t);
        path.G.push_back(g);
        path.V.push_back(v_post);
        path.V_pre.push_back(v_pre);
        path.is_jump.push_back(ev.jump ? 1 : 0);
        path.Y.push_back(y);
    }
    return path;
}

SimulatedPath simulate_discrete(const CogarchSpec& spec, const InnovationSeries& innov,
                                const Vector& y0) {
    if (y0.dim() != spec.q) throw ShapeError("initial state dimension != q");
    const Grid& grid = innov.grid;
    const std::size_t n_cells = grid.cells();
    if (innov.epsilon.size() != n_cells)
        throw ShapeError("innovation series does not match its grid");

    SimulatedPath path{PathKind::Discrete, spec};
    path.times.reserve(n_cells + 1);
    path.G.reserve(n_cells + 1);
    path.V.reserve(n_cells + 1);
    path.V_pre.reserve(n_cells + 1);
    path.is_jump.reserve(n_cells + 1);
    path.Y.reserve(n_cells + 1);

    ExpmCache propagator(spec.companion());
    const Vector a_vec = spec.a_vec();

    Vector y = y0;
    double g = 0.0;
    double v = spec.alpha0 + dot(a_vec, y);

    path.times.push_back(grid.knots[0]);
    path.G.push_back(g);
    path.V.push_back(v);
    path.V_pre.push_back(v);
    path.is_jump.push_back(0);
    path.Y.push_back(y);

    for (std::size_t i = 0; i < n_cells; ++i) {
        const double dt = grid.dt(i);
        if (v < 0.0)
            throw NonnegativityError(
                "discrete variance went negative at t=" + std::to_string(grid.knots[i]),
                grid.knots[i]);
        const double eps = innov.epsilon[i];
        g += std::sqrt(v * dt) * eps;

        const double w = eps * eps * dt;
        Vector u = propagator.at(dt) * y;
        u[spec.q - 1] += w * (dot(a_vec, u) + spec.alpha0);
        y = u;
        v = spec.alpha0 + dot(a_vec, y);

        path.times.push_back(grid.knots[i + 1]);
        path.G.push_back(g);
        path.V.push_back(v);
        path.V_pre.push_back(v);
        path.is_jump.push_back(innov.raw_first_jump[i] != 0.0 ? 1 : 0);
        path.Y.push_back(y);
    }
    return path;
}

}  // namespace cogarch
