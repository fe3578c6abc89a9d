#include "cogarch/levy.hpp"

#include <algorithm>
#include <cmath>

namespace cogarch {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z * 0.70710678118654752440); }

// Upper-tail partial moments of J ~ N(mean, sd^2) over {J > c}:
// P, E[J*1], E[J^2*1], from the standard Mills-ratio identities.
void normal_upper_moments(double mean, double sd, double c, double& p, double& m1,
                          double& m2) {
    const double alpha = (c - mean) / sd;
    const double q = 1.0 - normal_cdf(alpha);
    const double phi = normal_pdf(alpha);
    p = q;
    m1 = mean * q + sd * phi;
    m2 = (mean * mean + sd * sd) * q + sd * (mean + c) * phi;
}

// Lower-tail counterparts over {J < c}.
void normal_lower_moments(double mean, double sd, double c, double& p, double& m1,
                          double& m2) {
    const double alpha = (c - mean) / sd;
    const double q = normal_cdf(alpha);
    const double phi = normal_pdf(alpha);
    p = q;
    m1 = mean * q - sd * phi;
    m2 = (mean * mean + sd * sd) * q - sd * (mean + c) * phi;
}

void validate_dist(const JumpDist& dist) {
    if (const auto* n = std::get_if<NormalJumps>(&dist)) {
        if (!(n->sd > 0.0) || !std::isfinite(n->sd) || !std::isfinite(n->mean))
            throw DomainError("normal jump distribution needs finite mean and sd > 0");
    } else {
        const auto& t = std::get<TwoPointJumps>(dist);
        if (!std::isfinite(t.x1) || !std::isfinite(t.x2) || t.x1 == 0.0 || t.x2 == 0.0)
            throw DomainError("two-point jump values must be finite and nonzero");
        if (!(t.p1 > 0.0) || !(t.p1 < 1.0))
            throw DomainError("two-point probability must lie in (0,1)");
        if (t.x1 == t.x2) throw DomainError("two-point jump values must differ");
    }
}

double sample_jump(const JumpDist& dist, Rng& rng) {
    if (const auto* n = std::get_if<NormalJumps>(&dist)) return rng.normal(n->mean, n->sd);
    const auto& t = std::get<TwoPointJumps>(dist);
    return rng.uniform() < t.p1 ? t.x1 : t.x2;
}

}  // namespace

CompoundPoissonSpec::CompoundPoissonSpec(double rate_, JumpDist jumps_)
    : rate(rate_), jumps(std::move(jumps_)) {
    if (!(rate > 0.0) || !std::isfinite(rate))
        throw DomainError("compound Poisson rate must be positive and finite");
    validate_dist(jumps);
}

JumpPath::JumpPath(double horizon_, std::vector<double> times_, std::vector<double> sizes_)
    : horizon(horizon_), times(std::move(times_)), sizes(std::move(sizes_)) {
    if (!(horizon > 0.0)) throw DomainError("jump path horizon must be positive");
    if (times.size() != sizes.size()) throw ShapeError("jump times/sizes length mismatch");
    double prev = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] > prev) || times[i] > horizon)
            throw DomainError("jump times must be strictly increasing within (0, T]");
        if (!std::isfinite(sizes[i])) throw DomainError("jump sizes must be finite");
        prev = times[i];
    }
}

Grid::Grid(std::vector<double> knots_) : knots(std::move(knots_)) {
    if (knots.size() < 2) throw ShapeError("grid needs at least two knots");
    if (knots.front() != 0.0) throw DomainError("grid must start at 0");
    for (std::size_t i = 1; i < knots.size(); ++i)
        if (!(knots[i] > knots[i - 1]) || !std::isfinite(knots[i]))
            throw DomainError("grid knots must be finite and strictly increasing");
}

Grid Grid::uniform(double horizon, std::size_t n_cells) {
    if (!(horizon > 0.0)) throw DomainError("grid horizon must be positive");
    if (n_cells == 0) throw ShapeError("grid needs at least one cell");
    std::vector<double> knots(n_cells + 1);
    for (std::size_t i = 0; i <= n_cells; ++i)
        knots[i] = horizon * static_cast<double>(i) / static_cast<double>(n_cells);
    knots.front() = 0.0;
    knots.back() = horizon;
    return Grid(std::move(knots));
}

double Grid::mesh() const {
    double m = 0.0;
    for (std::size_t i = 1; i < knots.size(); ++i) m = std::max(m, knots[i] - knots[i - 1]);
    return m;
}

TruncatedJumpMoments truncated_moments(const JumpDist& dist, double m) {
    if (m < 0.0) throw DomainError("truncation threshold must be >= 0");
    validate_dist(dist);
    TruncatedJumpMoments out{0.0, 0.0, 0.0};
    if (const auto* n = std::get_if<NormalJumps>(&dist)) {
        double pu, m1u, m2u, pl, m1l, m2l;
        normal_upper_moments(n->mean, n->sd, m, pu, m1u, m2u);
        normal_lower_moments(n->mean, n->sd, -m, pl, m1l, m2l);
        out.prob = pu + pl;
        out.first = m1u + m1l;
        out.second = m2u + m2l;
    } else {
        const auto& t = std::get<TwoPointJumps>(dist);
        const double p2 = 1.0 - t.p1;
        if (std::abs(t.x1) > m) {
            out.prob += t.p1;
            out.first += t.p1 * t.x1;
            out.second += t.p1 * t.x1 * t.x1;
        }
        if (std::abs(t.x2) > m) {
            out.prob += p2;
            out.first += p2 * t.x2;
            out.second += p2 * t.x2 * t.x2;
        }
    }
    return out;
}

LevyMoments levy_moments(const CompoundPoissonSpec& spec) {
    const TruncatedJumpMoments all = truncated_moments(spec.jumps, 0.0);
    LevyMoments out;
    out.mean_l1 = spec.rate * all.first;
    out.var_l1 = spec.rate * all.second;
    out.mu_second = spec.rate * all.second;
    return out;
}

double tail_mass(const CompoundPoissonSpec& spec, double m) {
    if (m < 0.0) throw DomainError("tail mass threshold must be >= 0");
    return spec.rate * truncated_moments(spec.jumps, m).prob;
}

JumpPath sample_jump_path(const CompoundPoissonSpec& spec, double horizon, Rng& rng) {
    if (!(horizon > 0.0)) throw DomainError("simulation horizon must be positive");
    const std::uint64_t count = rng.poisson(spec.rate * horizon);
    std::vector<double> times(count);
    for (auto& t : times) t = horizon * rng.uniform();
    std::sort(times.begin(), times.end());
    // Ties have probability zero; nudge defensively so the path invariant holds.
    for (std::size_t i = 1; i < times.size(); ++i)
        if (times[i] <= times[i - 1])
            times[i] = std::nextafter(times[i - 1], horizon + 1.0);
    std::vector<double> sizes(count);
    for (auto& s : sizes) s = sample_jump(spec.jumps, rng);
    return JumpPath(horizon, std::move(times), std::move(sizes));
}

JumpPath sample_jump_path(const CompoundPoissonSpec& spec, double horizon,
                          std::uint64_t seed) {
    Rng rng(seed);
    return sample_jump_path(spec, horizon, rng);
}

double truncation_sequence(std::size_t n, const TruncationSchedule& schedule) {
    if (!(schedule.c > 0.0) || schedule.c > 1.0)
        throw DomainError("truncation scale c must lie in (0, 1]");
    if (!(schedule.gamma > 0.0)) throw DomainError("truncation decay gamma must be > 0");
    return schedule.c * std::pow(1.0 + static_cast<double>(n), -schedule.gamma);
}

std::vector<FirstJump> first_qualifying_jumps(const JumpPath& path, const Grid& grid,
                                              double m) {
    if (std::abs(grid.horizon() - path.horizon) > 1e-12 * std::max(1.0, path.horizon))
        throw DomainError("grid horizon does not match jump path horizon");
    const std::size_t n_cells = grid.cells();
    std::vector<FirstJump> out(n_cells);
    std::size_t j = 0;
    for (std::size_t i = 0; i < n_cells; ++i) {
        const double lo = grid.knots[i];
        const double hi = grid.knots[i + 1];
        while (j < path.times.size() && path.times[j] < lo) ++j;
        std::size_t k = j;
        while (k < path.times.size() && path.times[k] < hi) {
            if (std::abs(path.sizes[k]) > m) {
                out[i].present = true;
                out[i].time = path.times[k];
                out[i].size = path.sizes[k];
                break;
            }
            ++k;
        }
    }
    return out;
}

InnovationSeries first_jump_innovations(const JumpPath& path, const Grid& grid, double m,
                                        const CompoundPoissonSpec& spec) {
    if (!(m > 0.0)) throw DomainError("truncation threshold m must be positive");
    const TruncatedJumpMoments trunc = truncated_moments(spec.jumps, m);
    if (!(trunc.prob > 0.0))
        throw DomainError("threshold m removes all jump mass; eta would be zero");
    const double pi_bar = spec.rate * trunc.prob;
    const double cond_mean = trunc.first / trunc.prob;
    const double cond_second = trunc.second / trunc.prob;

    const std::vector<FirstJump> firsts = first_qualifying_jumps(path, grid, m);
    const std::size_t n_cells = grid.cells();

    InnovationSeries series{grid, {}, {}, {}, {}, m};
    series.epsilon.resize(n_cells);
    series.raw_first_jump.resize(n_cells);
    series.mean_v.resize(n_cells);
    series.sd_eta.resize(n_cells);

    for (std::size_t i = 0; i < n_cells; ++i) {
        const double p = -std::expm1(-grid.dt(i) * pi_bar);
        const double v = p * cond_mean;
        const double eta_sq = p * cond_second - v * v;
        if (!(eta_sq > 0.0))
            throw NumericalError("innovation standardizer eta degenerated");
        const double eta = std::sqrt(eta_sq);
        const double raw = firsts[i].present ? firsts[i].size : 0.0;
        series.raw_first_jump[i] = raw;
        series.mean_v[i] = v;
        series.sd_eta[i] = eta;
        series.epsilon[i] = (raw - v) / eta;
    }
    return series;
}

}  // namespace cogarch
