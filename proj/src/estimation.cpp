#include "cogarch/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <unordered_map>

namespace cogarch {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454836;
constexpr double kPenaltyScale = 1e10;
constexpr double kRejected = -1e300;
constexpr double kTransformBound = 30.0;

std::uint64_t bits_of(double x) {
    std::uint64_t k;
    std::memcpy(&k, &x, sizeof(k));
    return k;
}

// Per-dt quantities of the conditional-variance formula and the filter.
struct StepKernel {
    std::vector<double> row;  // a^T e^{Bt dt} Bt^{-1} (I - e^{-Bt dt}) as a row
    Matrix propagator;        // e^{B dt}
};

class FilterEngine {
public:
    FilterEngine(const CogarchSpec& spec, double mu, double el1sq)
        : spec_(spec),
          mu_(mu),
          el1sq_(el1sq),
          denom_(spec.b[spec.q - 1] - spec.a[0] * mu),
          b_(spec.companion()),
          bt_(spec.mean_dynamics(mu)),
          bt_inv_(inverse(bt_)),
          mean_(stationary_mean(spec, mu)) {}

    const Vector& stationary() const { return mean_; }

    double variance(double dt, const Vector& y_prev) {
        const StepKernel& k = kernel(dt);
        double dev_term = 0.0;
        for (std::size_t i = 0; i < spec_.q; ++i)
            dev_term += k.row[i] * (y_prev[i] - mean_[i]);
        return el1sq_ * (spec_.alpha0 * dt * spec_.b[spec_.q - 1] / denom_ + dev_term);
    }

    // In-place observation-driven state step; returns false when the
    // variance denominator degenerates.
    bool advance(Vector& y, double dG, double dt) {
        const double v = spec_.alpha0 + a_dot(y);
        if (!(v > 0.0)) return false;
        const double w = dG * dG / v;
        Vector u = kernel(dt).propagator * y;
        u[spec_.q - 1] += w * (a_dot(u) + spec_.alpha0);
        y = u;
        return true;
    }

private:
    double a_dot(const Vector& y) const {
        double s = 0.0;
        for (std::size_t i = 0; i < spec_.q; ++i) s += spec_.a[i] * y[i];
        return s;
    }

    const StepKernel& kernel(double dt) {
        auto it = kernels_.find(bits_of(dt));
        if (it != kernels_.end()) return it->second;
        StepKernel k{std::vector<double>(spec_.q, 0.0), expm(b_, dt)};
        const Matrix e_fwd = expm(bt_, dt);
        const Matrix e_bwd = expm(bt_, -dt);
        // row = a^T * e_fwd * bt_inv * (I - e_bwd)
        Vector w(spec_.q);
        for (std::size_t i = 0; i < spec_.q; ++i) w[i] = spec_.a[i];
        w = e_fwd.transpose() * w;
        w = bt_inv_.transpose() * w;
        Vector w2 = e_bwd.transpose() * w;
        for (std::size_t i = 0; i < spec_.q; ++i) k.row[i] = w[i] - w2[i];
        return kernels_.emplace(bits_of(dt), std::move(k)).first->second;
    }

    CogarchSpec spec_;
    double mu_, el1sq_, denom_;
    Matrix b_, bt_, bt_inv_;
    Vector mean_;
    std::unordered_map<std::uint64_t, StepKernel> kernels_;
};

double binomial(std::size_t n, std::size_t k) {
    double r = 1.0;
    for (std::size_t i = 0; i < k; ++i)
        r = r * static_cast<double>(n - i) / static_cast<double>(i + 1);
    return r;
}

// ---------------------------------------------------------------------------
// Nelder-Mead simplex (maximization), classic coefficients, with a running
// best-so-far trace.
// ---------------------------------------------------------------------------

struct SimplexOutcome {
    std::vector<double> x;
    double value = kRejected;
    std::size_t iterations = 0;
    bool converged = false;
};

template <typename F>
SimplexOutcome nelder_mead_max(F&& objective, const std::vector<double>& x0, double step,
                               std::size_t max_iter, double tol,
                               std::vector<double>* trace) {
    const std::size_t d = x0.size();
    std::vector<std::vector<double>> xs(d + 1, x0);
    for (std::size_t i = 0; i < d; ++i) xs[i + 1][i] += step;
    std::vector<double> fs(d + 1);
    for (std::size_t i = 0; i <= d; ++i) fs[i] = objective(xs[i]);

    auto record = [&](double best) {
        if (!trace) return;
        if (trace->empty() || best > trace->back())
            trace->push_back(best);
        else
            trace->push_back(trace->back());
    };

    SimplexOutcome out;
    std::vector<std::size_t> order(d + 1);
    for (; out.iterations < max_iter; ++out.iterations) {
        for (std::size_t i = 0; i <= d; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return fs[a] > fs[b]; });
        const std::size_t best = order[0], worst = order[d], second = order[d - 1];
        record(fs[best]);

        if (std::abs(fs[best] - fs[worst]) <=
            tol * (std::abs(fs[best]) + 1e-12)) {
            out.converged = true;
            break;
        }

        std::vector<double> centroid(d, 0.0);
        for (std::size_t i = 0; i <= d; ++i) {
            if (i == worst) continue;
            for (std::size_t j = 0; j < d; ++j) centroid[j] += xs[i][j];
        }
        for (double& c : centroid) c /= static_cast<double>(d);

        auto blend = [&](double coef) {
            std::vector<double> x(d);
            for (std::size_t j = 0; j < d; ++j)
                x[j] = centroid[j] + coef * (centroid[j] - xs[worst][j]);
            return x;
        };

        std::vector<double> xr = blend(1.0);
        const double fr = objective(xr);
        if (fr > fs[best]) {
            std::vector<double> xe = blend(2.0);
            const double fe = objective(xe);
            if (fe > fr) {
                xs[worst] = std::move(xe);
                fs[worst] = fe;
            } else {
                xs[worst] = std::move(xr);
                fs[worst] = fr;
            }
            continue;
        }
        if (fr > fs[second]) {
            xs[worst] = std::move(xr);
            fs[worst] = fr;
            continue;
        }
        std::vector<double> xc = blend(fr > fs[worst] ? 0.5 : -0.5);
        const double fc = objective(xc);
        if (fc > std::max(fr, fs[worst])) {
            xs[worst] = std::move(xc);
            fs[worst] = fc;
            continue;
        }
        // shrink toward the best vertex
        for (std::size_t i = 0; i <= d; ++i) {
            if (i == best) continue;
            for (std::size_t j = 0; j < d; ++j)
                xs[i][j] = xs[best][j] + 0.5 * (xs[i][j] - xs[best][j]);
            fs[i] = objective(xs[i]);
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i <= d; ++i)
        if (fs[i] > fs[best]) best = i;
    record(fs[best]);
    out.x = xs[best];
    out.value = fs[best];
    return out;
}

// theta = (log alpha0, log a_1..a_p, log b_1..b_q)
CogarchSpec spec_from_theta(const std::vector<double>& theta, std::size_t p,
                            std::size_t q) {
    std::vector<double> a(p), b(q);
    for (std::size_t i = 0; i < p; ++i) a[i] = std::exp(theta[1 + i]);
    for (std::size_t i = 0; i < q; ++i) b[i] = std::exp(theta[1 + p + i]);
    return CogarchSpec(p, q, std::move(a), std::move(b), std::exp(theta[0]));
}

std::vector<double> theta_from_spec(const CogarchSpec& spec) {
    std::vector<double> theta;
    theta.push_back(std::log(spec.alpha0));
    for (std::size_t i = 0; i < spec.p; ++i) theta.push_back(std::log(spec.a[i]));
    for (std::size_t i = 0; i < spec.q; ++i) theta.push_back(std::log(spec.b[i]));
    return theta;
}

}  // namespace

ObservedSeries::ObservedSeries(std::vector<double> times_, std::vector<double> increments_)
    : times(std::move(times_)), increments(std::move(increments_)) {
    if (times.size() < 2) throw ShapeError("observed series needs at least two times");
    if (increments.size() + 1 != times.size())
        throw ShapeError("increments must have one entry per time step");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]) || !std::isfinite(times[i]))
            throw DomainError("observation times must be finite and strictly increasing");
    for (double dg : increments)
        if (!std::isfinite(dg)) throw DomainError("increments must be finite");
}

ObservedSeries ObservedSeries::from_levels(const std::vector<double>& times,
                                           const std::vector<double>& levels) {
    if (times.size() != levels.size()) throw ShapeError("times/levels length mismatch");
    if (times.size() < 2) throw ShapeError("need at least two level observations");
    std::vector<double> inc(times.size() - 1);
    for (std::size_t i = 1; i < times.size(); ++i) inc[i - 1] = levels[i] - levels[i - 1];
    return ObservedSeries(times, std::move(inc));
}

double ObservedSeries::sample_variance() const {
    const std::size_t n = increments.size();
    if (n < 2) return 0.0;
    double mean = 0.0;
    for (double x : increments) mean += x;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double x : increments) ss += (x - mean) * (x - mean);
    return ss / static_cast<double>(n - 1);
}

double cond_variance(const CogarchSpec& spec, double dt, const Vector& y_prev, double mu,
                     double el1sq, double floor) {
    if (!(dt > 0.0)) throw DomainError("dt must be positive");
    if (y_prev.dim() != spec.q) throw ShapeError("state dimension != q");
    FilterEngine engine(spec, mu, el1sq);  // throws on b_q - a_1 mu <= 0 / singular Bt
    return std::max(engine.variance(dt, y_prev), floor);
}

Vector state_update(const CogarchSpec& spec, const Vector& y_prev, double dG, double dt) {
    if (!(dt > 0.0)) throw DomainError("dt must be positive");
    if (y_prev.dim() != spec.q) throw ShapeError("state dimension != q");
    const Vector a_vec = spec.a_vec();
    const double v = spec.alpha0 + dot(a_vec, y_prev);
    if (!(v > 0.0))
        throw FilterDegeneracyError("alpha0 + a^T Y <= 0: filter denominator degenerated");
    const double w = dG * dG / v;
    Vector u = expm(spec.companion(), dt) * y_prev;
    u[spec.q - 1] += w * (dot(a_vec, u) + spec.alpha0);
    return u;
}

LoglikDetail pseudo_loglik_detailed(const CogarchSpec& spec, const ObservedSeries& series,
                                    double mu, double el1sq,
                                    InitialStatePolicy y0_policy) {
    const double ninf = -std::numeric_limits<double>::infinity();
    LoglikDetail out{ninf, 0, false};

    const double floor = 1e-12 * series.sample_variance();

    try {
        FilterEngine engine(spec, mu, el1sq);
        Vector y = (y0_policy == InitialStatePolicy::StationaryMean) ? engine.stationary()
                                                                     : Vector(spec.q);
        double ll = 0.0;
        const std::size_t n = series.count();
        for (std::size_t i = 0; i < n; ++i) {
            const double dt = series.times[i + 1] - series.times[i];
            const double dg = series.increments[i];
            double s2 = engine.variance(dt, y);
            if (s2 < floor) {
                s2 = floor;
                ++out.clamp_events;
            }
            if (!(s2 > 0.0) || !std::isfinite(s2)) return out;
            ll -= 0.5 * (dg * dg / s2 + std::log(s2));
            if (!engine.advance(y, dg, dt)) return out;
        }
        ll -= 0.5 * static_cast<double>(n) * kLogTwoPi;
        if (!std::isfinite(ll)) return out;
        out.value = ll;
        out.valid = true;
    } catch (const StationarityError&) {
        return out;
    } catch (const NumericalError&) {
        return out;
    }
    return out;
}

double pseudo_loglik(const CogarchSpec& spec, const ObservedSeries& series, double mu,
                     double el1sq, InitialStatePolicy y0_policy) {
    return pseudo_loglik_detailed(spec, series, mu, el1sq, y0_policy).value;
}

CogarchSpec initial_point(const ObservedSeries& series, std::size_t p, std::size_t q) {
    if (p < 1 || q < p) throw ShapeError("orders must satisfy 1 <= p <= q");
    // alpha0 from the variance of increments normalized to unit time.
    std::vector<double> z(series.count());
    for (std::size_t i = 0; i < series.count(); ++i)
        z[i] = series.increments[i] / std::sqrt(series.times[i + 1] - series.times[i]);
    double mean = 0.0;
    for (double x : z) mean += x;
    mean /= static_cast<double>(z.size());
    double var = 0.0;
    for (double x : z) var += (x - mean) * (x - mean);
    var /= static_cast<double>(z.size() > 1 ? z.size() - 1 : 1);
    const double alpha0 = std::max(0.1 * var, 1e-8);

    std::vector<double> a(p);
    for (std::size_t k = 0; k < p; ++k) a[k] = 0.05 * std::pow(0.5, static_cast<double>(k));

    std::vector<double> b(q);
    if (q == 1) {
        b[0] = 0.1;
    } else {
        for (std::size_t k = 1; k <= q; ++k)
            b[k - 1] = binomial(q, k) * std::pow(0.5, static_cast<double>(k));
    }
    return CogarchSpec(p, q, std::move(a), std::move(b), alpha0);
}

EstimationResult estimate(const ObservedSeries& series, std::size_t p, std::size_t q,
                          const EstimateOptions& options) {
    const std::size_t n_params = p + q + 1;
    if (series.count() < 10 * n_params)
        throw DomainError("series too short: need N >= 10*(p+q+1)");

    const CogarchSpec base = options.init ? *options.init : initial_point(series, p, q);
    if (base.p != p || base.q != q)
        throw ShapeError("initial spec orders do not match requested orders");

    const double mu = options.mu;
    const double el1sq = options.el1sq;

    auto objective = [&](const std::vector<double>& theta) -> double {
        double excess = 0.0;
        for (double t : theta) excess += std::max(0.0, std::abs(t) - kTransformBound);
        if (excess > 0.0) return -kPenaltyScale * (1.0 + excess);

        CogarchSpec spec = spec_from_theta(theta, p, q);
        double margin = 0.0;
        const double denom = spec.b[q - 1] - spec.a[0] * mu;
        if (!(denom > 0.0)) margin += 1.0 - denom;
        const double re_b = max_real_part(companion_eigenvalues(spec.companion()));
        if (!(re_b < 0.0)) margin += 1.0 + re_b;
        const double re_bt = max_real_part(companion_eigenvalues(spec.mean_dynamics(mu)));
        if (!(re_bt < 0.0)) margin += 1.0 + re_bt;
        if (margin > 0.0) return -kPenaltyScale * (1.0 + margin);

        const double ll = pseudo_loglik(spec, series, mu, el1sq);
        return std::isfinite(ll) ? ll : kRejected;
    };

    const std::vector<double> theta0 = theta_from_spec(base);
    const std::size_t n_starts = std::max<std::size_t>(1, options.multistart);

    EstimationResult result{base, -std::numeric_limits<double>::infinity(), 0, false,
                            {},   base,
                            options.seed, 0, 0, {}};
    bool any_start = false;

    for (std::size_t s = 0; s < n_starts; ++s) {
        Rng rng(Rng::derive(options.seed, "multistart", s));
        std::vector<double> theta = theta0;
        bool feasible = false;
        for (int attempt = 0; attempt < 20; ++attempt) {
            if (s > 0 || attempt > 0) {
                theta = theta0;
                for (double& t : theta) t += 0.35 * rng.normal();
            }
            if (objective(theta) > -kPenaltyScale) {
                feasible = true;
                break;
            }
        }
        if (!feasible) continue;
        any_start = true;

        std::vector<double> trace;
        std::size_t budget = options.max_iter;
        SimplexOutcome best_round;
        best_round.x = theta;
        best_round.value = objective(theta);
        bool round_converged = false;
        for (double step : {0.4, 0.1, 0.025}) {
            if (budget == 0) break;
            SimplexOutcome round = nelder_mead_max(objective, best_round.x, step, budget,
                                                   options.tol, &trace);
            budget -= std::min(budget, round.iterations);
            round_converged = round.converged;
            if (round.value > best_round.value) {
                const double gain = round.value - best_round.value;
                best_round = std::move(round);
                if (gain <= options.tol * (std::abs(best_round.value) + 1e-12)) break;
            } else {
                break;
            }
        }

        if (best_round.value > result.loglik) {
            result.loglik = best_round.value;
            result.spec = spec_from_theta(best_round.x, p, q);
            result.iterations = options.max_iter - budget;
            result.converged = round_converged;
            result.best_start = s;
            result.best_trace = std::move(trace);
        }
    }

    if (!any_start)
        throw FeasibilityError("no feasible starting point found for the optimizer");
    if (result.loglik <= -kPenaltyScale)
        throw FeasibilityError("optimizer never reached the feasible region");

    const StationarityReport stat = stationarity_check(result.spec, mu);
    if (!stat.ok)
        throw FeasibilityError("optimizer returned an inadmissible point");

    // Constraint-activity report at the optimum.
    const std::vector<double> theta_best = theta_from_spec(result.spec);
    if (result.spec.alpha0 <= 1e-10)
        result.constraint_report.push_back("alpha0 at lower bound");
    for (double t : theta_best)
        if (std::abs(t) >= kTransformBound - 5.0) {
            result.constraint_report.push_back("parameter near transform bound");
            break;
        }
    const double denom = result.spec.b[q - 1] - result.spec.a[0] * mu;
    if (denom < 0.01 * result.spec.b[q - 1])
        result.constraint_report.push_back("b_q - a_1 mu near boundary");
    const double re_bt =
        max_real_part(companion_eigenvalues(result.spec.mean_dynamics(mu)));
    if (re_bt > -1e-6)
        result.constraint_report.push_back("mean-reversion spectrum near zero");
    if (!result.constraint_report.empty()) result.converged = false;

    result.clamp_events =
        pseudo_loglik_detailed(result.spec, series, mu, el1sq).clamp_events;
    return result;
}

}  // namespace cogarch
