#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cogarch/simulator.hpp"

// Pseudo-maximum-likelihood estimation of (a, b, alpha0) from irregularly
// spaced return increments: a state filter driven by squared increments, a
// Gaussian-form objective built from the model's conditional variance, and a
// log-space Nelder-Mead search over the admissible region.

namespace cogarch {

struct ObservedSeries {
    // times t_0 < ... < t_N, increments dG_i = G_{t_i} - G_{t_{i-1}}, i=1..N.
    ObservedSeries(std::vector<double> times_, std::vector<double> increments_);
    static ObservedSeries from_levels(const std::vector<double>& times,
                                      const std::vector<double>& levels);

    std::vector<double> times;       // length N + 1
    std::vector<double> increments;  // length N

    std::size_t count() const { return increments.size(); }
    double sample_variance() const;  // of the increments
};

// Conditional variance of the increment over [t, t+dt] given state y_prev.
// Values at or below `floor` are clamped up to it.
double cond_variance(const CogarchSpec& spec, double dt, const Vector& y_prev, double mu,
                     double el1sq, double floor = 0.0);

// One step of the observation-driven state recursion:
// Y <- (I + (dG^2/V) ea^T) e^{B dt} Y + alpha0 (dG^2/V) e with V = alpha0 + a^T Y.
Vector state_update(const CogarchSpec& spec, const Vector& y_prev, double dG, double dt);

enum class InitialStatePolicy { StationaryMean, Zero };

// Gaussian pseudo-log-likelihood along the filtered states. Returns -inf
// (never NaN) when a step degenerates.
double pseudo_loglik(const CogarchSpec& spec, const ObservedSeries& series, double mu,
                     double el1sq,
                     InitialStatePolicy y0_policy = InitialStatePolicy::StationaryMean);

struct LoglikDetail {
    double value;
    std::size_t clamp_events;
    bool valid;
};
LoglikDetail pseudo_loglik_detailed(
    const CogarchSpec& spec, const ObservedSeries& series, double mu, double el1sq,
    InitialStatePolicy y0_policy = InitialStatePolicy::StationaryMean);

// Heuristic starting point: alpha0 from the variance of normalized
// increments, fixed small a, and a companion polynomial (x + 1/2)^q for
// orders above one.
CogarchSpec initial_point(const ObservedSeries& series, std::size_t p, std::size_t q);

struct EstimateOptions {
    std::optional<CogarchSpec> init;  // defaults to initial_point
    std::size_t multistart = 5;
    std::size_t max_iter = 2000;  // simplex iterations per start
    double tol = 1e-8;            // relative objective spread
    double mu = 1.0;
    double el1sq = 1.0;
    std::uint64_t seed = 1;       // drives multistart jitter
};

struct EstimationResult {
    CogarchSpec spec;
    double loglik;
    std::size_t iterations;
    bool converged;
    std::vector<std::string> constraint_report;
    CogarchSpec initial;
    std::uint64_t seed;
    std::size_t clamp_events;
    std::size_t best_start;            // index of the winning multistart
    std::vector<double> best_trace;    // best-so-far objective, non-decreasing
};

EstimationResult estimate(const ObservedSeries& series, std::size_t p, std::size_t q,
                          const EstimateOptions& options = {});

}  // namespace cogarch
