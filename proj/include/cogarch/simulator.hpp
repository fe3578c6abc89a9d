#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cogarch/levy.hpp"
#include "cogarch/linalg.hpp"

// COGARCH(p,q) path generation: the exact jump recursion under compound
// Poisson noise, and the discrete-time approximating process driven by
// first-jump innovations. State Y in R^q, variance V = alpha0 + a^T Y,
// returns G accumulating sqrt(V_-) against the driver's jumps.

namespace cogarch {

struct CogarchSpec {
    // a may be given with length p (padded with zeros to q) or length q with
    // the padding already in place.
    CogarchSpec(std::size_t p_, std::size_t q_, std::vector<double> a_,
                std::vector<double> b_, double alpha0_);

    std::size_t p;
    std::size_t q;
    std::vector<double> a;  // length q, a[p..q-1] == 0
    std::vector<double> b;  // length q
    double alpha0;

    Matrix companion() const { return build_companion(b); }
    Vector a_vec() const { return Vector(a); }
    Vector e_vec() const { return Vector::basis(q, q - 1); }
    // B + mu * e a^T; companion form with a perturbed last row.
    Matrix mean_dynamics(double mu) const;
};

struct StationarityReport {
    bool ok = true;
    std::vector<std::string> reasons;
};

// Admissibility gate: nonnegative a, positive b, b_q - a_1*mu > 0, and
// strictly negative spectra for both B and B + mu*ea^T.
StationarityReport stationarity_check(const CogarchSpec& spec, double mu);

// alpha0*mu / (b_q - a_1*mu) times the first basis vector.
Vector stationary_mean(const CogarchSpec& spec, double mu);

enum class PathKind { Exact, Discrete };

struct SimulatedPath {
    SimulatedPath(PathKind kind_, CogarchSpec spec_)
        : kind(kind_), spec(std::move(spec_)) {}

    PathKind kind;
    CogarchSpec spec;
    std::uint64_t seed = 0;
    bool stationarity_ok = true;

    std::vector<double> times;
    std::vector<double> G;
    std::vector<double> V;       // post-jump value at jump records
    std::vector<double> V_pre;   // pre-jump value; equals V away from jumps
    std::vector<uint8_t> is_jump;
    std::vector<Vector> Y;

    std::size_t size() const { return times.size(); }
    double horizon() const { return times.back(); }
};

// Exact path: Y propagates by e^{B dt} between jumps and by
// Y += dL^2 * V_- * e across jumps; records at sample grid union jump times.
// y0 defaults to the stationary mean when the spec is admissible (zero
// vector otherwise); mu is only consulted for that default.
SimulatedPath simulate_exact(const CogarchSpec& spec, const JumpPath& noise,
                             const Grid& sample_grid,
                             std::optional<Vector> y0 = std::nullopt, double mu = 1.0);

// Discrete approximating process on the innovation grid.
SimulatedPath simulate_discrete(const CogarchSpec& spec, const InnovationSeries& innov,
                                const Vector& y0);

}  // namespace cogarch
