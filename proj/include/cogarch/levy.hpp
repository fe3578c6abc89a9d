#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "cogarch/common.hpp"
#include "cogarch/rng.hpp"

// Compound Poisson driving noise and the first-jump-approximation innovation
// construction: per grid cell, keep the first jump whose magnitude exceeds a
// shrinking threshold m_n and standardize it by its exact conditional
// mean/SD. Jump-size laws with closed-form truncated moments only.

namespace cogarch {

struct NormalJumps {
    double mean = 0.0;
    double sd = 1.0;
};

struct TwoPointJumps {
    double x1;
    double p1;  // P(J = x1); J = x2 otherwise
    double x2;
};

using JumpDist = std::variant<NormalJumps, TwoPointJumps>;

struct CompoundPoissonSpec {
    CompoundPoissonSpec(double rate_, JumpDist jumps_);
    double rate;  // jumps per unit time, > 0
    JumpDist jumps;
};

// Realized driver path on [0, T]: strictly increasing jump times in (0, T]
// with matching sizes.
struct JumpPath {
    JumpPath(double horizon_, std::vector<double> times_, std::vector<double> sizes_);
    double horizon;
    std::vector<double> times;
    std::vector<double> sizes;
};

// Partition 0 = t_0 < t_1 < ... < t_N = T.
struct Grid {
    explicit Grid(std::vector<double> knots_);
    static Grid uniform(double horizon, std::size_t cells);

    std::vector<double> knots;
    double horizon() const { return knots.back(); }
    std::size_t cells() const { return knots.size() - 1; }
    double dt(std::size_t i) const { return knots[i + 1] - knots[i]; }  // cell i+1 width
    double mesh() const;  // max spacing
};

// Grid plus standardized first-jump innovations and their per-cell
// standardization constants. epsilon[i] = (raw[i] - mean_v[i]) / sd_eta[i].
struct InnovationSeries {
    Grid grid;
    std::vector<double> epsilon;
    std::vector<double> raw_first_jump;  // 0 when no qualifying jump in the cell
    std::vector<double> mean_v;
    std::vector<double> sd_eta;
    double threshold_m;
};

// Truncated jump-size moments over {|J| > m}: P, E[J*1], E[J^2*1].
struct TruncatedJumpMoments {
    double prob;
    double first;
    double second;
};
TruncatedJumpMoments truncated_moments(const JumpDist& dist, double m);

struct LevyMoments {
    double mean_l1;    // E[L_1] = rate * E[J]
    double var_l1;     // Var(L_1) = rate * E[J^2]
    double mu_second;  // integral of y^2 against the Levy measure = rate * E[J^2]
};
LevyMoments levy_moments(const CompoundPoissonSpec& spec);

// Levy-measure tail mass: rate * P(|J| > m).
double tail_mass(const CompoundPoissonSpec& spec, double m);

JumpPath sample_jump_path(const CompoundPoissonSpec& spec, double horizon, Rng& rng);
JumpPath sample_jump_path(const CompoundPoissonSpec& spec, double horizon,
                          std::uint64_t seed);

// Threshold schedule m_n = c * (1 + n)^(-gamma).
struct TruncationSchedule {
    double c = 0.5;
    double gamma = 1.25;
};
double truncation_sequence(std::size_t n, const TruncationSchedule& schedule);

// First qualifying jump per cell [t_{i-1}, t_i): time and size, or absent.
struct FirstJump {
    bool present = false;
    double time = 0.0;
    double size = 0.0;
};
std::vector<FirstJump> first_qualifying_jumps(const JumpPath& path, const Grid& grid,
                                              double m);

InnovationSeries first_jump_innovations(const JumpPath& path, const Grid& grid, double m,
                                        const CompoundPoissonSpec& spec);

}  // namespace cogarch
