#pragma once

#include <cstdint>
#include <vector>

#include "cogarch/simulator.hpp"

// Empirical path-space convergence harness: sup distance and an approximate
// Skorokhod distance between simulated paths (compared through their (G, V)
// components as cadlag step records), mesh-refinement studies, and the
// product-process diagnostic with its exponential bound.

namespace cogarch {

// Piecewise-linear increasing time deformation with lambda(0) = 0 and
// lambda(T) = T.
class TimeChange {
public:
    TimeChange(std::vector<double> knots_, std::vector<double> values_);
    static TimeChange identity(double horizon);

    double operator()(double t) const;
    double inverse(double s) const;

    const std::vector<double>& knots() const { return knots_; }
    const std::vector<double>& values() const { return values_; }
    double horizon() const { return knots_.back(); }
    // max_t |lambda(t) - t|, attained at a knot.
    double max_displacement() const;

private:
    std::vector<double> knots_;
    std::vector<double> values_;
};

// sup over [0, T] of the Euclidean distance between the (G, V) values of the
// two paths, right-continuous step evaluation between records.
double sup_distance(const SimulatedPath& a, const SimulatedPath& b);

struct SkorokhodSearch {
    std::size_t max_knots = 8;    // jump pairs matched into the time change
    std::size_t iterations = 200; // local refinement proposal budget
};

// Upper approximation of the Skorokhod distance: minimum over candidate
// jump-matching time changes (plus local refinement) of
// sup ||A_t - B_{lambda(t)}|| + sup |lambda(t) - t|. Never exceeds
// sup_distance(a, b) because the identity is always a candidate.
double skorokhod_distance(const SimulatedPath& a, const SimulatedPath& b,
                          const SkorokhodSearch& search = {});

struct StudyCell {
    double mesh;
    std::uint64_t seed;
    double distance;
};

struct MeshSummary {
    double mesh;
    double median;
    double iqr;
    double frac_above_threshold;
};

struct ConvergenceReport {
    std::vector<double> meshes;          // strictly decreasing
    std::vector<std::uint64_t> seeds;
    std::vector<StudyCell> cells;
    std::vector<MeshSummary> summary;    // one per mesh, same order
    double tail_threshold = 0.1;
    bool schedule_ok = true;       // dt_n * tailmass(m_n)^2 non-increasing
    bool monotone_decay = false;   // medians strictly decreasing across meshes
    bool tail_ok = false;          // finest-mesh exceedance fraction < 10%
    bool pass = false;             // monotone_decay && tail_ok
};

// Shared-noise refinement study: per seed one exact path, then per mesh a
// discrete path driven by first-jump innovations of the same realization.
ConvergenceReport convergence_study(const CogarchSpec& spec,
                                    const CompoundPoissonSpec& noise_spec, double horizon,
                                    const std::vector<double>& meshes,
                                    const std::vector<std::uint64_t>& seeds,
                                    const TruncationSchedule& schedule = {});

struct AuxDiagnostic {
    double sup_diff;   // sup_t |H_n(t) - Htilde_n(t)|
    double h_T;        // H_n(T)
    double htilde_T;   // Htilde_n(T)
    double bound;      // exp(||B|| T + sum ln(1 + dL^2 ||ea^T||)) over all jumps
};

// Product-process diagnostic; throws NumericalError if Htilde_n(T) exceeds
// the exponential bound (beyond roundoff).
AuxDiagnostic aux_diagnostic(const CogarchSpec& spec, const InnovationSeries& innov,
                             const JumpPath& noise);

}  // namespace cogarch
