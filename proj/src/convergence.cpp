#include "cogarch/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cogarch {

namespace {

double pair_dist(double g1, double v1, double g2, double v2) {
    return std::hypot(g1 - g2, v1 - v2);
}

void check_comparable(const SimulatedPath& a, const SimulatedPath& b) {
    if (std::abs(a.horizon() - b.horizon()) > 1e-9 * std::max(1.0, a.horizon()))
        throw DomainError("paths have different horizons");
    if (a.times.empty() || b.times.empty()) throw DomainError("empty path");
}

// sup_t ||A_t - B_t|| under the identity deformation: exact merge walk over
// both record sets, no interpolation roundoff.
double sup_plain(const SimulatedPath& a, const SimulatedPath& b) {
    const std::size_t na = a.times.size();
    const std::size_t nb = b.times.size();
    std::size_t i = 0, j = 0;
    double best = pair_dist(a.G[0], a.V[0], b.G[0], b.V[0]);
    while (true) {
        const double next_a =
            (i + 1 < na) ? a.times[i + 1] : std::numeric_limits<double>::infinity();
        const double next_b =
            (j + 1 < nb) ? b.times[j + 1] : std::numeric_limits<double>::infinity();
        const double u = std::min(next_a, next_b);
        if (!std::isfinite(u)) break;
        if (next_a <= u) ++i;
        if (next_b <= u) ++j;
        best = std::max(best, pair_dist(a.G[i], a.V[i], b.G[j], b.V[j]));
    }
    return best;
}

// sup_t ||A_t - B_{lambda(t)}|| for step-record paths; breakpoints are the
// records of A and the pullbacks of B's records. Merge walk, O(nA + nB).
double sup_deformed(const SimulatedPath& a, const SimulatedPath& b,
                    const TimeChange& lam) {
    const std::size_t na = a.times.size();
    const std::size_t nb = b.times.size();
    std::size_t i = 0, j = 0;
    double best = pair_dist(a.G[0], a.V[0], b.G[0], b.V[0]);
    while (true) {
        const double next_a =
            (i + 1 < na) ? a.times[i + 1] : std::numeric_limits<double>::infinity();
        const double next_b = (j + 1 < nb) ? lam.inverse(b.times[j + 1])
                                           : std::numeric_limits<double>::infinity();
        const double u = std::min(next_a, next_b);
        if (!std::isfinite(u)) break;
        if (next_a <= u) ++i;
        if (next_b <= u) ++j;
        best = std::max(best, pair_dist(a.G[i], a.V[i], b.G[j], b.V[j]));
    }
    return best;
}

struct JumpMark {
    double time;
    double magnitude;
};

// Flagged records with their (G, V) delta magnitude, largest first.
std::vector<JumpMark> extract_jumps(const SimulatedPath& p) {
    std::vector<JumpMark> out;
    for (std::size_t k = 1; k < p.times.size(); ++k) {
        if (!p.is_jump[k]) continue;
        const double mag =
            std::hypot(p.G[k] - p.G[k - 1], p.V[k] - p.V[k - 1]);
        out.push_back({p.times[k], mag});
    }
    std::sort(out.begin(), out.end(),
              [](const JumpMark& x, const JumpMark& y) { return x.magnitude > y.magnitude; });
    return out;
}

double max_record_spacing(const SimulatedPath& p) {
    double m = 0.0;
    for (std::size_t k = 1; k < p.times.size(); ++k)
        m = std::max(m, p.times[k] - p.times[k - 1]);
    return m;
}

// Structural monotone matching: each B jump record owns the span back to
// the previous B record; it pairs with the amplitude-closest A jump inside
// that span. Falls back to nearby-window matching for B jumps whose span
// holds no A jump. Returns strictly increasing (u, w) pairs in (0, T).
std::vector<std::pair<double, double>> match_jumps(const SimulatedPath& a,
                                                   const SimulatedPath& b,
                                                   std::size_t max_knots) {
    std::vector<JumpMark> ja = extract_jumps(a);
    std::vector<JumpMark> jb = extract_jumps(b);
    std::sort(ja.begin(), ja.end(),
              [](const JumpMark& x, const JumpMark& y) { return x.time < y.time; });
    std::sort(jb.begin(), jb.end(),
              [](const JumpMark& x, const JumpMark& y) { return x.time < y.time; });
    const double horizon = a.horizon();
    const double window =
        1.5 * std::max(max_record_spacing(a), max_record_spacing(b)) + 1e-12;

    std::vector<std::pair<double, double>> pairs;
    std::vector<bool> taken(ja.size(), false);
    for (std::size_t k = 0; k < jb.size(); ++k) {
        if (pairs.size() >= max_knots) break;
        const double w = jb[k].time;
        if (w <= 0.0 || w >= horizon) continue;
        const double span_lo =
            (k == 0) ? 0.0 : std::max(jb[k - 1].time, pairs.empty() ? 0.0
                                                                    : pairs.back().first);
        // amplitude-closest A jump in (span_lo, w], widened by the window
        // when the span itself is empty
        std::size_t best = ja.size();
        double best_gap = std::numeric_limits<double>::infinity();
        for (int pass = 0; pass < 2 && best == ja.size(); ++pass) {
            const double lo = (pass == 0) ? span_lo : std::max(span_lo, w - window);
            const double hi = (pass == 0) ? w : std::min(horizon, w + window);
            for (std::size_t i = 0; i < ja.size(); ++i) {
                if (taken[i]) continue;
                const double u = ja[i].time;
                if (u <= lo || u > hi || u <= 0.0 || u >= horizon) continue;
                if (!pairs.empty() && u <= pairs.back().first) continue;
                const double gap = std::abs(ja[i].magnitude - jb[k].magnitude);
                if (gap < best_gap) {
                    best_gap = gap;
                    best = i;
                }
            }
        }
        if (best == ja.size()) continue;
        const double u = ja[best].time;
        if (!pairs.empty() && (u <= pairs.back().first || w <= pairs.back().second))
            continue;
        pairs.emplace_back(u, w);
        taken[best] = true;
    }
    return pairs;
}

TimeChange make_time_change(const std::vector<std::pair<double, double>>& pairs,
                            double horizon) {
    std::vector<double> knots{0.0}, values{0.0};
    for (const auto& [u, w] : pairs) {
        knots.push_back(u);
        values.push_back(w);
    }
    knots.push_back(horizon);
    values.push_back(horizon);
    return TimeChange(std::move(knots), std::move(values));
}

double objective(const SimulatedPath& a, const SimulatedPath& b, const TimeChange& lam) {
    return sup_deformed(a, b, lam) + lam.max_displacement();
}

// Local refinement: knot-value nudges and knot drops, accept-if-better.
double refine(const SimulatedPath& a, const SimulatedPath& b,
              std::vector<std::pair<double, double>> pairs, double best,
              std::size_t budget) {
    if (pairs.empty()) return best;
    const double horizon = a.horizon();
    std::size_t spent = 0;
    bool improved = true;
    while (improved && spent < budget) {
        improved = false;
        for (std::size_t k = 0; k < pairs.size() && spent < budget; ++k) {
            const double lo = (k == 0) ? 0.0 : pairs[k - 1].second;
            const double hi = (k + 1 == pairs.size()) ? horizon : pairs[k + 1].second;
            const double w0 = pairs[k].second;
            for (double frac : {0.5, 0.2, 0.05}) {
                if (spent >= budget) break;
                for (double dir : {-1.0, 1.0}) {
                    const double w = w0 + dir * frac * std::min(w0 - lo, hi - w0);
                    if (!(w > lo) || !(w < hi)) continue;
                    auto trial = pairs;
                    trial[k].second = w;
                    const double val = objective(a, b, make_time_change(trial, horizon));
                    ++spent;
                    if (val < best) {
                        best = val;
                        pairs = trial;
                        improved = true;
                    }
                }
            }
            // try dropping the knot entirely
            if (pairs.size() > 1 && spent < budget) {
                auto trial = pairs;
                trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(k));
                const double val = objective(a, b, make_time_change(trial, horizon));
                ++spent;
                if (val < best) {
                    best = val;
                    pairs = trial;
                    improved = true;
                    break;
                }
            }
        }
    }
    return best;
}

double directed_search(const SimulatedPath& a, const SimulatedPath& b,
                       const SkorokhodSearch& search) {
    const double horizon = a.horizon();
    const auto pairs = match_jumps(a, b, search.max_knots);
    double best = objective(a, b, TimeChange::identity(horizon));
    if (!pairs.empty()) {
        best = std::min(best, objective(a, b, make_time_change(pairs, horizon)));
        best = refine(a, b, pairs, best, search.iterations);
    }
    return best;
}

double median_of(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

double iqr_of(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(xs.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(lo + 1, xs.size() - 1);
        const double w = pos - static_cast<double>(lo);
        return (1.0 - w) * xs[lo] + w * xs[hi];
    };
    return quantile(0.75) - quantile(0.25);
}

}  // namespace

TimeChange::TimeChange(std::vector<double> knots_in, std::vector<double> values_in)
    : knots_(std::move(knots_in)), values_(std::move(values_in)) {
    if (knots_.size() != values_.size() || knots_.size() < 2)
        throw ShapeError("time change needs matching knot/value lists of length >= 2");
    if (knots_.front() != 0.0 || values_.front() != 0.0)
        throw DomainError("time change must fix 0");
    if (knots_.back() != values_.back())
        throw DomainError("time change must fix the horizon");
    for (std::size_t i = 1; i < knots_.size(); ++i)
        if (!(knots_[i] > knots_[i - 1]) || !(values_[i] > values_[i - 1]))
            throw DomainError("time change must be strictly increasing");
}

TimeChange TimeChange::identity(double horizon) {
    return TimeChange({0.0, horizon}, {0.0, horizon});
}

double TimeChange::operator()(double t) const {
    if (t <= knots_.front()) return values_.front();
    if (t >= knots_.back()) return values_.back();
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
    const std::size_t k = static_cast<std::size_t>(it - knots_.begin());
    if (knots_[k - 1] == t) return values_[k - 1];
    const double w = (t - knots_[k - 1]) / (knots_[k] - knots_[k - 1]);
    return values_[k - 1] + w * (values_[k] - values_[k - 1]);
}

double TimeChange::inverse(double s) const {
    if (s <= values_.front()) return knots_.front();
    if (s >= values_.back()) return knots_.back();
    const auto it = std::upper_bound(values_.begin(), values_.end(), s);
    const std::size_t k = static_cast<std::size_t>(it - values_.begin());
    if (values_[k - 1] == s) return knots_[k - 1];
    const double w = (s - values_[k - 1]) / (values_[k] - values_[k - 1]);
    return knots_[k - 1] + w * (knots_[k] - knots_[k - 1]);
}

double TimeChange::max_displacement() const {
    double best = 0.0;
    for (std::size_t i = 0; i < knots_.size(); ++i)
        best = std::max(best, std::abs(values_[i] - knots_[i]));
    return best;
}

double sup_distance(const SimulatedPath& a, const SimulatedPath& b) {
    check_comparable(a, b);
    return sup_plain(a, b);
}

double skorokhod_distance(const SimulatedPath& a, const SimulatedPath& b,
                          const SkorokhodSearch& search) {
    check_comparable(a, b);
    const double d_id = sup_distance(a, b);
    double best = std::min(directed_search(a, b, search), directed_search(b, a, search));
    best = std::min(best, d_id);
    return best;
}

ConvergenceReport convergence_study(const CogarchSpec& spec,
                                    const CompoundPoissonSpec& noise_spec, double horizon,
                                    const std::vector<double>& meshes,
                                    const std::vector<std::uint64_t>& seeds,
                                    const TruncationSchedule& schedule) {
    if (meshes.size() < 3) throw DomainError("need at least 3 meshes");
    for (std::size_t i = 1; i < meshes.size(); ++i)
        if (!(meshes[i] < meshes[i - 1]))
            throw DomainError("meshes must be strictly decreasing");
    if (seeds.size() < 20) throw DomainError("need at least 20 seeds");
    if (!(horizon > 0.0)) throw DomainError("horizon must be positive");

    const double mu = levy_moments(noise_spec).mu_second;
    const StationarityReport stat = stationarity_check(spec, mu);
    if (!stat.ok) {
        std::string why = "spec fails stationarity:";
        for (const auto& r : stat.reasons) why += " [" + r + "]";
        throw StationarityError(why);
    }
    const Vector y0 = stationary_mean(spec, mu);

    const double finest = meshes.back();
    const auto probe_cells =
        static_cast<std::size_t>(std::llround(std::ceil(horizon / (0.5 * finest))));
    const Grid probe = Grid::uniform(horizon, probe_cells);

    SkorokhodSearch search;
    search.max_knots = 4096;  // match every qualifying jump at desk scale
    search.iterations = 200;

    ConvergenceReport report;
    report.meshes = meshes;
    report.seeds = seeds;

    {  // asymptotic schedule condition, checked along the requested meshes
        double prev = std::numeric_limits<double>::infinity();
        for (std::size_t mi = 0; mi < meshes.size(); ++mi) {
            const double pib =
                tail_mass(noise_spec, truncation_sequence(mi, schedule));
            const double value = meshes[mi] * pib * pib;
            if (value > prev) report.schedule_ok = false;
            prev = value;
        }
    }

    for (const std::uint64_t seed : seeds) {
        Rng rng(Rng::derive(seed, "jump-path"));
        const JumpPath path = sample_jump_path(noise_spec, horizon, rng);
        SimulatedPath exact = simulate_exact(spec, path, probe, y0, mu);
        exact.seed = seed;
        for (std::size_t mi = 0; mi < meshes.size(); ++mi) {
            const auto cells =
                static_cast<std::size_t>(std::llround(horizon / meshes[mi]));
            const Grid grid = Grid::uniform(horizon, std::max<std::size_t>(1, cells));
            const double m_n = truncation_sequence(mi, schedule);
            const InnovationSeries innov =
                first_jump_innovations(path, grid, m_n, noise_spec);
            SimulatedPath disc = simulate_discrete(spec, innov, y0);
            disc.seed = seed;
            report.cells.push_back({meshes[mi], seed, skorokhod_distance(exact, disc, search)});
        }
    }

    for (std::size_t mi = 0; mi < meshes.size(); ++mi) {
        std::vector<double> ds;
        for (const StudyCell& c : report.cells)
            if (c.mesh == meshes[mi]) ds.push_back(c.distance);
        MeshSummary s;
        s.mesh = meshes[mi];
        s.median = median_of(ds);
        s.iqr = iqr_of(ds);
        std::size_t above = 0;
        for (double d : ds)
            if (d > report.tail_threshold) ++above;
        s.frac_above_threshold = static_cast<double>(above) / static_cast<double>(ds.size());
        report.summary.push_back(s);
    }

    report.monotone_decay = true;
    for (std::size_t mi = 1; mi < report.summary.size(); ++mi)
        if (!(report.summary[mi].median < report.summary[mi - 1].median))
            report.monotone_decay = false;
    report.tail_ok = report.summary.back().frac_above_threshold < 0.10;
    report.pass = report.monotone_decay && report.tail_ok;
    return report;
}

AuxDiagnostic aux_diagnostic(const CogarchSpec& spec, const InnovationSeries& innov,
                             const JumpPath& noise) {
    const Grid& grid = innov.grid;
    if (std::abs(grid.horizon() - noise.horizon) > 1e-12 * std::max(1.0, noise.horizon))
        throw DomainError("innovation grid horizon does not match the noise horizon");
    const double norm_ea = induced_norm(outer(spec.e_vec(), spec.a_vec()));
    const double norm_b = induced_norm(spec.companion());

    double h = 1.0, ht = 1.0;
    double sup_diff = 0.0;
    for (std::size_t k = 0; k < grid.cells(); ++k) {
        const double dt = grid.dt(k);
        const double decay = std::exp(norm_b * dt);
        const double eps = innov.epsilon[k];
        const double raw = innov.raw_first_jump[k];
        h *= (1.0 + eps * eps * dt * norm_ea) * decay;
        ht *= (1.0 + raw * raw * norm_ea) * decay;
        sup_diff = std::max(sup_diff, std::abs(h - ht));
    }

    double log_bound = norm_b * grid.horizon();
    for (double s : noise.sizes) log_bound += std::log1p(s * s * norm_ea);
    const double bound = std::exp(log_bound);

    if (ht > bound * (1.0 + 1e-12))
        throw NumericalError("product process exceeded its exponential bound");
    return {sup_diff, h, ht, bound};
}

}  // namespace cogarch
