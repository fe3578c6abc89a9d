// Python bindings for the COGARCH toolkit: the domain types plus the main
// operations (simulation, innovations, distances, studies, estimation).

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cogarch/convergence.hpp"
#include "cogarch/estimation.hpp"
#include "cogarch/io.hpp"
#include "cogarch/levy.hpp"
#include "cogarch/linalg.hpp"
#include "cogarch/simulator.hpp"

namespace py = pybind11;
using namespace cogarch;

namespace {

std::vector<std::vector<double>> matrix_rows(const Matrix& m) {
    std::vector<std::vector<double>> rows(m.rows(), std::vector<double>(m.cols()));
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) rows[r][c] = m(r, c);
    return rows;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "COGARCH(p,q) simulation, path-distance, and estimation toolkit";

    // ---- linalg ----------------------------------------------------------
    py::class_<Matrix>(m, "Matrix")
        .def(py::init<std::size_t, std::size_t, std::vector<double>>(), py::arg("rows"),
             py::arg("cols"), py::arg("entries"))
        .def_static("identity", &Matrix::identity)
        .def_property_readonly("rows", &Matrix::rows)
        .def_property_readonly("cols", &Matrix::cols)
        .def("tolist", &matrix_rows)
        .def("__getitem__",
             [](const Matrix& self, std::pair<std::size_t, std::size_t> idx) {
                 if (idx.first >= self.rows() || idx.second >= self.cols())
                     throw py::index_error();
                 return self(idx.first, idx.second);
             });

    py::class_<Vector>(m, "Vector")
        .def(py::init<std::vector<double>>(), py::arg("entries"))
        .def("tolist", [](const Vector& v) { return v.entries(); })
        .def("__len__", &Vector::dim)
        .def("__getitem__",
             [](const Vector& v, std::size_t i) {
                 if (i >= v.dim()) throw py::index_error();
                 return v[i];
             })
        .def("norm", &Vector::norm);

    m.def("build_companion", &build_companion, py::arg("b"));
    m.def("expm", &expm, py::arg("a"), py::arg("t"));
    m.def("induced_norm", &induced_norm, py::arg("a"));
    m.def("log_norm", &log_norm, py::arg("a"));
    m.def("linear_recursion_closed_form", &linear_recursion_closed_form,
          py::arg("a_seq"), py::arg("b_seq"), py::arg("y0"));

    // ---- levy ------------------------------------------------------------
    py::class_<NormalJumps>(m, "NormalJumps")
        .def(py::init<double, double>(), py::arg("mean") = 0.0, py::arg("sd") = 1.0)
        .def_readonly("mean", &NormalJumps::mean)
        .def_readonly("sd", &NormalJumps::sd);

    py::class_<TwoPointJumps>(m, "TwoPointJumps")
        .def(py::init<double, double, double>(), py::arg("x1"), py::arg("p1"),
             py::arg("x2"))
        .def_readonly("x1", &TwoPointJumps::x1)
        .def_readonly("p1", &TwoPointJumps::p1)
        .def_readonly("x2", &TwoPointJumps::x2);

    py::class_<CompoundPoissonSpec>(m, "CompoundPoissonSpec")
        .def(py::init<double, JumpDist>(), py::arg("rate"), py::arg("jumps"))
        .def_readonly("rate", &CompoundPoissonSpec::rate);

    py::class_<JumpPath>(m, "JumpPath")
        .def(py::init<double, std::vector<double>, std::vector<double>>(),
             py::arg("horizon"), py::arg("times"), py::arg("sizes"))
        .def_readonly("horizon", &JumpPath::horizon)
        .def_readonly("times", &JumpPath::times)
        .def_readonly("sizes", &JumpPath::sizes);

    py::class_<Grid>(m, "Grid")
        .def(py::init<std::vector<double>>(), py::arg("knots"))
        .def_static("uniform", &Grid::uniform, py::arg("horizon"), py::arg("cells"))
        .def_readonly("knots", &Grid::knots)
        .def_property_readonly("horizon", &Grid::horizon)
        .def("mesh", &Grid::mesh)
        .def("cells", &Grid::cells);

    py::class_<InnovationSeries>(m, "InnovationSeries")
        .def_readonly("grid", &InnovationSeries::grid)
        .def_readonly("epsilon", &InnovationSeries::epsilon)
        .def_readonly("raw_first_jump", &InnovationSeries::raw_first_jump)
        .def_readonly("mean_v", &InnovationSeries::mean_v)
        .def_readonly("sd_eta", &InnovationSeries::sd_eta)
        .def_readonly("threshold_m", &InnovationSeries::threshold_m);

    py::class_<LevyMoments>(m, "LevyMoments")
        .def_readonly("mean_l1", &LevyMoments::mean_l1)
        .def_readonly("var_l1", &LevyMoments::var_l1)
        .def_readonly("mu_second", &LevyMoments::mu_second);

    m.def(
        "sample_jump_path",
        [](const CompoundPoissonSpec& spec, double horizon, std::uint64_t seed) {
            return sample_jump_path(spec, horizon, seed);
        },
        py::arg("spec"), py::arg("horizon"), py::arg("seed"));
    m.def("tail_mass", &tail_mass, py::arg("spec"), py::arg("m"));
    m.def("levy_moments", &levy_moments, py::arg("spec"));
    m.def(
        "truncation_sequence",
        [](std::size_t n, double c, double gamma) {
            return truncation_sequence(n, TruncationSchedule{c, gamma});
        },
        py::arg("n"), py::arg("c") = TruncationSchedule{}.c,
        py::arg("gamma") = TruncationSchedule{}.gamma);
    m.def("first_jump_innovations", &first_jump_innovations, py::arg("path"),
          py::arg("grid"), py::arg("m"), py::arg("spec"));

    // ---- simulator ---------------------------------------------------------
    py::class_<CogarchSpec>(m, "CogarchSpec")
        .def(py::init<std::size_t, std::size_t, std::vector<double>,
                      std::vector<double>, double>(),
             py::arg("p"), py::arg("q"), py::arg("a"), py::arg("b"), py::arg("alpha0"))
        .def_readonly("p", &CogarchSpec::p)
        .def_readonly("q", &CogarchSpec::q)
        .def_readonly("a", &CogarchSpec::a)
        .def_readonly("b", &CogarchSpec::b)
        .def_readonly("alpha0", &CogarchSpec::alpha0)
        .def("companion", &CogarchSpec::companion);

    py::class_<StationarityReport>(m, "StationarityReport")
        .def_readonly("ok", &StationarityReport::ok)
        .def_readonly("reasons", &StationarityReport::reasons);

    m.def("stationarity_check", &stationarity_check, py::arg("spec"), py::arg("mu"));
    m.def("stationary_mean", &stationary_mean, py::arg("spec"), py::arg("mu"));

    py::enum_<PathKind>(m, "PathKind")
        .value("Exact", PathKind::Exact)
        .value("Discrete", PathKind::Discrete);

    py::class_<SimulatedPath>(m, "SimulatedPath")
        .def_readonly("kind", &SimulatedPath::kind)
        .def_readonly("spec", &SimulatedPath::spec)
        .def_readonly("seed", &SimulatedPath::seed)
        .def_readonly("stationarity_ok", &SimulatedPath::stationarity_ok)
        .def_readonly("times", &SimulatedPath::times)
        .def_readonly("G", &SimulatedPath::G)
        .def_readonly("V", &SimulatedPath::V)
        .def_readonly("V_pre", &SimulatedPath::V_pre)
        .def_property_readonly("is_jump",
                               [](const SimulatedPath& p) {
                                   std::vector<bool> flags(p.is_jump.begin(),
                                                           p.is_jump.end());
                                   return flags;
                               })
        .def_property_readonly("Y",
                               [](const SimulatedPath& p) {
                                   std::vector<std::vector<double>> ys;
                                   ys.reserve(p.Y.size());
                                   for (const Vector& y : p.Y) ys.push_back(y.entries());
                                   return ys;
                               })
        .def("to_csv", &path_to_csv);

    m.def("simulate_exact", &simulate_exact, py::arg("spec"), py::arg("noise"),
          py::arg("sample_grid"), py::arg("y0") = std::nullopt, py::arg("mu") = 1.0);
    m.def("simulate_discrete", &simulate_discrete, py::arg("spec"), py::arg("innovations"),
          py::arg("y0"));

    // ---- convergence -------------------------------------------------------
    py::class_<TimeChange>(m, "TimeChange")
        .def(py::init<std::vector<double>, std::vector<double>>(), py::arg("knots"),
             py::arg("values"))
        .def("__call__", &TimeChange::operator())
        .def("inverse", &TimeChange::inverse)
        .def("max_displacement", &TimeChange::max_displacement);

    m.def("sup_distance", &sup_distance, py::arg("a"), py::arg("b"));
    m.def(
        "skorokhod_distance",
        [](const SimulatedPath& a, const SimulatedPath& b, std::size_t max_knots,
           std::size_t iterations) {
            return skorokhod_distance(a, b, SkorokhodSearch{max_knots, iterations});
        },
        py::arg("a"), py::arg("b"), py::arg("max_knots") = SkorokhodSearch{}.max_knots,
        py::arg("iterations") = SkorokhodSearch{}.iterations);

    py::class_<StudyCell>(m, "StudyCell")
        .def_readonly("mesh", &StudyCell::mesh)
        .def_readonly("seed", &StudyCell::seed)
        .def_readonly("distance", &StudyCell::distance);

    py::class_<MeshSummary>(m, "MeshSummary")
        .def_readonly("mesh", &MeshSummary::mesh)
        .def_readonly("median", &MeshSummary::median)
        .def_readonly("iqr", &MeshSummary::iqr)
        .def_readonly("frac_above_threshold", &MeshSummary::frac_above_threshold);

    py::class_<ConvergenceReport>(m, "ConvergenceReport")
        .def_readonly("meshes", &ConvergenceReport::meshes)
        .def_readonly("seeds", &ConvergenceReport::seeds)
        .def_readonly("cells", &ConvergenceReport::cells)
        .def_readonly("summary", &ConvergenceReport::summary)
        .def_readonly("tail_threshold", &ConvergenceReport::tail_threshold)
        .def_readonly("schedule_ok", &ConvergenceReport::schedule_ok)
        .def_readonly("monotone_decay", &ConvergenceReport::monotone_decay)
        .def_readonly("tail_ok", &ConvergenceReport::tail_ok)
        .def_readonly("pass_", &ConvergenceReport::pass);

    m.def(
        "convergence_study",
        [](const CogarchSpec& spec, const CompoundPoissonSpec& noise, double horizon,
           const std::vector<double>& meshes, const std::vector<std::uint64_t>& seeds,
           double c, double gamma) {
            return convergence_study(spec, noise, horizon, meshes, seeds,
                                     TruncationSchedule{c, gamma});
        },
        py::arg("spec"), py::arg("noise"), py::arg("horizon"), py::arg("meshes"),
        py::arg("seeds"), py::arg("c") = TruncationSchedule{}.c,
        py::arg("gamma") = TruncationSchedule{}.gamma);

    py::class_<AuxDiagnostic>(m, "AuxDiagnostic")
        .def_readonly("sup_diff", &AuxDiagnostic::sup_diff)
        .def_readonly("h_T", &AuxDiagnostic::h_T)
        .def_readonly("htilde_T", &AuxDiagnostic::htilde_T)
        .def_readonly("bound", &AuxDiagnostic::bound);

    m.def("aux_diagnostic", &aux_diagnostic, py::arg("spec"), py::arg("innovations"),
          py::arg("noise"));

    // ---- estimation --------------------------------------------------------
    py::class_<ObservedSeries>(m, "ObservedSeries")
        .def(py::init<std::vector<double>, std::vector<double>>(), py::arg("times"),
             py::arg("increments"))
        .def_static("from_levels", &ObservedSeries::from_levels, py::arg("times"),
                    py::arg("levels"))
        .def_readonly("times", &ObservedSeries::times)
        .def_readonly("increments", &ObservedSeries::increments)
        .def("count", &ObservedSeries::count)
        .def("to_csv", &observed_to_csv);

    py::enum_<InitialStatePolicy>(m, "InitialStatePolicy")
        .value("StationaryMean", InitialStatePolicy::StationaryMean)
        .value("Zero", InitialStatePolicy::Zero);

    m.def("cond_variance", &cond_variance, py::arg("spec"), py::arg("dt"),
          py::arg("y_prev"), py::arg("mu"), py::arg("el1sq"), py::arg("floor") = 0.0);
    m.def("state_update", &state_update, py::arg("spec"), py::arg("y_prev"),
          py::arg("dG"), py::arg("dt"));
    m.def("pseudo_loglik", &pseudo_loglik, py::arg("spec"), py::arg("series"),
          py::arg("mu"), py::arg("el1sq"),
          py::arg("y0_policy") = InitialStatePolicy::StationaryMean);
    m.def("initial_point", &initial_point, py::arg("series"), py::arg("p"), py::arg("q"));

    py::class_<EstimationResult>(m, "EstimationResult")
        .def_readonly("spec", &EstimationResult::spec)
        .def_readonly("loglik", &EstimationResult::loglik)
        .def_readonly("iterations", &EstimationResult::iterations)
        .def_readonly("converged", &EstimationResult::converged)
        .def_readonly("constraint_report", &EstimationResult::constraint_report)
        .def_readonly("initial", &EstimationResult::initial)
        .def_readonly("seed", &EstimationResult::seed)
        .def_readonly("clamp_events", &EstimationResult::clamp_events)
        .def_readonly("best_start", &EstimationResult::best_start)
        .def_readonly("best_trace", &EstimationResult::best_trace);

    m.def(
        "estimate",
        [](const ObservedSeries& series, std::size_t p, std::size_t q,
           std::optional<CogarchSpec> init, std::size_t multistart, std::size_t max_iter,
           double tol, double mu, double el1sq, std::uint64_t seed) {
            EstimateOptions options;
            options.init = std::move(init);
            options.multistart = multistart;
            options.max_iter = max_iter;
            options.tol = tol;
            options.mu = mu;
            options.el1sq = el1sq;
            options.seed = seed;
            return estimate(series, p, q, options);
        },
        py::arg("series"), py::arg("p"), py::arg("q"), py::arg("init") = std::nullopt,
        py::arg("multistart") = EstimateOptions{}.multistart,
        py::arg("max_iter") = EstimateOptions{}.max_iter,
        py::arg("tol") = EstimateOptions{}.tol, py::arg("mu") = EstimateOptions{}.mu,
        py::arg("el1sq") = EstimateOptions{}.el1sq,
        py::arg("seed") = EstimateOptions{}.seed);

    m.attr("__version__") = "0.1.0";
}
