// SPDX-License-Identifier: Apache-2.0
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "subexp/capacity_dp.hpp"
#include "subexp/config.hpp"
#include "subexp/convex.hpp"
#include "subexp/errors.hpp"
#include "subexp/expectation.hpp"
#include "subexp/inequalities.hpp"
#include "subexp/runner.hpp"
#include "subexp/sampler.hpp"

namespace py = pybind11;
using namespace subexp;

namespace {

Point to_point(const py::handle& v) {
    if (py::isinstance<py::float_>(v) || py::isinstance<py::int_>(v)) return Point{v.cast<double>()};
    return v.cast<Point>();
}

TestFunction wrap(const AmbiguitySet& set, py::function f) {
    if (set.dimension() == 1)
        return {[f](std::span<const double> x) { return f(x[0]).cast<double>(); }, kInf, kInf, 1.0};
    return {[f](std::span<const double> x) { return f(Point(x.begin(), x.end())).cast<double>(); }, kInf, kInf, 1.0};
}

Mode to_mode(const std::string& s) {
    if (s == "upper") return Mode::Upper;
    if (s == "lower") return Mode::Lower;
    throw ValueError("mode must be \"upper\" or \"lower\"");
}

Transform to_transform(const std::string& kind, double power) {
    if (kind == "abs") return Transform::abs_power(power);
    if (kind == "positive") return Transform::positive_part(power);
    if (kind == "negative") return Transform::negative_part(power);
    throw ValueError("transform must be \"abs\", \"positive\" or \"negative\"");
}

}  // namespace

PYBIND11_MODULE(_subexp, m) {
    m.doc() = "Sub-linear expectations over finite ambiguity sets: capacities, exact DP and LLN experiments";

    static py::exception<Error> base(m, "SubexpError", PyExc_ValueError);
#define SUBEXP_PY_ERROR(Name) py::register_exception<Name>(m, #Name, base.ptr())
    SUBEXP_PY_ERROR(ValueError);
    SUBEXP_PY_ERROR(SchemaError);
    SUBEXP_PY_ERROR(NonIntegrable);
    SUBEXP_PY_ERROR(NotConvergent);
    SUBEXP_PY_ERROR(QuadratureNotConverged);
    SUBEXP_PY_ERROR(DimensionTooLarge);
    SUBEXP_PY_ERROR(TargetOutOfRange);
    SUBEXP_PY_ERROR(TargetOutsideM);
    SUBEXP_PY_ERROR(StateSpaceTooLarge);
    SUBEXP_PY_ERROR(NonLattice);
    SUBEXP_PY_ERROR(TooLargeForBruteForce);
    SUBEXP_PY_ERROR(MuNotAttainable);
    SUBEXP_PY_ERROR(UnsupportedMode);
#undef SUBEXP_PY_ERROR

    py::class_<Distribution>(m, "Distribution")
        .def_static(
            "finite",
            [](const py::list& atoms) {
                std::vector<Atom> out;
                for (const auto& item : atoms) {
                    auto pair = item.cast<py::tuple>();
                    if (pair.size() != 2) throw ValueError("atoms are (value, weight) pairs");
                    out.push_back({to_point(pair[0]), pair[1].cast<double>()});
                }
                return Distribution::finite(std::move(out));
            },
            py::arg("atoms"), "Finite distribution from (value, weight) pairs; values are floats or sequences.")
        .def_static("pareto", &Distribution::pareto, py::arg("alpha"), py::arg("scale") = 1.0,
                    py::arg("right_mass") = 0.5)
        .def_property_readonly("dimension", &Distribution::dimension)
        .def_property_readonly("is_pareto", &Distribution::is_pareto)
        .def("mean", &Distribution::mean);

    py::class_<AmbiguitySet>(m, "AmbiguitySet")
        .def(py::init<std::vector<Distribution>, std::string>(), py::arg("members"), py::arg("label") = "model")
        .def_property_readonly("size", &AmbiguitySet::size)
        .def_property_readonly("dimension", &AmbiguitySet::dimension)
        .def_property_readonly("label", &AmbiguitySet::label)
        .def("__len__", &AmbiguitySet::size);

    py::class_<Interval>(m, "Interval")
        .def_static("at_least", &Interval::at_least)
        .def_static("greater_than", &Interval::greater_than)
        .def_static("at_most", &Interval::at_most)
        .def_static("less_than", &Interval::less_than)
        .def_static("closed", &Interval::closed)
        .def_static("open", &Interval::open)
        .def("contains", &Interval::contains);

    m.def("upper_expectation", [](const AmbiguitySet& s, py::function f) { return upper_expectation(s, wrap(s, f)); },
          py::arg("set"), py::arg("f"), "max over members of E_P[f(X)]");
    m.def("lower_expectation", [](const AmbiguitySet& s, py::function f) { return lower_expectation(s, wrap(s, f)); },
          py::arg("set"), py::arg("f"));
    m.def("upper_capacity", &event_upper_capacity, py::arg("set"), py::arg("event"), py::arg("coord") = 0);
    m.def("lower_capacity", &event_lower_capacity, py::arg("set"), py::arg("event"), py::arg("coord") = 0);
    m.def("choquet_integral",
          [](const AmbiguitySet& s, const std::string& kind, double power) {
              return choquet_integral(s, to_transform(kind, power));
          },
          py::arg("set"), py::arg("kind") = "abs", py::arg("power") = 1.0);
    m.def("truncated_expectation",
          [](const AmbiguitySet& s, double c, int sign) { return truncated_expectation(s, c, sign >= 0 ? Sign::Plus : Sign::Minus); },
          py::arg("set"), py::arg("c"), py::arg("sign") = 1);
    m.def("breve_expectation",
          [](const AmbiguitySet& s, double tol) {
              const auto r = breve_expectation(s, tol);
              py::dict d;
              d["upper_mean"] = r.upper_mean;
              d["lower_mean"] = r.lower_mean;
              d["upper_second"] = r.upper_second;
              d["truncation_used"] = r.truncation_used;
              d["converged"] = r.converged;
              return d;
          },
          py::arg("set"), py::arg("tol") = 1e-12);

    py::class_<MeanSet>(m, "MeanSet")
        .def_property_readonly("dimension", &MeanSet::dimension)
        .def_property_readonly("support_values", &MeanSet::support_values)
        .def("distance", [](const MeanSet& ms, const Point& y) { return ms.distance(y); })
        .def("contains", [](const MeanSet& ms, const Point& y, double tol) { return ms.contains(y, tol); },
             py::arg("y"), py::arg("tol"))
        .def("default_tolerance", &MeanSet::default_tolerance);
    m.def("build_mean_set", &build_mean_set, py::arg("set"), py::arg("delta"));
    m.def("support_function", [](const AmbiguitySet& s, const Point& p) { return support_function(s, p); });

    py::class_<Strategy>(m, "Strategy")
        .def_static("pure", &Strategy::pure, py::arg("member"), py::arg("member_count"), py::arg("label") = "pure")
        .def_static("stationary", &Strategy::stationary, py::arg("weights"), py::arg("label") = "stationary")
        .def_readonly("label", &Strategy::label)
        .def_property_readonly("block_ends", [](const Strategy& s) {
            std::vector<std::size_t> ends;
            for (const auto& b : s.blocks) ends.push_back(b.end);
            return ends;
        });
    m.def("stationary_for_target", &stationary_for_target, py::arg("set"), py::arg("b"));
    m.def("oscillation_schedule",
          [](const AmbiguitySet& s, std::size_t k) { return oscillation_schedule(s, k); }, py::arg("set"),
          py::arg("epochs"));
    m.def("sample_path",
          [](const AmbiguitySet& s, const Strategy& st, std::size_t n, std::uint64_t seed) {
              return sample_path(s, st, n, seed).partial_sums;
          },
          py::arg("set"), py::arg("strategy"), py::arg("n"), py::arg("seed"),
          "Row-major partial sums S_1..S_n (n x d values).");

    py::class_<LatticeModel>(m, "LatticeModel")
        .def(py::init<AmbiguitySet, double>(), py::arg("set"), py::arg("quantum"))
        .def_property_readonly("quantum", &LatticeModel::quantum);

    py::class_<PathFunctional>(m, "PathFunctional")
        .def_static("terminal_sum",
                    [](std::size_t n, py::function phi) {
                        return PathFunctional::terminal_sum(n, [phi](double s) { return phi(s).cast<double>(); });
                    },
                    py::arg("n"), py::arg("phi"))
        .def_static("terminal_event", &PathFunctional::terminal_event, py::arg("n"), py::arg("event"))
        .def_static("running_max", &PathFunctional::running_max, py::arg("n"), py::arg("x"),
                    py::arg("absolute") = false)
        .def_readonly("horizon", &PathFunctional::horizon)
        .def_readonly("description", &PathFunctional::description);
    m.def("dp_value",
          [](const LatticeModel& model, const PathFunctional& f, const std::string& mode) {
              return dp_value(model, f, to_mode(mode), 1);
          },
          py::arg("model"), py::arg("functional"), py::arg("mode") = "upper");
    m.def("brute_force_value",
          [](const LatticeModel& model, const PathFunctional& f, const std::string& mode) {
              return brute_force_value(model, f, to_mode(mode));
          },
          py::arg("model"), py::arg("functional"), py::arg("mode") = "upper");

    m.def("kolmogorov_upper_bound", &kolmogorov_upper_bound, py::arg("b2"), py::arg("x"));
    m.def("exponential_bound", &exponential_bound, py::arg("b2"), py::arg("x"), py::arg("y"));
    m.def("kolmogorov_lower_capacity_bound",
          [](const std::vector<double>& seconds, const std::vector<Point>& mus, double x) {
              return kolmogorov_lower_capacity_bound(seconds, mus, x);
          },
          py::arg("second_moments"), py::arg("mus"), py::arg("x"));
    m.def("check_inequality",
          [](const LatticeModel& model, const std::string& which, std::size_t n, double x) {
              Inequality w;
              if (which == "kolmogorov_upper") w = Inequality::KolmogorovUpper;
              else if (which == "kolmogorov_lower") w = Inequality::KolmogorovLower;
              else if (which == "exponential") w = Inequality::Exponential;
              else throw ValueError("unknown inequality " + which);
              const auto r = check_inequality(model, w, n, x);
              py::dict d;
              d["lhs"] = r.lhs;
              d["rhs"] = r.rhs;
              d["satisfied"] = r.satisfied;
              d["context"] = r.context;
              return d;
          },
          py::arg("model"), py::arg("which"), py::arg("n"), py::arg("x"));

    m.def("parse_config", [](const std::string& text) { return parse_config(text).resolved.dump(); },
          py::arg("text"), "Validate a config document and return the resolved config as JSON text.");
    m.def("run_config",
          [](const std::string& text, const std::string& out_dir) {
              auto cfg = parse_config(text);
              cfg.set_output_dir(out_dir);
              std::ostringstream log;
              const int code = run(cfg, log);
              return py::make_tuple(code, log.str());
          },
          py::arg("text"), py::arg("out_dir"), "Run a config; returns (exit_code, log).");
}
