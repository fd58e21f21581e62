#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "liouville/assembly.hpp"
#include "liouville/corpus.hpp"
#include "liouville/verify.hpp"
#include "liouville/zero_tracker.hpp"

namespace py = pybind11;
using namespace liouville;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const Array& a) {
  if (a.ndim() != 1) throw InvalidArgument("expected a one-dimensional array");
  return {a.data(), a.data() + a.size()};
}

// Applies a scalar function to a float or to every entry of an array.
template <class F>
py::object vectorize(F f, const py::object& arg) {
  if (py::isinstance<py::float_>(arg) || py::isinstance<py::int_>(arg)) return py::float_(f(arg.cast<double>()));
  const Array a = arg.cast<Array>();
  Array out(std::vector<py::ssize_t>(a.shape(), a.shape() + a.ndim()));
  const double* in = a.data();
  double* dst = out.mutable_data();
  for (py::ssize_t i = 0; i < a.size(); ++i) dst[i] = f(in[i]);
  return std::move(out);
}

py::array_t<double> grid_array(const FieldTable& table, double FieldRow::*field) {
  py::array_t<double> out({table.grid.nt, table.grid.nx});
  double* dst = out.mutable_data();
  for (std::size_t k = 0; k < table.rows.size(); ++k) dst[k] = table.rows[k].*field;
  return out;
}

}  // namespace

PYBIND11_MODULE(liouville, m) {
  m.doc() = "Exact Liouville field solutions from Cauchy data";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", error);
  py::register_exception<ParseError>(m, "ParseError", error);
  py::register_exception<UnknownIdentifier>(m, "UnknownIdentifier", error);
  py::register_exception<DomainError>(m, "DomainError", error);
  py::register_exception<UnboundParameter>(m, "UnboundParameter", error);
  py::register_exception<NotDifferentiable>(m, "NotDifferentiable", error);
  py::register_exception<OutOfDomain>(m, "OutOfDomain", error);
  py::register_exception<NumericFailure>(m, "NumericFailure", error);
  py::register_exception<WronskianViolation>(m, "WronskianViolation", error);
  py::register_exception<SingularSolution>(m, "SingularSolution", error);

  py::class_<Expr>(m, "Expr")
      .def("__call__", [](const Expr& e, const py::object& x, const Params& params) {
             return vectorize([&](double v) { return evaluate(e, v, params); }, x);
           }, py::arg("x"), py::arg("params") = Params{})
      .def("differentiate", &differentiate)
      .def("parameters", &parameters_of)
      .def("__str__", [](const Expr& e) { return to_string(e); })
      .def("__repr__", [](const Expr& e) { return "Expr('" + to_string(e) + "')"; })
      .def("__eq__", [](const Expr& a, const Expr& b) { return a == b; });
  m.def("parse", [](const std::string& text, const std::vector<std::string>& parameters,
                    const std::string& variable) { return parse(text, parameters, variable); },
        py::arg("text"), py::arg("parameters") = std::vector<std::string>{"m"},
        py::arg("variable") = "x");

  py::class_<Interval>(m, "Interval")
      .def(py::init<double, double>(), py::arg("lo"), py::arg("hi"))
      .def_readwrite("lo", &Interval::lo)
      .def_readwrite("hi", &Interval::hi)
      .def("__repr__", [](const Interval& i) {
        return "Interval(" + std::to_string(i.lo) + ", " + std::to_string(i.hi) + ")";
      });

  py::class_<CauchyData>(m, "CauchyData")
      .def_static("from_expressions",
                  py::overload_cast<std::string_view, std::string_view, const Params&>(
                      &CauchyData::from_expressions),
                  py::arg("phi"), py::arg("pi"), py::arg("params") = Params{})
      .def_static("from_samples", [](const Array& xs, const Array& phi, const Array& pi) {
                    const auto x = to_vector(xs), p = to_vector(phi), q = to_vector(pi);
                    return CauchyData::from_samples(x, p, q);
                  }, py::arg("xs"), py::arg("phi"), py::arg("pi"))
      .def_static("read_csv", [](const std::string& path) { return CauchyData::read_csv(path); })
      .def("phi", [](const CauchyData& d, const py::object& x, int order) {
             return vectorize([&](double v) { return d.phi(v, order); }, x);
           }, py::arg("x"), py::arg("order") = 0)
      .def("pi", [](const CauchyData& d, const py::object& x, int order) {
             return vectorize([&](double v) { return d.pi(v, order); }, x);
           }, py::arg("x"), py::arg("order") = 0)
      .def_property_readonly("is_closed_form", &CauchyData::is_closed_form)
      .def_property_readonly("support", &CauchyData::support);

  py::class_<PotentialPair>(m, "PotentialPair")
      .def("u", [](const PotentialPair& p, const py::object& s) {
        return vectorize([&](double v) { return p.u(v); }, s);
      })
      .def("w", [](const PotentialPair& p, const py::object& s) {
        return vectorize([&](double v) { return p.w(v); }, s);
      })
      .def_property_readonly("mass", &PotentialPair::mass);
  m.def("compute_potentials", &compute_potentials, py::arg("data"), py::arg("m"));

  py::enum_<Pairing>(m, "Pairing")
      .value("cross", Pairing::cross)
      .value("same_index", Pairing::same_index);

  py::class_<SpacetimeGrid>(m, "SpacetimeGrid")
      .def(py::init([](double t_min, double t_max, int nt, double x_min, double x_max, int nx) {
             SpacetimeGrid g{t_min, t_max, x_min, x_max, nt, nx};
             g.validate();
             return g;
           }), py::arg("t_min"), py::arg("t_max"), py::arg("nt"), py::arg("x_min"),
           py::arg("x_max"), py::arg("nx"))
      .def_readonly("t_min", &SpacetimeGrid::t_min)
      .def_readonly("t_max", &SpacetimeGrid::t_max)
      .def_readonly("nt", &SpacetimeGrid::nt)
      .def_readonly("x_min", &SpacetimeGrid::x_min)
      .def_readonly("x_max", &SpacetimeGrid::x_max)
      .def_readonly("nx", &SpacetimeGrid::nx)
      .def("chiral_hull", &SpacetimeGrid::chiral_hull, py::arg("x0") = 0.0);

  py::class_<SolveOptions>(m, "SolveOptions")
      .def(py::init([](double x0, double h, double margin, double drift_tolerance, Pairing pairing) {
             return SolveOptions{x0, h, margin, drift_tolerance, pairing};
           }), py::arg("x0") = 0.0, py::arg("h") = 1e-3, py::arg("margin") = 0.0,
           py::arg("drift_tolerance") = 1e-8, py::arg("pairing") = Pairing::cross)
      .def_readwrite("x0", &SolveOptions::x0)
      .def_readwrite("h", &SolveOptions::h)
      .def_readwrite("margin", &SolveOptions::margin)
      .def_readwrite("drift_tolerance", &SolveOptions::drift_tolerance)
      .def_readwrite("pairing", &SolveOptions::pairing);

  py::class_<LightConeValues>(m, "LightConeValues")
      .def_property_readonly("F", [](const LightConeValues& v) { return double(v.F); })
      .def_property_readonly("d_plus", [](const LightConeValues& v) { return double(v.d_plus); })
      .def_property_readonly("d_minus", [](const LightConeValues& v) { return double(v.d_minus); })
      .def_property_readonly("d_plus_minus",
                             [](const LightConeValues& v) { return double(v.d_plus_minus); })
      .def_property_readonly("identity", [](const LightConeValues& v) { return double(v.identity()); });

  py::class_<LiouvilleSolution>(m, "LiouvilleSolution")
      .def("eval_F", &LiouvilleSolution::eval_F, py::arg("t"), py::arg("x"))
      .def("eval_phi", &LiouvilleSolution::eval_phi, py::arg("t"), py::arg("x"))
      .def("contains", py::overload_cast<double, double>(&LiouvilleSolution::contains, py::const_),
           py::arg("t"), py::arg("x"))
      .def_property_readonly("mass", &LiouvilleSolution::mass)
      .def_property_readonly("pairing", &LiouvilleSolution::pairing)
      .def_property_readonly("chi_drift", &LiouvilleSolution::chi_drift)
      .def_property_readonly("psi_drift", &LiouvilleSolution::psi_drift)
      .def_property_readonly("chi_range", [](const LiouvilleSolution& s) { return s.chi().range(); })
      .def_property_readonly("psi_range", [](const LiouvilleSolution& s) { return s.psi().range(); });

  m.def("solve",
        py::overload_cast<const CauchyData&, double, const SpacetimeGrid&, const SolveOptions&>(&solve),
        py::arg("data"), py::arg("m"), py::arg("grid"), py::arg("options") = SolveOptions{},
        py::call_guard<py::gil_scoped_release>());
  m.def("solve",
        py::overload_cast<const CauchyData&, double, Interval, const SolveOptions&>(&solve),
        py::arg("data"), py::arg("m"), py::arg("chiral_range"), py::arg("options") = SolveOptions{},
        py::call_guard<py::gil_scoped_release>());

  m.def("evaluate_grid", [](const LiouvilleSolution& sol, const SpacetimeGrid& g) {
    FieldTable table;
    {
      py::gil_scoped_release release;
      table = evaluate_grid(sol, g);
    }
    py::dict out;
    out["t"] = grid_array(table, &FieldRow::t);
    out["x"] = grid_array(table, &FieldRow::x);
    out["F"] = grid_array(table, &FieldRow::F);
    out["phi"] = grid_array(table, &FieldRow::phi);
    out["min_abs_F"] = table.min_abs_F;
    return out;
  }, py::arg("solution"), py::arg("grid"));

  m.def("restrict_to_slice", [](const LiouvilleSolution& sol, const Array& xs) {
    const auto x = to_vector(xs);
    return restrict_to_slice(sol, x);
  }, py::arg("solution"), py::arg("xs"));

  py::enum_<ResidualMethod>(m, "ResidualMethod")
      .value("finite_difference", ResidualMethod::finite_difference)
      .value("light_cone", ResidualMethod::light_cone);
  py::class_<ResidualReport>(m, "ResidualReport")
      .def_readonly("sup_residual", &ResidualReport::sup_residual)
      .def_readonly("delta", &ResidualReport::delta)
      .def_readonly("at_t", &ResidualReport::at_t)
      .def_readonly("at_x", &ResidualReport::at_x);
  m.def("residual", &residual, py::arg("solution"), py::arg("grid"),
        py::arg("method") = ResidualMethod::light_cone, py::arg("delta") = 1e-3,
        py::call_guard<py::gil_scoped_release>());

  m.def("data_round_trip_error", &data_round_trip_error, py::arg("data"), py::arg("m"),
        py::arg("window"), py::arg("options") = SolveOptions{}, py::arg("samples") = 801);

  py::class_<ProbeRow>(m, "ProbeRow")
      .def_readonly("eps", &ProbeRow::eps)
      .def_readonly("input_distance", &ProbeRow::input_distance)
      .def_readonly("output_deviation", &ProbeRow::output_deviation)
      .def_readonly("slice_deviation", &ProbeRow::slice_deviation);
  py::class_<ProbeTable>(m, "ProbeTable")
      .def_readonly("rows", &ProbeTable::rows)
      .def("strictly_decreasing", &ProbeTable::strictly_decreasing)
      .def("ratios", &ProbeTable::ratios);
  auto probe = [](auto fn) {
    return [fn](const CauchyData& d, double mass, const std::vector<double>& eps,
                const SpacetimeGrid& g) {
      ProbeSetup setup;
      setup.grid = g;
      return fn(d, mass, eps, setup);
    };
  };
  m.def("continuity_probe", probe(&continuity_probe), py::arg("data"), py::arg("m"),
        py::arg("eps"), py::arg("grid"));
  m.def("inverse_continuity_probe", probe(&inverse_continuity_probe), py::arg("data"),
        py::arg("m"), py::arg("eps"), py::arg("grid"));

  py::class_<SpacetimePoint>(m, "SpacetimePoint")
      .def(py::init<double, double>(), py::arg("t"), py::arg("x"))
      .def_readonly("t", &SpacetimePoint::t)
      .def_readonly("x", &SpacetimePoint::x);
  py::class_<ZeroCurve>(m, "ZeroCurve")
      .def_readonly("covered", &ZeroCurve::covered)
      .def_readonly("truncation", &ZeroCurve::truncation)
      .def_property_readonly("t", [](const ZeroCurve& c) {
        std::vector<double> v;
        for (const auto& s : c.samples) v.push_back(s.t);
        return v;
      })
      .def_property_readonly("x", [](const ZeroCurve& c) {
        std::vector<double> v;
        for (const auto& s : c.samples) v.push_back(s.x);
        return v;
      });
  py::class_<LemmaReport>(m, "LemmaReport")
      .def_readonly("max_abs_F", &LemmaReport::max_abs_F)
      .def_readonly("min_abs_dFdx", &LemmaReport::min_abs_dFdx)
      .def_readonly("max_product_defect", &LemmaReport::max_product_defect)
      .def_readonly("coverage", &LemmaReport::coverage);
  m.def("find_seed_zeros", &find_seed_zeros, py::arg("solution"), py::arg("t0"),
        py::arg("x_range"), py::arg("n_scan") = 512);
  m.def("track", [](const LiouvilleSolution& sol, SpacetimePoint seed, Interval t_range, double ht) {
    TrackOptions o;
    o.ht = ht;
    return track(sol, seed, t_range, o);
  }, py::arg("solution"), py::arg("seed"), py::arg("t_range"), py::arg("ht") = 1e-2);
  m.def("lemma_report", &lemma_report, py::arg("curve"));

  m.def("solution_from_families", [](const std::string& chi1, const std::string& chi2,
                                     const std::string& psi1, const std::string& psi2,
                                     Interval range, double mass, double step) {
    auto pair = [&](const std::string& a, const std::string& b) {
      return WronskianPair::tabulate(parse(a, {}), parse(b, {}), range, step);
    };
    return build_solution(pair(chi1, chi2), pair(psi1, psi2), mass);
  }, py::arg("chi1"), py::arg("chi2"), py::arg("psi1"), py::arg("psi2"), py::arg("range"),
        py::arg("m") = 1.0, py::arg("step") = 1e-3);

  py::class_<CorpusEntry>(m, "CorpusEntry")
      .def_readonly("name", &CorpusEntry::name)
      .def_readonly("phi", &CorpusEntry::phi)
      .def_readonly("pi", &CorpusEntry::pi)
      .def_readonly("mass", &CorpusEntry::mass)
      .def("data", &CorpusEntry::data);
  m.def("smooth_corpus", &smooth_corpus, py::return_value_policy::reference);
}
