#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <variant>

#include "ep/background.hpp"
#include "ep/commands.hpp"
#include "ep/config.hpp"
#include "ep/errors.hpp"
#include "ep/field3d.hpp"
#include "ep/fields_analytic.hpp"
#include "ep/iteration.hpp"

namespace py = pybind11;

namespace {

std::string regime_string(const ep::FlowRegime& r) {
  if (std::holds_alternative<ep::Subsonic>(r)) return "subsonic";
  if (std::holds_alternative<ep::TransonicCandidate>(r)) return "transonic_candidate";
  if (std::holds_alternative<ep::Transonic>(r)) return "transonic";
  return "invalid";
}

ep::SolveReport solve_config(const ep::RunConfig& cfg) {
  const ep::BackgroundProfile p = ep::integrate_background(cfg.inlet, cfg.n_nodes);
  ep::SolveOptions opts;
  opts.tol = cfg.tol;
  opts.max_iter = cfg.max_iter;
  opts.delta_guard = cfg.delta_guard;
  opts.grid = cfg.grid();
  return ep::fixed_point_solve(p, cfg.boundary(), opts);
}

py::dict report_dict(const ep::EquivalenceReport& rep) {
  py::dict d;
  d["euler_poisson"] = std::vector<double>(rep.euler_poisson_sup.begin(),
                                           rep.euler_poisson_sup.end());
  d["decomposition"] = std::vector<double>(rep.decomposition_sup.begin(),
                                           rep.decomposition_sup.end());
  return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "steady axisymmetric Euler-Poisson flows in a concentric cylinder";

  static py::exception<ep::solver_error> solver_exc(m, "SolverError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ep::solver_error& e) {
#if defined(PYBIND11_VERSION_HEX) && PYBIND11_VERSION_HEX >= 0x020C0000
      py::set_error(solver_exc, e.what());
#else
      PyErr_SetString(solver_exc.ptr(), e.what());
#endif
    }
  });

  py::class_<ep::Grid2D>(m, "Grid2D")
      .def(py::init<int, int, double, double>(), py::arg("nr"), py::arg("nz"),
           py::arg("r0"), py::arg("r1"))
      .def_readonly("nr", &ep::Grid2D::nr)
      .def_readonly("nz", &ep::Grid2D::nz)
      .def_readonly("r0", &ep::Grid2D::r0)
      .def_readonly("r1", &ep::Grid2D::r1)
      .def_readonly("hr", &ep::Grid2D::hr)
      .def_readonly("hz", &ep::Grid2D::hz)
      .def("r", &ep::Grid2D::r, py::arg("i"))
      .def("z", &ep::Grid2D::z, py::arg("j"))
      .def("idx", &ep::Grid2D::idx, py::arg("i"), py::arg("j"));

  py::class_<ep::ScalarField2D>(m, "ScalarField2D")
      .def_readonly("values", &ep::ScalarField2D::v);

  py::class_<ep::InletData>(m, "InletData")
      .def(py::init<>())
      .def_readwrite("gamma", &ep::InletData::gamma)
      .def_readwrite("rho0", &ep::InletData::rho0)
      .def_readwrite("u10", &ep::InletData::u10)
      .def_readwrite("u20", &ep::InletData::u20)
      .def_readwrite("a0", &ep::InletData::a0)
      .def_readwrite("e0", &ep::InletData::e0)
      .def_readwrite("b0", &ep::InletData::b0)
      .def_readwrite("r0", &ep::InletData::r0)
      .def_readwrite("r1", &ep::InletData::r1)
      .def("validate", &ep::InletData::validate)
      .def("sound_speed_sq", &ep::InletData::sound_speed_sq);

  py::class_<ep::MachState>(m, "MachState")
      .def_readonly("m1_sq", &ep::MachState::m1_sq)
      .def_readonly("m2_sq", &ep::MachState::m2_sq);

  py::class_<ep::BackgroundProfile>(m, "BackgroundProfile")
      .def_readonly("r_nodes", &ep::BackgroundProfile::r_nodes)
      .def_readonly("rho", &ep::BackgroundProfile::rho)
      .def_readonly("u1", &ep::BackgroundProfile::u1)
      .def_readonly("u2", &ep::BackgroundProfile::u2)
      .def_readonly("e_field", &ep::BackgroundProfile::e_field)
      .def_readonly("phi", &ep::BackgroundProfile::phi)
      .def_readonly("m1", &ep::BackgroundProfile::m1)
      .def_readonly("m2", &ep::BackgroundProfile::m2)
      .def_readonly("gamma", &ep::BackgroundProfile::gamma)
      .def("n", &ep::BackgroundProfile::n)
      .def("sound_speed_sq", &ep::BackgroundProfile::sound_speed_sq, py::arg("k"))
      .def_property_readonly(
          "regime", [](const ep::BackgroundProfile& p) { return regime_string(p.regime); });

  m.def("integrate_background", &ep::integrate_background, py::arg("inlet"),
        py::arg("n_nodes") = 2049,
        "Integrate the radial background flow from the inner boundary data.");
  m.def("mach_profile", &ep::mach_profile, py::arg("profile"));
  m.def(
      "find_sonic_radius",
      [](const ep::BackgroundProfile& p) -> py::object {
        const auto rc = ep::find_sonic_radius(p);
        if (rc) return py::float_(*rc);
        return py::none();
      },
      py::arg("profile"), "Sonic radius of a transonic profile, or None.");

  py::class_<ep::ProfileSpec>(m, "ProfileSpec")
      .def(py::init<>())
      .def_readwrite("kind", &ep::ProfileSpec::kind)
      .def_readwrite("amp", &ep::ProfileSpec::amp)
      .def_readwrite("k", &ep::ProfileSpec::k)
      .def_readwrite("coeffs", &ep::ProfileSpec::coeffs)
      .def_readwrite("xs", &ep::ProfileSpec::xs)
      .def_readwrite("ys", &ep::ProfileSpec::ys);

  py::class_<ep::RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_readwrite("inlet", &ep::RunConfig::inlet)
      .def_readwrite("n_nodes", &ep::RunConfig::n_nodes)
      .def_readwrite("nr", &ep::RunConfig::nr)
      .def_readwrite("nz", &ep::RunConfig::nz)
      .def_readwrite("eps", &ep::RunConfig::eps)
      .def_readwrite("u2_en", &ep::RunConfig::u2_en)
      .def_readwrite("u3_en", &ep::RunConfig::u3_en)
      .def_readwrite("a_en", &ep::RunConfig::a_en)
      .def_readwrite("k_en", &ep::RunConfig::k_en)
      .def_readwrite("phi_en", &ep::RunConfig::phi_en)
      .def_readwrite("u1_ex", &ep::RunConfig::u1_ex)
      .def_readwrite("phi_ex", &ep::RunConfig::phi_ex)
      .def_readwrite("b_radial", &ep::RunConfig::b_radial)
      .def_readwrite("b_axial", &ep::RunConfig::b_axial)
      .def_readwrite("tol", &ep::RunConfig::tol)
      .def_readwrite("max_iter", &ep::RunConfig::max_iter)
      .def_readwrite("delta_guard", &ep::RunConfig::delta_guard)
      .def_readwrite("outdir", &ep::RunConfig::outdir)
      .def_readwrite("sweep_eps", &ep::RunConfig::sweep_eps)
      .def("grid", &ep::RunConfig::grid);

  m.def("parse_config", &ep::parse_config, py::arg("text"));
  m.def("load_config", &ep::load_config, py::arg("path"));
  m.def("write_config", &ep::write_config, py::arg("cfg"));

  py::class_<ep::DeviationField>(m, "DeviationField")
      .def_readonly("W1", &ep::DeviationField::W1)
      .def_readonly("W2", &ep::DeviationField::W2)
      .def_readonly("W3", &ep::DeviationField::W3)
      .def_readonly("W4", &ep::DeviationField::W4)
      .def_readonly("W5", &ep::DeviationField::W5)
      .def_readonly("W6", &ep::DeviationField::W6)
      .def("sup_norm", &ep::DeviationField::sup_norm);

  py::class_<ep::ResidualNorms>(m, "ResidualNorms")
      .def_property_readonly(
          "sup",
          [](const ep::ResidualNorms& n) {
            return std::vector<double>(n.sup.begin(), n.sup.end());
          })
      .def_property_readonly("l2", [](const ep::ResidualNorms& n) {
        return std::vector<double>(n.l2.begin(), n.l2.end());
      });

  py::class_<ep::SolveReport>(m, "SolveReport")
      .def_readonly("field", &ep::SolveReport::field)
      .def_readonly("iters", &ep::SolveReport::iters)
      .def_readonly("increments_sup", &ep::SolveReport::increments_sup)
      .def_readonly("increments_c1", &ep::SolveReport::increments_c1)
      .def_readonly("contraction_ratio", &ep::SolveReport::contraction_ratio)
      .def_readonly("residuals", &ep::SolveReport::residuals);

  m.def("solve", &solve_config, py::arg("cfg"),
        "Run the perturbed fixed-point solver described by a run configuration.");

  m.def(
      "background_equivalence",
      [](const ep::InletData& inlet, int nr, int nth, int nz) {
        return report_dict(ep::equivalence_check(ep::lift_background(inlet, nr, nth, nz)));
      },
      py::arg("inlet"), py::arg("nr"), py::arg("nth"), py::arg("nz"),
      "Sup norms of both residual families on the lifted radial background.");

  m.def(
      "swirl_equivalence",
      [](int nr, int nth, int nz, double r0, double r1) {
        const ep::SwirlExact preset;
        return report_dict(ep::equivalence_check(ep::sample_field(preset, nr, nth, nz, r0, r1)));
      },
      py::arg("nr"), py::arg("nth"), py::arg("nz"), py::arg("r0"), py::arg("r1"),
      "Sup norms of both residual families on the exact swirling test flow.");

  m.def("run_command", &ep::run_command, py::arg("command"), py::arg("cfg"),
        py::arg("outdir"),
        "Run one CLI subcommand; file outputs are written under outdir.");
}
