#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "vortexforge/branchio.hpp"
#include "vortexforge/desingularize.hpp"

namespace py = pybind11;
using namespace vf;

namespace {

VortexConfiguration make_config(std::vector<double> gammas, std::vector<cplx> centers, double c,
                                double omega) {
    VortexConfiguration cfg{std::move(gammas), std::move(centers), c, omega};
    cfg.validate();
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "steady hollow-vortex desingularization: point-vortex equilibria, "
              "layer-potential spectral operators, Newton continuation";

    py::register_exception<domain_error>(m, "DomainError");
    py::register_exception<convergence_error>(m, "ConvergenceError");
    py::register_exception<input_error>(m, "InputError");

    py::enum_<SteadyKind>(m, "SteadyKind")
        .value("translating", SteadyKind::translating)
        .value("rotating", SteadyKind::rotating)
        .value("stationary", SteadyKind::stationary);

    py::class_<VortexConfiguration>(m, "VortexConfiguration")
        .def(py::init(&make_config), py::arg("gammas"), py::arg("centers"), py::arg("c") = 0.0,
             py::arg("omega") = 0.0)
        .def_readwrite("gammas", &VortexConfiguration::gammas)
        .def_readwrite("centers", &VortexConfiguration::centers)
        .def_readwrite("c", &VortexConfiguration::c)
        .def_readwrite("omega", &VortexConfiguration::omega)
        .def("size", &VortexConfiguration::size)
        .def("min_gap", &VortexConfiguration::min_gap);

    py::class_<ParameterSplit>(m, "ParameterSplit")
        .def(py::init([](const std::vector<std::string>& names, int M) {
                 return ParameterSplit::from_names(names, M);
             }),
             py::arg("names"), py::arg("M"))
        .def_readwrite("varying", &ParameterSplit::varying);

    py::class_<SteadyClass>(m, "SteadyClass")
        .def_readonly("kind", &SteadyClass::kind)
        .def_readonly("codim", &SteadyClass::codim)
        .def_readonly("nondegenerate", &SteadyClass::nondegenerate)
        .def_readonly("rank_ambiguous", &SteadyClass::rank_ambiguous);

    m.def("eval_pv_residual", &eval_pv_residual);
    m.def("pv_jacobian", &pv_jacobian);
    m.def("check_pv_identities", &check_pv_identities);
    m.def("classify_nondegeneracy", &classify_nondegeneracy);
    m.def("solve_steady_pv", [](const VortexConfiguration& c, const ParameterSplit& s) {
        return solve_steady_pv(c, s);
    });
    m.def("pv_velocity", &pv_velocity);
    m.def("advance_dynamics", &advance_dynamics, py::arg("cfg"), py::arg("dt"), py::arg("steps"));

    py::class_<SpectralDensity>(m, "SpectralDensity")
        .def(py::init<int>())
        .def(py::init([](const std::vector<cplx>& coeffs) {
            SpectralDensity d;
            d.coeffs = coeffs;
            return d;
        }))
        .def_readwrite("coeffs", &SpectralDensity::coeffs)
        .def("N", &SpectralDensity::N);

    py::class_<GridFunction>(m, "GridFunction")
        .def(py::init<int>())
        .def_readwrite("values", &GridFunction::values)
        .def("Nq", &GridFunction::Nq);

    m.def("to_grid", &to_grid, py::arg("d"), py::arg("Nq"), py::arg("deriv_order") = 0);
    m.def("to_coeffs", &to_coeffs);
    m.def("cauchy", &cauchy);
    m.def("trace_Z", &trace_Z, py::arg("rho"), py::arg("cfg"), py::arg("dens"), py::arg("k"),
          py::arg("Nq") = 0, py::arg("deriv_order") = 0);
    m.def("field_Z", &field_Z, py::arg("rho"), py::arg("cfg"), py::arg("dens"), py::arg("zeta"),
          py::arg("Nq") = 0, py::arg("deriv_order") = 0);
    m.def("field_Z_series", &field_Z_series, py::arg("rho"), py::arg("cfg"), py::arg("dens"),
          py::arg("zeta"), py::arg("deriv_order") = 0);
    m.def("recover_density", &recover_density);

    py::class_<HollowState>(m, "HollowState")
        .def_readwrite("mu", &HollowState::mu)
        .def_readwrite("nu", &HollowState::nu)
        .def_readwrite("Q", &HollowState::Q)
        .def_readwrite("lam", &HollowState::lambda)
        .def_readwrite("rho", &HollowState::rho)
        .def("config", &HollowState::config)
        .def("N", &HollowState::N);

    py::enum_<ScenarioKind>(m, "ScenarioKind")
        .value("rotating_pair", ScenarioKind::rotating_pair)
        .value("stationary_tripole", ScenarioKind::stationary_tripole)
        .value("translating_pair", ScenarioKind::translating_pair)
        .value("general", ScenarioKind::general);

    py::class_<Scenario>(m, "Scenario")
        .def_static("rotating_pair", &Scenario::rotating_pair)
        .def_static("stationary_tripole", &Scenario::stationary_tripole)
        .def_static("translating_pair", &Scenario::translating_pair)
        .def_static("general", &Scenario::general)
        .def_readonly("kind", &Scenario::kind)
        .def_readonly("base", &Scenario::base);

    py::class_<DiagnosticsReport>(m, "DiagnosticsReport")
        .def_readonly("n_conf", &DiagnosticsReport::n_conf)
        .def_readonly("n_vel", &DiagnosticsReport::n_vel)
        .def_readonly("perimeters", &DiagnosticsReport::perimeters)
        .def_readonly("areas", &DiagnosticsReport::areas)
        .def_readonly("vacuum_area", &DiagnosticsReport::vacuum_area)
        .def_readonly("moment_inertia", &DiagnosticsReport::moment_inertia)
        .def_readonly("excess_L", &DiagnosticsReport::excess_L)
        .def_readonly("circulations", &DiagnosticsReport::circulations)
        .def_readonly("speed_identity_resid", &DiagnosticsReport::speed_identity_resid)
        .def_readonly("flux_spread", &DiagnosticsReport::flux_spread)
        .def_readonly("winding_ok", &DiagnosticsReport::winding_ok)
        .def_readonly("boundary_injective", &DiagnosticsReport::boundary_injective)
        .def_readonly("mutually_exterior", &DiagnosticsReport::mutually_exterior)
        .def_readonly("phi_resid", &DiagnosticsReport::phi_resid)
        .def_readonly("momentum_identity", &DiagnosticsReport::momentum_identity);

    py::class_<BranchPoint>(m, "BranchPoint")
        .def_readonly("state", &BranchPoint::state)
        .def_readonly("diagnostics", &BranchPoint::diagnostics)
        .def_readonly("arclength", &BranchPoint::arclength)
        .def_readonly("accepted", &BranchPoint::accepted);

    py::enum_<TerminationReason>(m, "TerminationReason")
        .value("conformal_degeneracy", TerminationReason::conformal_degeneracy)
        .value("velocity_degeneracy", TerminationReason::velocity_degeneracy)
        .value("parameter_blowup", TerminationReason::parameter_blowup)
        .value("angular_momentum_blowup", TerminationReason::angular_momentum_blowup)
        .value("step_failure", TerminationReason::step_failure)
        .value("max_steps", TerminationReason::max_steps);

    m.def("leading_guess", &leading_guess, py::arg("scenario"), py::arg("rho"), py::arg("N") = 64);
    m.def(
        "newton_solve",
        [](const HollowState& u, const Scenario& sc, double tol, int max_iter) {
            NewtonSettings st;
            st.residual_tol = tol;
            st.max_iter = max_iter;
            return newton_solve(u, sc, st);
        },
        py::arg("u_init"), py::arg("scenario"), py::arg("residual_tol") = 1e-11,
        py::arg("max_iter") = 25);
    m.def(
        "continue_branch",
        [](const Scenario& sc, double rho_start, double rho_max, int max_steps, int N) {
            StepControl ctrl;
            ctrl.rho_start = rho_start;
            ctrl.rho_max = rho_max;
            ctrl.max_steps = max_steps;
            ctrl.N = N;
            auto res = continue_branch(sc, ctrl);
            return std::make_pair(res.points, res.reason);
        },
        py::arg("scenario"), py::arg("rho_start") = 0.02, py::arg("rho_max") = 0.9,
        py::arg("max_steps") = 50, py::arg("N") = 64);
    m.def("run_diagnostics", &run_diagnostics, py::arg("state"), py::arg("with_momentum") = false);
    m.def("kinematic_residual", &kinematic_residual);
    m.def("bernoulli_residual", &bernoulli_residual);
    m.def("q_from_state", &q_from_state);
    m.def("circulation", &circulation);

    m.def("state_to_json", [](const HollowState& u) {
        nlohmann::json j;
        to_json(j, u);
        return json_compact(j);
    });
    m.def("state_from_json", [](const std::string& s) {
        HollowState u;
        from_json(nlohmann::json::parse(s), u);
        return u;
    });

#ifdef VORTEXFORGE_VERSION
    m.attr("__version__") = VORTEXFORGE_VERSION;
#else
    m.attr("__version__") = "dev";
#endif
}
