#ifndef VORTEXFORGE_DIAGNOSTICS_HPP
#define VORTEXFORGE_DIAGNOSTICS_HPP

#include <nlohmann/json_fwd.hpp>

#include "vortexforge/hollowvortex.hpp"

namespace vf {

// Degenerate sups are reported as this sentinel so JSON stays finite-valued.
inline constexpr double diag_sentinel = 1e300;

struct DiagnosticsReport {
    double n_conf = 0;
    double n_vel = 0;
    std::vector<double> perimeters;
    std::vector<double> areas;
    double vacuum_area = 0;
    double moment_inertia = 0;
    double excess_L = 0;
    std::vector<double> circulations;
    std::vector<double> speed_identity_resid;
    std::vector<double> flux_spread;
    bool winding_ok = false;
    bool boundary_injective = false;
    bool mutually_exterior = false;
    double phi_resid = 0;
    double o_delta_margin = 0;         // inf_k inf_T |1 + rho Z mu'|
    double noncircularity = 0;         // max radial deviation / rho
    double u_constancy = 0;            // max over circles of (max - min) |U|
    double momentum_identity = -1.0;   // rotating scenarios only; -1 when not evaluated

    // The |U|-constancy gate doubles as a resolution gate: it fails when the Galerkin
    // tail of the Bernoulli condition is under-resolved, triggering N escalation.
    bool gates_ok(double o_delta_gate, double u_const_gate = 1e-9) const {
        return winding_ok && boundary_injective && mutually_exterior &&
               o_delta_margin > o_delta_gate && u_constancy < u_const_gate;
    }
};

struct GeometrySummary {
    std::vector<double> perimeters;
    std::vector<double> areas;
    double vacuum_area;
    double moment_inertia;
};

double n_conf(const FlowFields& F);
double n_vel(const FlowFields& F);
GeometrySummary boundary_geometry(const FlowFields& F);

struct WindingReport {
    bool winding_ok;
    bool boundary_injective;
    bool mutually_exterior;
    double max_winding_integral;
};

WindingReport winding_injectivity(const FlowFields& F);

double speed_identity_residual(const FlowFields& F, int k);
// margin = M sup|U| - |c| (translating states).
double wave_speed_check(const FlowFields& F);

// Excess angular momentum L = Im ∬ f conj(f_zeta) d(w - w0) dA over D_rho:
// 2D tensor-product quadrature (radial Gauss x angular trapezoid) on D_rho ∩ B_R
// plus the exact boundary tail at |zeta| = R; R doubles until the increment is small.
struct AngularMomentumSettings {
    int n_theta = 320;
    int n_radial_panels = 64;
    int gauss_order = 16;
    double r_increment_tol = 1e-6;
    int max_doublings = 6;
};

double excess_angular_momentum(const FlowFields& F, const AngularMomentumSettings& s = {});
// Oracle route: the same integral reduced exactly to boundary terms by Stokes.
double excess_angular_momentum_boundary(const FlowFields& F);

// Exact rotating momentum identity (z-plane form of the L/I relation):
//   L + W0_bnd - Omega I + (1/4 Omega) Im ∮_{dD} z U^2 dz - (sum gamma)^2/(8 pi Omega) = 0,
// where W0_bnd = -sum_k Im[(1/2i) ∮ |f_k|^2 w0'(zeta_k + rho tau) rho dtau].
// Returns the relative residual; L is supplied so an independent quadrature can be used.
double momentum_identity_residual(const FlowFields& F, double L);
double momentum_identity_residual(const FlowFields& F);

double flux_spread(const FlowFields& F, int k);

struct AppendixLimitRow {
    double rho;
    cplx plain_integral;       // over dD (clockwise), translation-type combination
    double weighted_integral;  // Re of the f-weighted combination
};

struct AppendixLimitTable {
    std::vector<AppendixLimitRow> rows;
    cplx plain_limit;      // -sum gamma_k conj(V_k)
    double weighted_limit; // -Re sum gamma_k zeta_k V_k
};

// Zero-density boundary integrals of Appendix A against their point-vortex limits.
AppendixLimitTable appendix_limit_check(const VortexConfiguration& cfg,
                                        const std::vector<double>& rhos, int N = 32);

DiagnosticsReport run_diagnostics(const HollowState& u, bool with_momentum = false);

void to_json(nlohmann::json& j, const DiagnosticsReport& r);
void from_json(const nlohmann::json& j, DiagnosticsReport& r);

}  // namespace vf

#endif
