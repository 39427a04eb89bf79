#ifndef VORTEXFORGE_DESINGULARIZE_HPP
#define VORTEXFORGE_DESINGULARIZE_HPP

#include <functional>

#include "vortexforge/diagnostics.hpp"
#include "vortexforge/hollowvortex.hpp"

namespace vf {

enum class ScenarioKind { rotating_pair, stationary_tripole, translating_pair, general };

std::string to_string(ScenarioKind k);
ScenarioKind scenario_kind_from_string(const std::string& s);

// A desingularization scenario: base configuration, varying parameters, and (for the
// three symmetric scenarios) the per-vortex symmetry classes and reflection couplings.
struct Scenario {
    ScenarioKind kind = ScenarioKind::general;
    VortexConfiguration base;
    ParameterSplit split;

    static Scenario rotating_pair();
    static Scenario stationary_tripole();
    static Scenario translating_pair();
    static Scenario general(const VortexConfiguration& base, const ParameterSplit& split);
    static Scenario builtin(const std::string& name);

    SteadyKind steady() const { return steady_kind(base); }
    void validate() const;
};

struct NewtonSettings {
    double residual_tol = 1e-11;
    int max_iter = 25;
    double fd_step = 1e-7;
    int backtracking = 20;
    double min_rcond = 1e-12;  // reciprocal-condition floor before a near-singularity error
};

struct BranchPoint {
    HollowState state;
    DiagnosticsReport diagnostics;
    double arclength = 0.0;
    bool accepted = false;
};

enum class TerminationReason {
    conformal_degeneracy,
    velocity_degeneracy,
    parameter_blowup,
    angular_momentum_blowup,
    step_failure,
    max_steps
};

std::string to_string(TerminationReason r);

// Leading-order initial guess (effective straining flow S_k):
//   mu_k = (16 pi / gamma_k) rho Re(i S_k tau),  nu_k = -2 rho Re(S_k tau^2),
//   Q_k = -gamma_k Omega rho / pi,  lambda = lambda_0.
HollowState leading_guess(const Scenario& sc, double rho, int N = 64);

cplx straining_coefficient(const VortexConfiguration& cfg, int k);

struct NewtonReport {
    int iterations = 0;
    double residual = 0.0;
    double slack = 0.0;
};

// Symmetry-reduced (or slack-augmented, for general) Newton at fixed rho.
HollowState newton_solve(const HollowState& u_init, const Scenario& sc,
                         const NewtonSettings& settings = {}, NewtonReport* report = nullptr);

struct StepControl {
    double rho_start = 0.02;
    double rho_max = 0.9;
    double drho_init = 0.01;
    double drho_min = 1e-8;
    int max_steps = 50;
    double monitor_factor = 1e3;   // degeneracy when N_conf/N_vel exceed factor x first value
    double lambda_blowup = 1e6;
    double momentum_blowup = 1e6;
    double o_delta_gate = 1e-3;    // required inf |1 + rho Z mu'| margin
    double arclength_cond_switch = 1e8;  // pseudo-arclength handover condition number
    int N = 64;
    int N_max = 256;  // late-branch truncation escalation ceiling
    bool with_momentum_check = false;  // evaluate the rotating momentum identity per point
    // resume support: monitor baselines from the branch's first accepted point (0 = from start)
    double monitor_baseline_n_conf = 0.0;
    double monitor_baseline_n_vel = 0.0;
};

struct ContinuationResult {
    std::vector<BranchPoint> points;
    TerminationReason reason = TerminationReason::max_steps;
    std::string note;
};

using BranchCallback = std::function<void(const BranchPoint&)>;

ContinuationResult continue_branch(const Scenario& sc, const StepControl& ctrl,
                                   const NewtonSettings& settings = {},
                                   const BranchCallback& on_accept = {});
// Resume variant: continues from a previously accepted state.
ContinuationResult continue_branch_from(const Scenario& sc, const HollowState& start,
                                        double arclength0, const StepControl& ctrl,
                                        const NewtonSettings& settings = {},
                                        const BranchCallback& on_accept = {});

struct FarFieldCoeffs {
    // coefficient of (zeta - zeta_k)^{-1} in f - id and of (zeta - zeta_k)^{-3} in w' - w0'
    std::vector<cplx> f_simple_pole;
    std::vector<cplx> w_cubic;
};

FarFieldCoeffs far_field_coeffs(const HollowState& u);

}  // namespace vf

#endif
