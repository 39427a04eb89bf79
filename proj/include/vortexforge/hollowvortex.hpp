#ifndef VORTEXFORGE_HOLLOWVORTEX_HPP
#define VORTEXFORGE_HOLLOWVORTEX_HPP

#include <Eigen/Dense>
#include <memory>
#include <nlohmann/json_fwd.hpp>

#include "vortexforge/spectral.hpp"

namespace vf {

// Full discrete representation of a hollow-vortex candidate: the unknown
// u = (mu, nu, Q, lambda) paired with rho; base supplies lambda' and the lambda slots.
struct HollowState {
    DensityVector mu;
    DensityVector nu;
    std::vector<double> Q;
    std::vector<double> lambda;
    double rho = 0.0;
    VortexConfiguration base;
    ParameterSplit split;

    int M() const { return base.size(); }
    int N() const { return mu.empty() ? 0 : mu[0].N(); }
    // base with the lambda values written into the varying slots
    VortexConfiguration config() const;
    void validate() const;
};

// w0(zeta) = sum gamma_k/(2 pi i) log(zeta - zeta_k), principal log branches.
cplx build_w0(const VortexConfiguration& cfg, cplx zeta);
cplx w0_zeta(const VortexConfiguration& cfg, cplx zeta);

// V_k^rho(tau) = (dW0 - gamma_k/(2 pi i (zeta-zeta_k)))|_{zeta = zeta_k + rho tau},
// by direct evaluation of the regular part.
GridFunction eval_Vrho(double rho, const VortexConfiguration& cfg, int k, int Nq);

// Per-solve cache of boundary data: off-diagonal kernels, V^rho, w0' traces.
// Rebuild whenever (rho, centers, gammas, c, Omega, N, Nq) change.
struct BoundaryContext {
    double rho = 0.0;
    VortexConfiguration cfg;
    int N = 0;
    int Nq = 0;
    std::vector<cplx> tau;
    std::vector<std::vector<std::vector<cplx>>> kernels;  // [k][j] row-major Nq x Nq, j != k
    std::vector<std::vector<cplx>> Vrho;                  // per vortex, on the grid
    // rho * w0'(zeta_k + rho tau); finite at rho = 0 where it equals gamma_k/(2 pi i tau)
    std::vector<std::vector<cplx>> rho_w0p;

    BoundaryContext(double rho, const VortexConfiguration& cfg, int N, int Nq = 0);
    // Z_k^rho applied to the deriv_order-th tau-derivative of the density vector.
    std::vector<cplx> apply_Z(const DensityVector& dens, int k, int deriv_order) const;
};

// Residual grids of the abstract operator F = (A, B) on the Nq nodes.
struct Residual {
    std::vector<std::vector<double>> A;  // kinematic, mean-zero
    std::vector<std::vector<double>> B;  // Bernoulli, constant mode retained
};

std::vector<std::vector<double>> kinematic_residual(const HollowState& u);
std::vector<std::vector<double>> bernoulli_residual(const HollowState& u);
Residual full_residual(const HollowState& u, const BoundaryContext& ctx);
Residual full_residual(const HollowState& u);

// Normalized Bernoulli constant to boundary speed: q_k^2 = (gamma_k^2/4pi^2 + rho Q_k)/rho^2.
double q_from_state(const HollowState& u, int k);

// ∮ w_zeta dzeta / (2 pi i factor folded in) on a circle of radius 1.5 rho about zeta_k.
double circulation(const HollowState& u, int k);

// The identity maps phi_t/phi_r/phi_s evaluated on residual grids (A, B).
// J_plain and J_weighted are the two contour integrals; components() packs the
// class-appropriate real values (t: Im J_plain; r: Re J_weighted; s: all three).
struct HvPhi {
    cplx J_plain;
    cplx J_weighted;
    Eigen::VectorXd components(SteadyKind kind) const;
};

HvPhi hv_phi_integrals(const HollowState& u, const BoundaryContext& ctx,
                       const std::vector<std::vector<double>>& A,
                       const std::vector<std::vector<double>>& B);
Eigen::VectorXd hv_phi(SteadyKind kind, const std::vector<std::vector<double>>& A,
                       const std::vector<std::vector<double>>& B, const HollowState& u);

// Exact multiplier blocks of D_u F at the trivial solution (u0, 0), plus the
// row-reduced operator L_k = -(gamma^2/2pi^2) Re C mu' - Qdot + (2 gamma/pi) Re(i tau V_lam lamdot).
struct LinearizedTrivial {
    std::vector<double> gammas;
    Eigen::MatrixXd V_lambda_re;  // d(V_k)/d lambda, real-identified rows (Re, Im)
    // diagonal multipliers act per mode; dense assembly provided for tests
    Eigen::MatrixXd assemble_L(int N) const;          // (mu, Q, lambda) -> B-mode coefficients
    Eigen::MatrixXd assemble_full(int N) const;       // (mu, nu, Q, lambda) -> (A, B) modes
    int M() const { return static_cast<int>(gammas.size()); }
    int n_lambda() const { return static_cast<int>(V_lambda_re.cols()); }
};

LinearizedTrivial linearized_trivial(const VortexConfiguration& cfg, const ParameterSplit& split);

// Field evaluators assembled from a state; boundary traces cached.
class FlowFields {
  public:
    FlowFields(const HollowState& u);

    const HollowState& state() const { return u_; }
    const BoundaryContext& ctx() const { return *ctx_; }

    cplx f(cplx zeta) const;
    cplx f_zeta(cplx zeta) const;
    cplx w_zeta(cplx zeta) const;
    cplx dw_minus_w0(cplx zeta) const;  // = d/dzeta (w - w0)
    cplx U(cplx zeta) const;            // w_zeta/f_zeta + i Omega conj(f) - c
    double im_W(cplx zeta) const;       // relative stream function (single-valued)

    // boundary traces on circle k at the Nq nodes
    const std::vector<cplx>& f_trace(int k) const { return ftr_[k]; }
    const std::vector<cplx>& fp_trace(int k) const { return fptr_[k]; }
    const std::vector<cplx>& U_trace(int k) const { return Utr_[k]; }
    const std::vector<cplx>& wp_trace(int k) const { return wptr_[k]; }
    std::vector<double> imW_trace(int k) const;

  private:
    HollowState u_;
    std::shared_ptr<BoundaryContext> ctx_;
    std::vector<std::vector<cplx>> ftr_, fptr_, Utr_, wptr_;
};

FlowFields assemble_flow(const HollowState& u);

void to_json(nlohmann::json& j, const HollowState& u);
void from_json(const nlohmann::json& j, HollowState& u);

}  // namespace vf

#endif
