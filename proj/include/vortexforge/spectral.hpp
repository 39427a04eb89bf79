#ifndef VORTEXFORGE_SPECTRAL_HPP
#define VORTEXFORGE_SPECTRAL_HPP

#include <nlohmann/json_fwd.hpp>

#include "vortexforge/common.hpp"
#include "vortexforge/pointvortex.hpp"

namespace vf {

// Real mean-zero function on the unit circle, stored as Fourier coefficients
// hat(phi)_m for m = 1..N; negative modes implied by hat(phi)_{-m} = conj(hat(phi)_m).
struct SpectralDensity {
    std::vector<cplx> coeffs;

    SpectralDensity() = default;
    explicit SpectralDensity(int N) : coeffs(N, cplx(0.0)) {}
    int N() const { return static_cast<int>(coeffs.size()); }
    cplx& operator[](int m) { return coeffs[m - 1]; }  // 1-based mode access
    const cplx& operator[](int m) const { return coeffs[m - 1]; }
    double norm_inf() const;
};

using DensityVector = std::vector<SpectralDensity>;

// Complex samples at the equispaced nodes tau_j = exp(2 pi i j / Nq).
struct GridFunction {
    std::vector<cplx> values;

    GridFunction() = default;
    explicit GridFunction(int Nq) : values(Nq, cplx(0.0)) {}
    int Nq() const { return static_cast<int>(values.size()); }
};

std::vector<cplx> grid_nodes(int Nq);

// Quadrature size rule: de-aliasing margin for the quadratic/rational nonlinearities.
inline int default_Nq(int N) { return 4 * N; }

// Samples of the density's tau-derivative of given order (0, 1 or 2).
GridFunction to_grid(const SpectralDensity& d, int Nq, int deriv_order = 0);
// Modes 1..N of a real grid function (Nq >= 2N+1 required).
SpectralDensity to_coeffs(const GridFunction& g, int N);
// Full Laurent analysis: returns coefficients for modes 0..Nq-1 (FFT layout, /Nq applied).
std::vector<cplx> grid_to_laurent(const GridFunction& g);
// Coefficient of tau^m (any sign, |m| < Nq/2) from the FFT layout above.
cplx laurent_mode(const std::vector<cplx>& hat, int m);

// Cauchy operator: kills modes m >= 0 and negates m < 0. Exact in coefficient space.
GridFunction cauchy(const SpectralDensity& d, int Nq);
// C applied to the tau-derivative of given order of d, sampled on the grid.
GridFunction cauchy_deriv(const SpectralDensity& d, int Nq, int deriv_order);

enum class MultiplierKind { Re_C_dtau, Re_tauC_dtau, Re_itauC_dtau };

// Exact Fourier-multiplier action on a density; the Re_C_dtau result carries N+1 modes.
SpectralDensity apply_multiplier(MultiplierKind kind, const SpectralDensity& d);
// Inverse of Re_tauC_dtau (divide by |m|/2); target must be mean-zero by type.
SpectralDensity invert_multiplier(MultiplierKind kind, const SpectralDensity& target);

enum class ProjectRange { P_m, P_le_m, P_gt_m };
SpectralDensity project(ProjectRange range, int m, const SpectralDensity& d);

// Admissibility of (rho, Lambda): min gap > 2|rho| (membership in the open set U).
bool pair_admissible(double rho, const VortexConfiguration& cfg);
void require_admissible(double rho, const VortexConfiguration& cfg);

// Boundary trace of the layer potential on circle k:
//   Z_k^rho[mu](tau) = C mu_k(tau) + sum_{j!=k} (1/2 pi i) ∮ mu_j(s) rho/(rho(s-tau)+zeta_j-zeta_k) ds.
// The singular diagonal term is the exact multiplier C; off-diagonal kernels use the
// trapezoid rule on Nq nodes. deriv_order applies Z to the densities' tau-derivatives.
GridFunction trace_Z(double rho, const VortexConfiguration& cfg, const DensityVector& dens,
                     int k, int Nq = 0, int deriv_order = 0);

// Layer potential evaluated off the boundary by trapezoid quadrature of the contour
// integral; refuses points within 0.05 rho of a circle (near-singularity error).
cplx field_Z(double rho, const VortexConfiguration& cfg, const DensityVector& dens, cplx zeta,
             int Nq = 0, int deriv_order = 0);

// Exact multipole/Laurent evaluation of the same field; valid on all of D_rho including
// the boundary for band-limited densities (the harmonic extension of the traces).
cplx field_Z_series(double rho, const VortexConfiguration& cfg, const DensityVector& dens,
                    cplx zeta, int deriv_order = 0);

// mu_k = 2 Re(C Z_k^rho mu): recovers the density from its layer-potential trace.
SpectralDensity recover_density(const GridFunction& trace, int N);

// Linear symmetry classes on coefficients:
//   rr: hat in R; ir: hat in iR; ii: i^m hat in iR; ri: i^m hat in R; intersections as named.
enum class SymmetryClass { rr, ir, ii, ri, rr_ii, rr_ri, ir_ii, none };

std::string to_string(SymmetryClass s);
SpectralDensity symmetry_project(SymmetryClass cls, const SpectralDensity& d);
bool is_member(SymmetryClass cls, const SpectralDensity& d, double tol);
double symmetry_defect(SymmetryClass cls, const SpectralDensity& d);

void to_json(nlohmann::json& j, const SpectralDensity& d);
void from_json(const nlohmann::json& j, SpectralDensity& d);

}  // namespace vf

#endif
