#ifndef VORTEXFORGE_POINTVORTEX_HPP
#define VORTEXFORGE_POINTVORTEX_HPP

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <utility>

#include "vortexforge/common.hpp"

namespace vf {

// Parameter vector Lambda = (gamma_1..gamma_M, zeta_1..zeta_M, c, Omega).
// Real-coordinate layout (3M+2 total):
//   [0, M)          gamma_k
//   [M + 2k]        Re zeta_k,  [M + 2k + 1]  Im zeta_k
//   [3M]            c
//   [3M + 1]        Omega
struct VortexConfiguration {
    std::vector<double> gammas;
    std::vector<cplx> centers;
    double c = 0.0;
    double omega = 0.0;

    int size() const { return static_cast<int>(gammas.size()); }
    int num_coords() const { return 3 * size() + 2; }

    double coord(int i) const;
    void set_coord(int i, double v);
    static std::string coord_name(int i, int M);
    static int coord_index(const std::string& name, int M);

    double min_gap() const;
    // Throws domain_error on coincident centers; require_circulations also
    // rejects zero circulations (desingularization precondition).
    void validate(bool require_circulations = false) const;
};

enum class SteadyKind { translating, rotating, stationary };

std::string to_string(SteadyKind k);

// Inferred from (c, Omega); throws domain_error if both are nonzero.
SteadyKind steady_kind(const VortexConfiguration& cfg);

struct ParameterSplit {
    std::vector<int> varying;  // indices into the real coordinates of Lambda

    std::vector<int> fixed(int M) const;
    static ParameterSplit from_names(const std::vector<std::string>& names, int M);
    std::vector<std::string> names(int M) const;
    void validate(const VortexConfiguration& cfg) const;
};

struct SteadyClass {
    SteadyKind kind;
    int codim = 0;
    bool nondegenerate = false;
    bool rank_ambiguous = false;  // a singular value sat within 10x of the rank threshold
};

// V_k = sum_{j != k} gamma_j/(2 pi i (zeta_k - zeta_j)) - c + i Omega conj(zeta_k).
std::vector<cplx> eval_pv_residual(const VortexConfiguration& cfg);

// Real Jacobian of V w.r.t. the varying coordinates; rows (Re V_1, Im V_1, ..., Im V_M).
Eigen::MatrixXd pv_jacobian(const VortexConfiguration& cfg, const ParameterSplit& split);

// LHS - RHS of the translation and rotation identities; zero to roundoff for any Lambda.
std::pair<cplx, cplx> check_pv_identities(const VortexConfiguration& cfg);

SteadyClass classify_nondegeneracy(const VortexConfiguration& cfg, const ParameterSplit& split);

struct PvNewtonSettings {
    double residual_tol = 1e-12;
    int max_iter = 50;
    int max_halvings = 30;
};

// Newton on the slack-augmented map H(Z1, lambda) = V(lambda, lambda') - Z1; the slack
// subspace is picked by greedy conditioning of the class phi-map and vanishes at the root.
VortexConfiguration solve_steady_pv(const VortexConfiguration& seed, const ParameterSplit& split,
                                    const PvNewtonSettings& settings = {});

// d/dt conj(z_k) = sum_{j != k} gamma_j/(2 pi i (z_k - z_j)).
cplx pv_velocity(const VortexConfiguration& cfg, int k);

// RK4 trajectory of the centers; aborts (returning the partial trajectory) if the
// minimum separation drops below 1e-6.
std::vector<std::vector<cplx>> advance_dynamics(const VortexConfiguration& cfg, double dt,
                                                int steps);

void to_json(nlohmann::json& j, const VortexConfiguration& cfg);
void from_json(const nlohmann::json& j, VortexConfiguration& cfg);
nlohmann::json config_with_split_to_json(const VortexConfiguration& cfg,
                                         const ParameterSplit& split);
std::pair<VortexConfiguration, ParameterSplit> config_with_split_from_json(
    const nlohmann::json& j);

}  // namespace vf

#endif
