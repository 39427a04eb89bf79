#include "vortexforge/pointvortex.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

namespace vf {

double VortexConfiguration::coord(int i) const {
    int M = size();
    if (i < 0 || i >= num_coords()) throw internal_error("coordinate index out of range");
    if (i < M) return gammas[i];
    if (i < 3 * M) {
        int k = (i - M) / 2;
        return ((i - M) % 2 == 0) ? centers[k].real() : centers[k].imag();
    }
    return (i == 3 * M) ? c : omega;
}

void VortexConfiguration::set_coord(int i, double v) {
    int M = size();
    if (i < 0 || i >= num_coords()) throw internal_error("coordinate index out of range");
    if (i < M) {
        gammas[i] = v;
    } else if (i < 3 * M) {
        int k = (i - M) / 2;
        if ((i - M) % 2 == 0)
            centers[k] = cplx(v, centers[k].imag());
        else
            centers[k] = cplx(centers[k].real(), v);
    } else if (i == 3 * M) {
        c = v;
    } else {
        omega = v;
    }
}

std::string VortexConfiguration::coord_name(int i, int M) {
    if (i < M) return "gamma" + std::to_string(i + 1);
    if (i < 3 * M) {
        int k = (i - M) / 2;
        return std::string((i - M) % 2 == 0 ? "re_zeta" : "im_zeta") + std::to_string(k + 1);
    }
    return i == 3 * M ? "c" : "omega";
}

int VortexConfiguration::coord_index(const std::string& name, int M) {
    if (name == "c") return 3 * M;
    if (name == "omega") return 3 * M + 1;
    auto parse_tail = [&](const std::string& prefix) -> int {
        if (name.rfind(prefix, 0) != 0) return -1;
        int k = std::atoi(name.c_str() + prefix.size());
        if (k < 1 || k > M) throw input_error("bad vortex index in coordinate name: " + name);
        return k - 1;
    };
    if (int k = parse_tail("gamma"); k >= 0) return k;
    if (int k = parse_tail("re_zeta"); k >= 0) return M + 2 * k;
    if (int k = parse_tail("im_zeta"); k >= 0) return M + 2 * k + 1;
    throw input_error("unknown coordinate name: " + name);
}

double VortexConfiguration::min_gap() const {
    double g = std::numeric_limits<double>::infinity();
    for (int k = 0; k < size(); ++k)
        for (int j = k + 1; j < size(); ++j) g = std::min(g, std::abs(centers[k] - centers[j]));
    return g;
}

void VortexConfiguration::validate(bool require_circulations) const {
    if (gammas.empty() || gammas.size() != centers.size())
        throw domain_error("configuration needs M >= 1 vortices with matching circulations");
    if (size() > 1 && !(min_gap() > 0)) throw domain_error("coincident vortex centers");
    if (require_circulations)
        for (double g : gammas)
            if (g == 0.0) throw domain_error("zero circulation not admissible here");
}

std::string to_string(SteadyKind k) {
    switch (k) {
        case SteadyKind::translating: return "translating";
        case SteadyKind::rotating: return "rotating";
        default: return "stationary";
    }
}

SteadyKind steady_kind(const VortexConfiguration& cfg) {
    if (cfg.c != 0.0 && cfg.omega != 0.0)
        throw domain_error("at most one of c, Omega may be nonzero for a steady class");
    if (cfg.c != 0.0) return SteadyKind::translating;
    if (cfg.omega != 0.0) return SteadyKind::rotating;
    return SteadyKind::stationary;
}

std::vector<int> ParameterSplit::fixed(int M) const {
    std::vector<bool> in(3 * M + 2, false);
    for (int i : varying) in[i] = true;
    std::vector<int> out;
    for (int i = 0; i < 3 * M + 2; ++i)
        if (!in[i]) out.push_back(i);
    return out;
}

ParameterSplit ParameterSplit::from_names(const std::vector<std::string>& names, int M) {
    ParameterSplit s;
    for (const auto& n : names) s.varying.push_back(VortexConfiguration::coord_index(n, M));
    return s;
}

std::vector<std::string> ParameterSplit::names(int M) const {
    std::vector<std::string> out;
    for (int i : varying) out.push_back(VortexConfiguration::coord_name(i, M));
    return out;
}

void ParameterSplit::validate(const VortexConfiguration& cfg) const {
    int n = cfg.num_coords();
    std::vector<bool> seen(n, false);
    for (int i : varying) {
        if (i < 0 || i >= n) throw input_error("split index out of range");
        if (seen[i]) throw input_error("duplicate coordinate in split");
        seen[i] = true;
    }
}

std::vector<cplx> eval_pv_residual(const VortexConfiguration& cfg) {
    cfg.validate();
    int M = cfg.size();
    std::vector<cplx> V(M);
    for (int k = 0; k < M; ++k) {
        cplx s = 0.0;
        for (int j = 0; j < M; ++j)
            if (j != k) s += cfg.gammas[j] / (two_pi_i * (cfg.centers[k] - cfg.centers[j]));
        V[k] = s - cfg.c + cplx(0, cfg.omega) * std::conj(cfg.centers[k]);
    }
    return V;
}

namespace {

// dV_k in direction of real coordinate i (unit perturbation).
cplx pv_residual_derivative(const VortexConfiguration& cfg, int k, int i) {
    int M = cfg.size();
    const auto& z = cfg.centers;
    if (i < M) {  // gamma_j
        int j = i;
        if (j == k) return 0.0;
        return 1.0 / (two_pi_i * (z[k] - z[j]));
    }
    if (i < 3 * M) {
        int j = (i - M) / 2;
        cplx dir = ((i - M) % 2 == 0) ? cplx(1, 0) : cplx(0, 1);
        if (j == k) {
            cplx s = 0.0;
            for (int l = 0; l < M; ++l)
                if (l != k) s += -cfg.gammas[l] / (two_pi_i * (z[k] - z[l]) * (z[k] - z[l]));
            return dir * s + cplx(0, cfg.omega) * std::conj(dir);
        }
        return dir * cfg.gammas[j] / (two_pi_i * (z[k] - z[j]) * (z[k] - z[j]));
    }
    if (i == 3 * M) return -1.0;
    return cplx(0, 1) * std::conj(z[k]);  // Omega
}

}  // namespace

Eigen::MatrixXd pv_jacobian(const VortexConfiguration& cfg, const ParameterSplit& split) {
    cfg.validate();
    split.validate(cfg);
    int M = cfg.size();
    Eigen::MatrixXd J(2 * M, static_cast<int>(split.varying.size()));
    for (int c_ = 0; c_ < J.cols(); ++c_) {
        for (int k = 0; k < M; ++k) {
            cplx d = pv_residual_derivative(cfg, k, split.varying[c_]);
            J(2 * k, c_) = d.real();
            J(2 * k + 1, c_) = d.imag();
        }
    }
    return J;
}

std::pair<cplx, cplx> check_pv_identities(const VortexConfiguration& cfg) {
    auto V = eval_pv_residual(cfg);
    int M = cfg.size();
    cplx lhs1 = 0, rhs1 = 0, lhs2 = 0, rhs2 = 0;
    cplx sum_g = 0, sum_gz = 0;
    double sum_gz2 = 0;
    for (int k = 0; k < M; ++k) {
        lhs1 += cfg.gammas[k] * V[k];
        lhs2 += cfg.gammas[k] * cfg.centers[k] * V[k];
        sum_g += cfg.gammas[k];
        sum_gz += cfg.gammas[k] * cfg.centers[k];
        sum_gz2 += cfg.gammas[k] * std::norm(cfg.centers[k]);
        rhs1 += cplx(0, cfg.omega) * cfg.gammas[k] * std::conj(cfg.centers[k]);
    }
    rhs1 += -cfg.c * sum_g;
    cplx pair_sum = 0;
    for (int j = 0; j < M; ++j)
        for (int k = j + 1; k < M; ++k) pair_sum += cfg.gammas[j] * cfg.gammas[k];
    rhs2 = pair_sum / two_pi_i - cfg.c * sum_gz + cplx(0, cfg.omega) * sum_gz2;
    return {lhs1 - rhs1, lhs2 - rhs2};
}

SteadyClass classify_nondegeneracy(const VortexConfiguration& cfg, const ParameterSplit& split) {
    auto V = eval_pv_residual(cfg);
    double scale = std::max(1.0, std::abs(cfg.c) + std::abs(cfg.omega));
    for (const cplx& v : V)
        if (std::abs(v) > 1e-9 * scale)
            throw domain_error("classify_nondegeneracy: configuration is not steady");
    SteadyClass out;
    out.kind = steady_kind(cfg);
    int M = cfg.size();

    // The excluded motion coordinates must sit in the fixed block at value 0.
    for (int i : split.varying) {
        if (i == 3 * M && out.kind != SteadyKind::translating)
            throw domain_error("split may not vary c for this steady class");
        if (i == 3 * M + 1 && out.kind != SteadyKind::rotating)
            throw domain_error("split may not vary Omega for this steady class");
    }

    Eigen::MatrixXd J = pv_jacobian(cfg, split);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
    const auto& sv = svd.singularValues();
    double smax = sv.size() ? sv(0) : 0.0;
    double thresh = 1e-9 * smax;
    int rank = 0;
    out.rank_ambiguous = false;
    for (int i = 0; i < sv.size(); ++i) {
        if (sv(i) > thresh) ++rank;
        if (sv(i) > 0.1 * thresh && sv(i) < 10.0 * thresh) out.rank_ambiguous = true;
    }
    out.codim = 2 * M - rank;
    int expected = (out.kind == SteadyKind::stationary) ? 3 : 1;
    bool trivial_kernel = (rank == static_cast<int>(split.varying.size()));
    out.nondegenerate = (out.codim == expected) && trivial_kernel;
    return out;
}

namespace {

// phi^0 maps as real-linear functionals of V in R^{2M}; rows x (Re V_1, Im V_1, ...).
Eigen::MatrixXd phi0_matrix(const VortexConfiguration& cfg, SteadyKind kind) {
    int M = cfg.size();
    int n = (kind == SteadyKind::stationary) ? 3 : 1;
    Eigen::MatrixXd P(n, 2 * M);
    for (int k = 0; k < M; ++k) {
        double g = cfg.gammas[k];
        cplx z = cfg.centers[k];
        // Im sum g_k V_k ; Re sum g_k z_k V_k ; (stationary: Re/Im sum g V, Re sum g z V)
        if (kind == SteadyKind::translating) {
            P(0, 2 * k) = 0;
            P(0, 2 * k + 1) = g;
        } else if (kind == SteadyKind::rotating) {
            P(0, 2 * k) = g * z.real();
            P(0, 2 * k + 1) = -g * z.imag();
        } else {
            P(0, 2 * k) = g;
            P(0, 2 * k + 1) = 0;
            P(1, 2 * k) = 0;
            P(1, 2 * k + 1) = g;
            P(2, 2 * k) = g * z.real();
            P(2, 2 * k + 1) = -g * z.imag();
        }
    }
    return P;
}

// Greedy column pivoting: pick n coordinate directions keeping the phi-minor well conditioned.
std::vector<int> pick_slack_columns(const Eigen::MatrixXd& P) {
    int n = static_cast<int>(P.rows());
    int m = static_cast<int>(P.cols());
    std::vector<int> chosen;
    Eigen::MatrixXd R = P;
    for (int pick = 0; pick < n; ++pick) {
        int best = -1;
        double bestn = -1;
        for (int j = 0; j < m; ++j) {
            if (std::find(chosen.begin(), chosen.end(), j) != chosen.end()) continue;
            double nj = R.col(j).norm();
            if (nj > bestn) {
                bestn = nj;
                best = j;
            }
        }
        if (best < 0 || bestn <= 0) throw degeneracy_error("phi map not surjective", bestn, 0);
        chosen.push_back(best);
        Eigen::VectorXd q = R.col(best) / R.col(best).norm();
        R -= q * (q.transpose() * R);
    }
    return chosen;
}

}  // namespace

VortexConfiguration solve_steady_pv(const VortexConfiguration& seed, const ParameterSplit& split,
                                    const PvNewtonSettings& settings) {
    seed.validate();
    split.validate(seed);
    SteadyKind kind = steady_kind(seed);
    int M = seed.size();
    int nv = static_cast<int>(split.varying.size());
    int ns = (kind == SteadyKind::stationary) ? 3 : 1;

    Eigen::MatrixXd P = phi0_matrix(seed, kind);
    std::vector<int> slack_cols = pick_slack_columns(P);

    auto resid = [&](const VortexConfiguration& cfg, const Eigen::VectorXd& z) {
        auto V = eval_pv_residual(cfg);
        Eigen::VectorXd r(2 * M);
        for (int k = 0; k < M; ++k) {
            r(2 * k) = V[k].real();
            r(2 * k + 1) = V[k].imag();
        }
        for (int i = 0; i < ns; ++i) r(slack_cols[i]) -= z(i);
        return r;
    };

    VortexConfiguration cfg = seed;
    Eigen::VectorXd z = Eigen::VectorXd::Zero(ns);
    double scale = 1.0;
    for (int i : split.varying) scale = std::max(scale, std::abs(cfg.coord(i)));
    double last = 0;
    for (int it = 0; it <= settings.max_iter; ++it) {
        Eigen::VectorXd r = resid(cfg, z);
        last = r.lpNorm<Eigen::Infinity>();
        if (last < settings.residual_tol * std::max(1.0, scale)) {
            double zn = z.lpNorm<Eigen::Infinity>();
            if (zn > settings.residual_tol * std::max(1.0, scale))
                throw degeneracy_error("slack did not vanish; identities unexplained", zn, it);
            return cfg;
        }
        if (it == settings.max_iter) break;
        // analytic Jacobian in lambda, -I in the slack columns
        Eigen::MatrixXd J(2 * M, nv + ns);
        J.leftCols(nv) = pv_jacobian(cfg, split);
        J.rightCols(ns).setZero();
        for (int i = 0; i < ns; ++i) J(slack_cols[i], nv + i) = -1.0;
        Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
        if (!lu.isInvertible())
            throw degeneracy_error("singular augmented Jacobian in solve_steady_pv", last, it);
        Eigen::VectorXd dx = lu.solve(-r);
        double step = 1.0;
        VortexConfiguration trial = cfg;
        Eigen::VectorXd ztrial = z;
        for (int h = 0; h <= settings.max_halvings; ++h) {
            trial = cfg;
            for (int i = 0; i < nv; ++i)
                trial.set_coord(split.varying[i], cfg.coord(split.varying[i]) + step * dx(i));
            ztrial = z + step * dx.tail(ns);
            if (resid(trial, ztrial).lpNorm<Eigen::Infinity>() < last) break;
            step *= 0.5;
        }
        cfg = trial;
        z = ztrial;
    }
    throw convergence_error("solve_steady_pv did not converge", last, settings.max_iter);
}

cplx pv_velocity(const VortexConfiguration& cfg, int k) {
    cfg.validate();
    if (k < 0 || k >= cfg.size()) throw internal_error("vortex index out of range");
    cplx s = 0.0;
    for (int j = 0; j < cfg.size(); ++j)
        if (j != k) s += cfg.gammas[j] / (two_pi_i * (cfg.centers[k] - cfg.centers[j]));
    return s;
}

std::vector<std::vector<cplx>> advance_dynamics(const VortexConfiguration& cfg, double dt,
                                                int steps) {
    cfg.validate();
    int M = cfg.size();
    auto rhs = [&](const std::vector<cplx>& z) {
        std::vector<cplx> v(M);
        for (int k = 0; k < M; ++k) {
            cplx s = 0.0;
            for (int j = 0; j < M; ++j)
                if (j != k) s += cfg.gammas[j] / (two_pi_i * (z[k] - z[j]));
            v[k] = std::conj(s);  // dz/dt = conj(d conj(z)/dt)
        }
        return v;
    };
    auto min_sep = [&](const std::vector<cplx>& z) {
        double g = std::numeric_limits<double>::infinity();
        for (int k = 0; k < M; ++k)
            for (int j = k + 1; j < M; ++j) g = std::min(g, std::abs(z[k] - z[j]));
        return g;
    };
    std::vector<std::vector<cplx>> traj;
    traj.push_back(cfg.centers);
    std::vector<cplx> z = cfg.centers;
    for (int s = 0; s < steps; ++s) {
        auto k1 = rhs(z);
        std::vector<cplx> tmp(M);
        for (int i = 0; i < M; ++i) tmp[i] = z[i] + 0.5 * dt * k1[i];
        auto k2 = rhs(tmp);
        for (int i = 0; i < M; ++i) tmp[i] = z[i] + 0.5 * dt * k2[i];
        auto k3 = rhs(tmp);
        for (int i = 0; i < M; ++i) tmp[i] = z[i] + dt * k3[i];
        auto k4 = rhs(tmp);
        for (int i = 0; i < M; ++i)
            z[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        if (M > 1 && min_sep(z) < 1e-6) return traj;  // near-collision abort, partial trajectory
        traj.push_back(z);
    }
    return traj;
}

void to_json(nlohmann::json& j, const VortexConfiguration& cfg) {
    j = nlohmann::json::object();
    j["gammas"] = cfg.gammas;
    auto arr = nlohmann::json::array();
    for (const cplx& z : cfg.centers) arr.push_back({z.real(), z.imag()});
    j["centers"] = arr;
    j["c"] = cfg.c;
    j["omega"] = cfg.omega;
}

void from_json(const nlohmann::json& j, VortexConfiguration& cfg) {
    cfg.gammas = j.at("gammas").get<std::vector<double>>();
    cfg.centers.clear();
    for (const auto& p : j.at("centers")) cfg.centers.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    cfg.c = j.value("c", 0.0);
    cfg.omega = j.value("omega", 0.0);
    if (cfg.gammas.size() != cfg.centers.size())
        throw input_error("gammas and centers length mismatch");
}

nlohmann::json config_with_split_to_json(const VortexConfiguration& cfg,
                                         const ParameterSplit& split) {
    nlohmann::json j;
    to_json(j, cfg);
    j["split"] = {{"varying", split.names(cfg.size())}};
    return j;
}

std::pair<VortexConfiguration, ParameterSplit> config_with_split_from_json(
    const nlohmann::json& j) {
    VortexConfiguration cfg;
    from_json(j, cfg);
    ParameterSplit split;
    if (j.contains("split"))
        split = ParameterSplit::from_names(
            j.at("split").at("varying").get<std::vector<std::string>>(), cfg.size());
    return {cfg, split};
}

}  // namespace vf
