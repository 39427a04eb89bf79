#include "vortexforge/hollowvortex.hpp"

#include <cmath>
#include <nlohmann/json.hpp>

namespace vf {

VortexConfiguration HollowState::config() const {
    VortexConfiguration cfg = base;
    if (lambda.size() != split.varying.size())
        throw internal_error("lambda length != split size");
    for (size_t i = 0; i < lambda.size(); ++i) cfg.set_coord(split.varying[i], lambda[i]);
    return cfg;
}

void HollowState::validate() const {
    VortexConfiguration cfg = config();
    cfg.validate(true);
    require_admissible(rho, cfg);
    if (static_cast<int>(mu.size()) != M() || static_cast<int>(nu.size()) != M() ||
        static_cast<int>(Q.size()) != M())
        throw domain_error("state arrays must have one entry per vortex");
    for (const auto& d : mu)
        if (d.N() != N()) throw domain_error("densities must share a common truncation N");
    for (const auto& d : nu)
        if (d.N() != N()) throw domain_error("densities must share a common truncation N");
}

cplx build_w0(const VortexConfiguration& cfg, cplx zeta) {
    cplx w = 0.0;
    for (int k = 0; k < cfg.size(); ++k) {
        if (zeta == cfg.centers[k]) throw domain_error("w0 evaluated at a vortex center");
        w += cfg.gammas[k] / two_pi_i * std::log(zeta - cfg.centers[k]);
    }
    return w;
}

cplx w0_zeta(const VortexConfiguration& cfg, cplx zeta) {
    cplx w = 0.0;
    for (int k = 0; k < cfg.size(); ++k) {
        if (zeta == cfg.centers[k]) throw domain_error("w0' evaluated at a vortex center");
        w += cfg.gammas[k] / (two_pi_i * (zeta - cfg.centers[k]));
    }
    return w;
}

GridFunction eval_Vrho(double rho, const VortexConfiguration& cfg, int k, int Nq) {
    cfg.validate();
    require_admissible(rho, cfg);
    GridFunction out(Nq);
    auto tau = grid_nodes(Nq);
    for (int i = 0; i < Nq; ++i) {
        cplx z = cfg.centers[k] + rho * tau[i];
        cplx v = -cfg.c + cplx(0, cfg.omega) * std::conj(z);
        for (int j = 0; j < cfg.size(); ++j)
            if (j != k) v += cfg.gammas[j] / (two_pi_i * (z - cfg.centers[j]));
        out.values[i] = v;
    }
    return out;
}

BoundaryContext::BoundaryContext(double rho_, const VortexConfiguration& cfg_, int N_, int Nq_)
    : rho(rho_), cfg(cfg_), N(N_), Nq(Nq_ ? Nq_ : default_Nq(N_)) {
    cfg.validate(true);
    require_admissible(rho, cfg);
    tau = grid_nodes(Nq);
    int M = cfg.size();
    kernels.assign(M, std::vector<std::vector<cplx>>(M));
    for (int k = 0; k < M; ++k) {
        for (int j = 0; j < M; ++j) {
            if (j == k || rho == 0.0) continue;
            auto& K = kernels[k][j];
            K.resize(static_cast<size_t>(Nq) * Nq);
            cplx d0 = cfg.centers[j] - cfg.centers[k];
            for (int i = 0; i < Nq; ++i)
                for (int q = 0; q < Nq; ++q)
                    K[static_cast<size_t>(i) * Nq + q] =
                        tau[q] * rho / ((rho * (tau[q] - tau[i]) + d0) * double(Nq));
        }
    }
    Vrho.resize(M);
    rho_w0p.resize(M);
    for (int k = 0; k < M; ++k) {
        Vrho[k] = eval_Vrho(rho, cfg, k, Nq).values;
        rho_w0p[k].resize(Nq);
        for (int i = 0; i < Nq; ++i) {
            // rho w0' = gamma_k/(2 pi i tau) + rho (V_k^rho + c - i Om conj(zeta_k + rho tau)),
            // which stays finite through rho = 0
            cplx z = cfg.centers[k] + rho * tau[i];
            rho_w0p[k][i] = cfg.gammas[k] / (two_pi_i * tau[i]) +
                            rho * (Vrho[k][i] + cfg.c - cplx(0, cfg.omega) * std::conj(z));
        }
    }
}

std::vector<cplx> BoundaryContext::apply_Z(const DensityVector& dens, int k,
                                           int deriv_order) const {
    std::vector<cplx> out = cauchy_deriv(dens[k], Nq, deriv_order).values;
    if (rho == 0.0) return out;
    for (int j = 0; j < cfg.size(); ++j) {
        if (j == k) continue;
        GridFunction gj = to_grid(dens[j], Nq, deriv_order);
        const auto& K = kernels[k][j];
        for (int i = 0; i < Nq; ++i) {
            cplx acc = 0.0;
            const cplx* row = K.data() + static_cast<size_t>(i) * Nq;
            for (int q = 0; q < Nq; ++q) acc += row[q] * gj.values[q];
            out[i] += acc;
        }
    }
    return out;
}

namespace {

struct BoundaryEval {
    std::vector<cplx> Zmu, Zmup, Znup, R, D;
};

// R is the bracket of the kinematic condition; shared between A and B:
//   R = Z nu' + V^rho + rho (i Om conj(zeta_k + rho tau) - c) Z mu'
//       + i Om rho^2 (conj(Z mu) + rho Z mu' conj(Z mu)).
BoundaryEval eval_boundary(const HollowState& u, const BoundaryContext& ctx, int k) {
    BoundaryEval ev;
    double rho = u.rho;
    const auto& cfg = ctx.cfg;
    ev.Zmu = ctx.apply_Z(u.mu, k, 0);
    ev.Zmup = ctx.apply_Z(u.mu, k, 1);
    ev.Znup = ctx.apply_Z(u.nu, k, 1);
    int Nq = ctx.Nq;
    ev.R.resize(Nq);
    ev.D = ev.Zmup;
    cplx iOm(0, cfg.omega);
    for (int i = 0; i < Nq; ++i) {
        cplx zbar = std::conj(cfg.centers[k] + rho * ctx.tau[i]);
        ev.R[i] = ev.Znup[i] + ctx.Vrho[k][i] + rho * (iOm * zbar - cfg.c) * ev.Zmup[i] +
                  iOm * rho * rho * (std::conj(ev.Zmu[i]) + rho * ev.Zmup[i] * std::conj(ev.Zmu[i]));
    }
    return ev;
}

}  // namespace

Residual full_residual(const HollowState& u, const BoundaryContext& ctx) {
    u.validate();
    Residual res;
    int M = u.M(), Nq = ctx.Nq;
    res.A.resize(M);
    res.B.resize(M);
    for (int k = 0; k < M; ++k) {
        BoundaryEval ev = eval_boundary(u, ctx, k);
        double g = ctx.cfg.gammas[k];
        double g2pi2 = g * g / (2.0 * pi * pi);
        res.A[k].resize(Nq);
        res.B[k].resize(Nq);
        for (int i = 0; i < Nq; ++i) {
            res.A[k][i] = std::real(ctx.tau[i] * ev.R[i]);
            // Bernoulli via the analytically cancelled quotient, exact for every rho:
            //   B = [2 Re(conj(a) R) - (g^2/2pi^2) Re D + rho(|R|^2 - (g^2/4pi^2)|D|^2)]
            //       / |1 + rho D|^2 - Q_k,   a = g/(2 pi i tau).
            cplx abar = cplx(0, 1) * g * ctx.tau[i] / (2.0 * pi);
            cplx den = 1.0 + u.rho * ev.D[i];
            double dd = std::norm(den);
            if (dd < 1e-20)
                throw domain_error("Bernoulli denominator collapse: state outside O_delta");
            double num = 2.0 * std::real(abar * ev.R[i]) - g2pi2 * std::real(ev.D[i]) +
                         u.rho * (std::norm(ev.R[i]) - 0.5 * g2pi2 * std::norm(ev.D[i]));
            res.B[k][i] = num / dd - u.Q[k];
        }
    }
    return res;
}

Residual full_residual(const HollowState& u) {
    BoundaryContext ctx(u.rho, u.config(), u.N());
    return full_residual(u, ctx);
}

std::vector<std::vector<double>> kinematic_residual(const HollowState& u) {
    return full_residual(u).A;
}

std::vector<std::vector<double>> bernoulli_residual(const HollowState& u) {
    return full_residual(u).B;
}

double q_from_state(const HollowState& u, int k) {
    if (u.rho == 0.0) throw domain_error("q_from_state undefined at rho = 0");
    double g = u.config().gammas[k];
    double rad = g * g / (4.0 * pi * pi) + u.rho * u.Q[k];
    if (rad <= 0.0) throw unphysical_error("nonpositive q^2 radicand");
    return std::sqrt(rad) / std::abs(u.rho);
}

double circulation(const HollowState& u, int k) {
    VortexConfiguration cfg = u.config();
    if (u.rho == 0.0) return cfg.gammas[k];
    double arho = std::abs(u.rho);
    // contour radius 1.5 rho, pulled in when the circles leave no room for it
    double r = 1.5 * arho;
    if (cfg.size() > 1) {
        double gap = cfg.min_gap();
        r = std::min(r, arho + 0.45 * (gap - 2.0 * arho));
    }
    for (int j = 0; j < cfg.size(); ++j)
        if (j != k && std::abs(cfg.centers[j] - cfg.centers[k]) <= r + arho)
            throw geometry_error("circulation contour intersects a vortex circle");
    int Nq = default_Nq(u.N());
    auto tau = grid_nodes(Nq);
    cplx acc = 0.0;
    for (int i = 0; i < Nq; ++i) {
        cplx z = cfg.centers[k] + r * tau[i];
        cplx wz = w0_zeta(cfg, z) + field_Z(u.rho, cfg, u.nu, z, Nq, 1);
        acc += wz * cplx(0, 1) * r * tau[i];
    }
    acc *= 2.0 * pi / Nq;
    return std::real(acc);  // the contour integral of w_zeta is real
}

HvPhi hv_phi_integrals(const HollowState& u, const BoundaryContext& ctx,
                       const std::vector<std::vector<double>>& A,
                       const std::vector<std::vector<double>>& B) {
    HvPhi out{0.0, 0.0};
    double rho = u.rho;
    int Nq = ctx.Nq;
    double w = 2.0 * pi / Nq;
    for (int k = 0; k < u.M(); ++k) {
        BoundaryEval ev = eval_boundary(u, ctx, k);
        for (int i = 0; i < Nq; ++i) {
            cplx fp = 1.0 + rho * ev.Zmup[i];
            cplx fk = ctx.cfg.centers[k] + rho * ctx.tau[i] + rho * rho * ev.Zmu[i];
            cplx rho_wp = ctx.rho_w0p[k][i] + rho * ev.Znup[i];
            cplx integ = 0.5 * B[k][i] * fp -
                         std::conj(ctx.tau[i] * rho_wp) / std::conj(fp) * A[k][i];
            cplx dtau = cplx(0, 1) * ctx.tau[i] * w;
            out.J_plain += integ * dtau;
            out.J_weighted += integ * std::conj(fk) * dtau;
        }
    }
    return out;
}

Eigen::VectorXd HvPhi::components(SteadyKind kind) const {
    if (kind == SteadyKind::translating) {
        Eigen::VectorXd v(1);
        v << J_plain.imag();
        return v;
    }
    if (kind == SteadyKind::rotating) {
        Eigen::VectorXd v(1);
        v << J_weighted.real();
        return v;
    }
    Eigen::VectorXd v(3);
    v << J_plain.real(), J_plain.imag(), J_weighted.real();
    return v;
}

Eigen::VectorXd hv_phi(SteadyKind kind, const std::vector<std::vector<double>>& A,
                       const std::vector<std::vector<double>>& B, const HollowState& u) {
    VortexConfiguration cfg = u.config();
    SteadyKind actual = steady_kind(cfg);
    if (actual != kind) throw domain_error("hv_phi: kind does not match the state's (c, Omega)");
    BoundaryContext ctx(u.rho, cfg, u.N());
    return hv_phi_integrals(u, ctx, A, B).components(kind);
}

LinearizedTrivial linearized_trivial(const VortexConfiguration& cfg, const ParameterSplit& split) {
    auto V = eval_pv_residual(cfg);
    double scale = std::max(1.0, std::abs(cfg.c) + std::abs(cfg.omega));
    for (const cplx& v : V)
        if (std::abs(v) > 1e-9 * scale)
            throw domain_error("linearized_trivial requires a steady base configuration");
    LinearizedTrivial out;
    out.gammas = cfg.gammas;
    out.V_lambda_re = pv_jacobian(cfg, split);
    return out;
}

Eigen::MatrixXd LinearizedTrivial::assemble_L(int N) const {
    // rows: per vortex, B-coefficients (m=0; Re/Im m=1..N+1); cols: (mu Re/Im per mode, Q, lambda)
    int M_ = M();
    int rows_per = 1 + 2 * (N + 1);
    int mu_cols = 2 * N;
    int cols = M_ * mu_cols + M_ + n_lambda();
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(M_ * rows_per, cols);
    for (int k = 0; k < M_; ++k) {
        double g = gammas[k];
        int r0 = k * rows_per;
        // -(g^2/2pi^2) Re C mu_k': mode m -> m+1 with weight m/2
        for (int m = 1; m <= N; ++m) {
            int rr = r0 + 1 + 2 * m;      // Re row of mode m+1
            int ri = r0 + 1 + 2 * m + 1;  // Im row of mode m+1
            double wgt = -(g * g / (2.0 * pi * pi)) * 0.5 * m;
            L(rr, k * mu_cols + 2 * (m - 1)) = wgt;      // Re mu_m -> Re mode m+1
            L(ri, k * mu_cols + 2 * (m - 1) + 1) = wgt;  // Im mu_m -> Im mode m+1
        }
        L(r0, M_ * mu_cols + k) = -1.0;  // -Qdot_k at mode 0
        // (2 g/pi) Re(i tau V_klam lamdot): mode-1 coefficient (g/pi) i V_klam lamdot
        for (int c = 0; c < n_lambda(); ++c) {
            cplx Vl(V_lambda_re(2 * k, c), V_lambda_re(2 * k + 1, c));
            cplx coef = (g / pi) * cplx(0, 1) * Vl;
            L(r0 + 1, M_ * mu_cols + M_ + c) = coef.real();
            L(r0 + 2, M_ * mu_cols + M_ + c) = coef.imag();
        }
    }
    return L;
}

Eigen::MatrixXd LinearizedTrivial::assemble_full(int N) const {
    // rows per vortex: A modes 1..N (Re, Im), then B modes 0..N+1;
    // cols: mu (M x 2N), nu (M x 2N), Q (M), lambda.
    int M_ = M();
    int arows = 2 * N, brows = 1 + 2 * (N + 1);
    int rows_per = arows + brows;
    int mu_off = 0, nu_off = M_ * 2 * N, q_off = 2 * M_ * 2 * N, l_off = q_off + M_;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(M_ * rows_per, l_off + n_lambda());
    for (int k = 0; k < M_; ++k) {
        double g = gammas[k];
        int ra = k * rows_per;
        int rb = ra + arows;
        for (int m = 1; m <= N; ++m) {
            // A0_nu: Re(tau C nu') diagonal multiplier m/2
            J(ra + 2 * (m - 1), nu_off + k * 2 * N + 2 * (m - 1)) = 0.5 * m;
            J(ra + 2 * (m - 1) + 1, nu_off + k * 2 * N + 2 * (m - 1) + 1) = 0.5 * m;
            // B0_nu: (g/pi) Re(i tau C nu'): multiplier -i m g/(2 pi) on mode m
            cplx wnu = -cplx(0, 1) * double(m) * g / (2.0 * pi);
            int br = rb + 1 + 2 * (m - 1), bi = br + 1;  // B rows of mode m
            J(br, nu_off + k * 2 * N + 2 * (m - 1)) = wnu.real();
            J(br, nu_off + k * 2 * N + 2 * (m - 1) + 1) = -wnu.imag();
            J(bi, nu_off + k * 2 * N + 2 * (m - 1)) = wnu.imag();
            J(bi, nu_off + k * 2 * N + 2 * (m - 1) + 1) = wnu.real();
            // B0_mu: -(g^2/2pi^2) Re C mu': mode m -> m+1, weight m/2
            double wmu = -(g * g / (2.0 * pi * pi)) * 0.5 * m;
            J(rb + 1 + 2 * m, mu_off + k * 2 * N + 2 * (m - 1)) = wmu;
            J(rb + 1 + 2 * m + 1, mu_off + k * 2 * N + 2 * (m - 1) + 1) = wmu;
        }
        J(rb, q_off + k) = -1.0;  // B0_Q
        for (int c = 0; c < n_lambda(); ++c) {
            cplx Vl(V_lambda_re(2 * k, c), V_lambda_re(2 * k + 1, c));
            // A0_lambda: Re(tau V_lam lamdot) has mode-1 coefficient Vl/2
            J(ra, l_off + c) = 0.5 * Vl.real();
            J(ra + 1, l_off + c) = 0.5 * Vl.imag();
            // B0_lambda: (g/pi) Re(i tau Vl lamdot): mode-1 coefficient (g/2pi) i Vl
            cplx coef = g / (2.0 * pi) * cplx(0, 1) * Vl;
            J(rb + 1, l_off + c) = coef.real();
            J(rb + 2, l_off + c) = coef.imag();
        }
    }
    return J;
}

FlowFields::FlowFields(const HollowState& u) : u_(u) {
    u_.validate();
    ctx_ = std::make_shared<BoundaryContext>(u.rho, u.config(), u.N());
    int M = u.M(), Nq = ctx_->Nq;
    double rho = u.rho;
    ftr_.resize(M);
    fptr_.resize(M);
    Utr_.resize(M);
    wptr_.resize(M);
    const auto& cfg = ctx_->cfg;
    for (int k = 0; k < M; ++k) {
        auto Zmu = ctx_->apply_Z(u.mu, k, 0);
        auto Zmup = ctx_->apply_Z(u.mu, k, 1);
        auto Znup = ctx_->apply_Z(u.nu, k, 1);
        ftr_[k].resize(Nq);
        fptr_[k].resize(Nq);
        Utr_[k].resize(Nq);
        wptr_[k].resize(Nq);
        for (int i = 0; i < Nq; ++i) {
            ftr_[k][i] = cfg.centers[k] + rho * ctx_->tau[i] + rho * rho * Zmu[i];
            fptr_[k][i] = 1.0 + rho * Zmup[i];
            if (rho != 0.0) {
                wptr_[k][i] = ctx_->rho_w0p[k][i] / rho + Znup[i];
                Utr_[k][i] = wptr_[k][i] / fptr_[k][i] +
                             cplx(0, cfg.omega) * std::conj(ftr_[k][i]) - cfg.c;
            }
        }
    }
}

cplx FlowFields::f(cplx zeta) const {
    return zeta + u_.rho * u_.rho * field_Z_series(u_.rho, ctx_->cfg, u_.mu, zeta, 0);
}
cplx FlowFields::f_zeta(cplx zeta) const {
    return 1.0 + u_.rho * field_Z_series(u_.rho, ctx_->cfg, u_.mu, zeta, 1);
}
cplx FlowFields::dw_minus_w0(cplx zeta) const {
    return field_Z_series(u_.rho, ctx_->cfg, u_.nu, zeta, 1);
}
cplx FlowFields::w_zeta(cplx zeta) const {
    return w0_zeta(ctx_->cfg, zeta) + dw_minus_w0(zeta);
}
cplx FlowFields::U(cplx zeta) const {
    return w_zeta(zeta) / f_zeta(zeta) + cplx(0, ctx_->cfg.omega) * std::conj(f(zeta)) -
           ctx_->cfg.c;
}

double FlowFields::im_W(cplx zeta) const {
    // Im w is single-valued: Im w0 = -sum gamma/(2 pi) log|zeta - zeta_k|.
    const auto& cfg = ctx_->cfg;
    double imw0 = 0.0;
    for (int k = 0; k < cfg.size(); ++k)
        imw0 -= cfg.gammas[k] / (2.0 * pi) * std::log(std::abs(zeta - cfg.centers[k]));
    cplx fz = f(zeta);
    double imw = imw0 + std::imag(u_.rho * field_Z_series(u_.rho, cfg, u_.nu, zeta, 0));
    return imw + 0.5 * cfg.omega * std::norm(fz) - cfg.c * fz.imag();
}

std::vector<double> FlowFields::imW_trace(int k) const {
    std::vector<double> out(ctx_->Nq);
    const auto& cfg = ctx_->cfg;
    auto Znu = ctx_->apply_Z(u_.nu, k, 0);
    for (int i = 0; i < ctx_->Nq; ++i) {
        cplx zeta = cfg.centers[k] + u_.rho * ctx_->tau[i];
        double imw0 = 0.0;
        for (int j = 0; j < cfg.size(); ++j)
            imw0 -= cfg.gammas[j] / (2.0 * pi) * std::log(std::abs(zeta - cfg.centers[j]));
        out[i] = imw0 + std::imag(u_.rho * Znu[i]) + 0.5 * cfg.omega * std::norm(ftr_[k][i]) -
                 cfg.c * ftr_[k][i].imag();
    }
    return out;
}

FlowFields assemble_flow(const HollowState& u) { return FlowFields(u); }

void to_json(nlohmann::json& j, const HollowState& u) {
    j = nlohmann::json::object();
    nlohmann::json cfgj;
    to_json(cfgj, u.base);
    j["base"] = cfgj;
    j["split"] = {{"varying", u.split.names(u.M())}};
    j["rho"] = u.rho;
    j["Q"] = u.Q;
    j["lambda"] = u.lambda;
    auto muj = nlohmann::json::array(), nuj = nlohmann::json::array();
    for (const auto& d : u.mu) {
        nlohmann::json dj;
        to_json(dj, d);
        muj.push_back(dj);
    }
    for (const auto& d : u.nu) {
        nlohmann::json dj;
        to_json(dj, d);
        nuj.push_back(dj);
    }
    j["mu"] = muj;
    j["nu"] = nuj;
}

void from_json(const nlohmann::json& j, HollowState& u) {
    from_json(j.at("base"), u.base);
    u.split = ParameterSplit::from_names(
        j.at("split").at("varying").get<std::vector<std::string>>(), u.base.size());
    u.rho = j.at("rho").get<double>();
    u.Q = j.at("Q").get<std::vector<double>>();
    u.lambda = j.at("lambda").get<std::vector<double>>();
    u.mu.clear();
    u.nu.clear();
    for (const auto& dj : j.at("mu")) {
        SpectralDensity d;
        from_json(dj, d);
        u.mu.push_back(d);
    }
    for (const auto& dj : j.at("nu")) {
        SpectralDensity d;
        from_json(dj, d);
        u.nu.push_back(d);
    }
}

}  // namespace vf
