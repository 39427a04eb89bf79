#include "vortexforge/desingularize.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>

namespace vf {

std::string to_string(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::rotating_pair: return "rotating_pair";
        case ScenarioKind::stationary_tripole: return "stationary_tripole";
        case ScenarioKind::translating_pair: return "translating_pair";
        default: return "general";
    }
}

ScenarioKind scenario_kind_from_string(const std::string& s) {
    if (s == "rotating_pair" || s == "rotating-pair") return ScenarioKind::rotating_pair;
    if (s == "stationary_tripole" || s == "tripole") return ScenarioKind::stationary_tripole;
    if (s == "translating_pair" || s == "translating-pair" || s == "pocklington")
        return ScenarioKind::translating_pair;
    if (s == "general") return ScenarioKind::general;
    throw input_error("unknown scenario kind: " + s);
}

std::string to_string(TerminationReason r) {
    switch (r) {
        case TerminationReason::conformal_degeneracy: return "conformal_degeneracy";
        case TerminationReason::velocity_degeneracy: return "velocity_degeneracy";
        case TerminationReason::parameter_blowup: return "parameter_blowup";
        case TerminationReason::angular_momentum_blowup: return "angular_momentum_blowup";
        case TerminationReason::step_failure: return "step_failure";
        default: return "max_steps";
    }
}

Scenario Scenario::rotating_pair() {
    Scenario sc;
    sc.kind = ScenarioKind::rotating_pair;
    sc.base = {{1.0, 1.0}, {cplx(1, 0), cplx(-1, 0)}, 0.0, 1.0 / (4.0 * pi)};
    sc.split = ParameterSplit::from_names({"omega"}, 2);
    return sc;
}

Scenario Scenario::stationary_tripole() {
    Scenario sc;
    sc.kind = ScenarioKind::stationary_tripole;
    sc.base = {{2.0, -1.0, 2.0}, {cplx(1, 0), cplx(0, 0), cplx(-1, 0)}, 0.0, 0.0};
    sc.split = ParameterSplit::from_names({"gamma2"}, 3);
    return sc;
}

Scenario Scenario::translating_pair() {
    Scenario sc;
    sc.kind = ScenarioKind::translating_pair;
    sc.base = {{1.0, -1.0}, {cplx(0, 1), cplx(0, -1)}, 1.0 / (4.0 * pi), 0.0};
    sc.split = ParameterSplit::from_names({"c"}, 2);
    return sc;
}

Scenario Scenario::general(const VortexConfiguration& base, const ParameterSplit& split) {
    Scenario sc;
    sc.kind = ScenarioKind::general;
    sc.base = base;
    sc.split = split;
    return sc;
}

Scenario Scenario::builtin(const std::string& name) {
    ScenarioKind k = scenario_kind_from_string(name);
    switch (k) {
        case ScenarioKind::rotating_pair: return rotating_pair();
        case ScenarioKind::stationary_tripole: return stationary_tripole();
        case ScenarioKind::translating_pair: return translating_pair();
        default: throw input_error("general scenario needs an explicit configuration");
    }
}

void Scenario::validate() const {
    base.validate(true);
    split.validate(base);
    auto V = eval_pv_residual(base);
    for (const cplx& v : V)
        if (std::abs(v) > 1e-10) throw domain_error("scenario base must be steady");
    if (kind == ScenarioKind::general) {
        SteadyClass cls = classify_nondegeneracy(base, split);
        if (!cls.nondegenerate)
            throw degeneracy_error("general scenario split is degenerate", cls.codim, 0);
    }
}

cplx straining_coefficient(const VortexConfiguration& cfg, int k) {
    cplx s = 0.0;
    for (int j = 0; j < cfg.size(); ++j)
        if (j != k)
            s += cfg.gammas[j] /
                 (two_pi_i * (cfg.centers[j] - cfg.centers[k]) * (cfg.centers[j] - cfg.centers[k]));
    return -0.5 * s;
}

HollowState leading_guess(const Scenario& sc, double rho, int N) {
    sc.validate();
    HollowState u;
    u.base = sc.base;
    u.split = sc.split;
    u.rho = rho;
    u.lambda.clear();
    for (int i : sc.split.varying) u.lambda.push_back(sc.base.coord(i));
    int M = sc.base.size();
    u.mu.assign(M, SpectralDensity(N));
    u.nu.assign(M, SpectralDensity(N));
    u.Q.assign(M, 0.0);
    for (int k = 0; k < M; ++k) {
        cplx S = straining_coefficient(sc.base, k);
        u.mu[k][1] = 8.0 * pi / sc.base.gammas[k] * rho * cplx(0, 1) * S;
        u.nu[k][2] = -rho * S;
        // the rotating-frame Bernoulli mean: Q_k = -gamma_k Omega rho / pi + O(rho^2)
        u.Q[k] = -sc.base.gammas[k] * sc.base.omega * rho / pi;
    }
    return u;
}

namespace {

// ---------------------------------------------------------------------------
// Reduced discrete systems.
//
// Unknown dofs and residual-coefficient extractors per scenario, from the
// symmetry subspaces (all verified against the full operator):
//   rotating pair:      mu1 rr, nu1 ir;  mu2 = -mu1*(-.),  nu2 = -nu1*(-.), Q2 = Q1
//                       residuals: A1 in ir, B1 in rr
//   stationary tripole: vortex 1 as above, center vortex mu2 odd/real, nu2 even/imag,
//                       vortex 3 coupled to 1; residuals A2 even/imag, B2 even/real
//   translating pair:   mu1, nu1 in ii; mu2 = mu1*, nu2 = nu1*, Q2 = Q1
//                       residuals: A1 in ii, B1 in ri
// Equations: A modes 1..N, B modes 0..N+1 (intersected with the class pattern),
// which makes every reduced system square.
// ---------------------------------------------------------------------------

struct Dof {
    enum Kind { MuRe, MuIm, NuRe, NuIm, Q, Lambda, Slack } kind;
    int vortex;  // or lambda/slack index
    int mode;
};

struct Equation {
    enum Kind { ARe, AIm, BRe, BIm } kind;
    int vortex;
    int mode;
};

struct SlackDir {
    bool on_A;  // else on B
    int vortex;
    cplx part;  // 1 or i: residual direction Re(part * tau) at mode 1
};

class ReducedSystem {
  public:
    ReducedSystem(const Scenario& sc, int N, int M) : sc_(sc), N_(N), M_(M) {
        build_tables();
    }

    int dim() const { return static_cast<int>(dofs_.size()); }
    int neq() const { return static_cast<int>(eqs_.size()) ; }

    Eigen::VectorXd pack(const HollowState& u) const;
    HollowState unpack(const Eigen::VectorXd& x, const HollowState& ref) const;
    Eigen::VectorXd extract(const Residual& res) const;
    // residual of the packed system (includes slack subtraction)
    Eigen::VectorXd eval(const Eigen::VectorXd& x, const HollowState& ref) const;
    void prepare_slack(const HollowState& ref);
    double symmetry_defect(const HollowState& u) const;
    double slack_magnitude(const Eigen::VectorXd& x) const;

  private:
    void build_tables();
    std::shared_ptr<const BoundaryContext> context_for(const HollowState& u) const;

    Scenario sc_;
    int N_, M_;
    std::vector<Dof> dofs_;
    std::vector<Equation> eqs_;
    std::vector<SlackDir> slack_;
    std::vector<Eigen::VectorXd> slack_cols_;
    mutable std::shared_ptr<const BoundaryContext> cache_;
    mutable std::vector<double> cache_key_;
    mutable std::mutex mtx_;
};

void ReducedSystem::build_tables() {
    int N = N_;
    auto add_eqs_all = [&](int k) {
        for (int m = 1; m <= N; ++m) {
            eqs_.push_back({Equation::ARe, k, m});
            eqs_.push_back({Equation::AIm, k, m});
        }
        eqs_.push_back({Equation::BRe, k, 0});
        for (int m = 1; m <= N + 1; ++m) {
            eqs_.push_back({Equation::BRe, k, m});
            eqs_.push_back({Equation::BIm, k, m});
        }
    };
    switch (sc_.kind) {
        case ScenarioKind::rotating_pair:
            for (int m = 1; m <= N; ++m) dofs_.push_back({Dof::MuRe, 0, m});
            for (int m = 1; m <= N; ++m) dofs_.push_back({Dof::NuIm, 0, m});
            dofs_.push_back({Dof::Q, 0, 0});
            dofs_.push_back({Dof::Lambda, 0, 0});
            for (int m = 1; m <= N; ++m) eqs_.push_back({Equation::AIm, 0, m});
            for (int m = 0; m <= N + 1; ++m) eqs_.push_back({Equation::BRe, 0, m});
            break;
        case ScenarioKind::stationary_tripole:
            for (int m = 1; m <= N; ++m) dofs_.push_back({Dof::MuRe, 0, m});
            for (int m = 1; m <= N; ++m) dofs_.push_back({Dof::NuIm, 0, m});
            for (int m = 1; m <= N; m += 2) dofs_.push_back({Dof::MuRe, 1, m});
            for (int m = 2; m <= N; m += 2) dofs_.push_back({Dof::NuIm, 1, m});
            dofs_.push_back({Dof::Q, 0, 0});
            dofs_.push_back({Dof::Q, 1, 0});
            dofs_.push_back({Dof::Lambda, 0, 0});
            for (int m = 1; m <= N; ++m) eqs_.push_back({Equation::AIm, 0, m});
            for (int m = 0; m <= N + 1; ++m) eqs_.push_back({Equation::BRe, 0, m});
            for (int m = 2; m <= N; m += 2) eqs_.push_back({Equation::AIm, 1, m});
            for (int m = 0; m <= N; m += 2) eqs_.push_back({Equation::BRe, 1, m});
            break;
        case ScenarioKind::translating_pair:
            for (int m = 1; m <= N; ++m)
                dofs_.push_back({m % 2 == 1 ? Dof::MuRe : Dof::MuIm, 0, m});
            for (int m = 1; m <= N; ++m)
                dofs_.push_back({m % 2 == 1 ? Dof::NuRe : Dof::NuIm, 0, m});
            dofs_.push_back({Dof::Q, 0, 0});
            dofs_.push_back({Dof::Lambda, 0, 0});
            for (int m = 1; m <= N; ++m)
                eqs_.push_back({m % 2 == 1 ? Equation::ARe : Equation::AIm, 0, m});
            eqs_.push_back({Equation::BRe, 0, 0});
            for (int m = 1; m <= N + 1; ++m)
                eqs_.push_back({m % 2 == 1 ? Equation::BIm : Equation::BRe, 0, m});
            break;
        case ScenarioKind::general: {
            for (int k = 0; k < M_; ++k)
                for (int m = 1; m <= N; ++m) {
                    dofs_.push_back({Dof::MuRe, k, m});
                    dofs_.push_back({Dof::MuIm, k, m});
                }
            for (int k = 0; k < M_; ++k)
                for (int m = 1; m <= N; ++m) {
                    dofs_.push_back({Dof::NuRe, k, m});
                    dofs_.push_back({Dof::NuIm, k, m});
                }
            for (int k = 0; k < M_; ++k) dofs_.push_back({Dof::Q, k, 0});
            for (size_t i = 0; i < sc_.split.varying.size(); ++i)
                dofs_.push_back({Dof::Lambda, static_cast<int>(i), 0});
            int ns = (sc_.steady() == SteadyKind::stationary) ? 3 : 1;
            for (int i = 0; i < ns; ++i) dofs_.push_back({Dof::Slack, i, 0});
            for (int k = 0; k < M_; ++k) add_eqs_all(k);
            break;
        }
    }
    if (dim() != neq())
        throw internal_error("reduced system is not square: " + std::to_string(dim()) + " vs " +
                             std::to_string(neq()));
}

Eigen::VectorXd ReducedSystem::pack(const HollowState& u) const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(dim());
    for (int i = 0; i < dim(); ++i) {
        const Dof& d = dofs_[i];
        switch (d.kind) {
            case Dof::MuRe: x(i) = u.mu[d.vortex][d.mode].real(); break;
            case Dof::MuIm: x(i) = u.mu[d.vortex][d.mode].imag(); break;
            case Dof::NuRe: x(i) = u.nu[d.vortex][d.mode].real(); break;
            case Dof::NuIm: x(i) = u.nu[d.vortex][d.mode].imag(); break;
            case Dof::Q: x(i) = u.Q[d.vortex]; break;
            case Dof::Lambda: x(i) = u.lambda[d.vortex]; break;
            case Dof::Slack: x(i) = 0.0; break;
        }
    }
    return x;
}

HollowState ReducedSystem::unpack(const Eigen::VectorXd& x, const HollowState& ref) const {
    HollowState u = ref;
    for (auto& d : u.mu) d = SpectralDensity(N_);
    for (auto& d : u.nu) d = SpectralDensity(N_);
    for (int i = 0; i < dim(); ++i) {
        const Dof& d = dofs_[i];
        switch (d.kind) {
            case Dof::MuRe: u.mu[d.vortex][d.mode] += x(i); break;
            case Dof::MuIm: u.mu[d.vortex][d.mode] += cplx(0, x(i)); break;
            case Dof::NuRe: u.nu[d.vortex][d.mode] += x(i); break;
            case Dof::NuIm: u.nu[d.vortex][d.mode] += cplx(0, x(i)); break;
            case Dof::Q: u.Q[d.vortex] = x(i); break;
            case Dof::Lambda: u.lambda[d.vortex] = x(i); break;
            case Dof::Slack: break;
        }
    }
    // reflection couplings
    auto couple_neg_star = [&](int from, int to) {
        for (int m = 1; m <= N_; ++m) {
            double sgn = (m % 2 == 0) ? -1.0 : 1.0;  // -(-1)^m
            u.mu[to][m] = sgn * std::conj(u.mu[from][m]);
            u.nu[to][m] = sgn * std::conj(u.nu[from][m]);
        }
        u.Q[to] = u.Q[from];
    };
    if (sc_.kind == ScenarioKind::rotating_pair) {
        couple_neg_star(0, 1);
    } else if (sc_.kind == ScenarioKind::stationary_tripole) {
        couple_neg_star(0, 2);
    } else if (sc_.kind == ScenarioKind::translating_pair) {
        for (int m = 1; m <= N_; ++m) {
            u.mu[1][m] = std::conj(u.mu[0][m]);
            u.nu[1][m] = std::conj(u.nu[0][m]);
        }
        u.Q[1] = u.Q[0];
    }
    return u;
}

double ReducedSystem::symmetry_defect(const HollowState& u) const {
    // distance from u to the scenario subspace: pack then unpack and compare
    Eigen::VectorXd x = pack(u);
    HollowState proj = unpack(x, u);
    double d = 0.0;
    for (int k = 0; k < M_; ++k)
        for (int m = 1; m <= N_; ++m) {
            d = std::max(d, std::abs(u.mu[k][m] - proj.mu[k][m]));
            d = std::max(d, std::abs(u.nu[k][m] - proj.nu[k][m]));
        }
    for (int k = 0; k < M_; ++k) d = std::max(d, std::abs(u.Q[k] - proj.Q[k]));
    return d;
}

Eigen::VectorXd ReducedSystem::extract(const Residual& res) const {
    int Nq = static_cast<int>(res.A[0].size());
    int nmodes = N_ + 2;
    // coefficient analysis per vortex once
    std::vector<std::vector<cplx>> ahat(M_), bhat(M_);
    for (int k = 0; k < M_; ++k) {
        GridFunction ga(Nq), gb(Nq);
        for (int i = 0; i < Nq; ++i) {
            ga.values[i] = res.A[k][i];
            gb.values[i] = res.B[k][i];
        }
        auto ha = grid_to_laurent(ga);
        auto hb = grid_to_laurent(gb);
        ahat[k].resize(nmodes);
        bhat[k].resize(nmodes);
        for (int m = 0; m < nmodes; ++m) {
            ahat[k][m] = laurent_mode(ha, m);
            bhat[k][m] = laurent_mode(hb, m);
        }
    }
    Eigen::VectorXd r(neq());
    for (int i = 0; i < neq(); ++i) {
        const Equation& e = eqs_[i];
        cplx v = (e.kind == Equation::ARe || e.kind == Equation::AIm) ? ahat[e.vortex][e.mode]
                                                                      : bhat[e.vortex][e.mode];
        r(i) = (e.kind == Equation::ARe || e.kind == Equation::BRe) ? v.real() : v.imag();
    }
    return r;
}

std::shared_ptr<const BoundaryContext> ReducedSystem::context_for(const HollowState& u) const {
    VortexConfiguration cfg = u.config();
    std::vector<double> key{u.rho, cfg.c, cfg.omega, double(N_)};
    for (int k = 0; k < cfg.size(); ++k) {
        key.push_back(cfg.gammas[k]);
        key.push_back(cfg.centers[k].real());
        key.push_back(cfg.centers[k].imag());
    }
    {
        std::lock_guard<std::mutex> lk(mtx_);
        if (cache_ && key == cache_key_) return cache_;
    }
    auto fresh = std::make_shared<const BoundaryContext>(u.rho, cfg, N_);
    {
        std::lock_guard<std::mutex> lk(mtx_);
        cache_ = fresh;
        cache_key_ = key;
    }
    return fresh;
}

void ReducedSystem::prepare_slack(const HollowState& ref) {
    slack_.clear();
    slack_cols_.clear();
    int ns = 0;
    for (const Dof& d : dofs_)
        if (d.kind == Dof::Slack) ++ns;
    if (ns == 0) return;
    // candidate residual directions: Re(part * tau) injected into A_j or B_j
    auto ctx = context_for(ref);
    int Nq = ctx->Nq;
    std::vector<SlackDir> cands;
    for (int k = 0; k < M_; ++k)
        for (cplx part : {cplx(1, 0), cplx(0, 1)}) {
            cands.push_back({true, k, part});
            cands.push_back({false, k, part});
        }
    SteadyKind kind = sc_.steady();
    Eigen::MatrixXd cols(ns, static_cast<int>(cands.size()));
    for (size_t ci = 0; ci < cands.size(); ++ci) {
        std::vector<std::vector<double>> A(M_, std::vector<double>(Nq, 0.0));
        std::vector<std::vector<double>> B = A;
        auto& tgt = cands[ci].on_A ? A : B;
        for (int i = 0; i < Nq; ++i)
            tgt[cands[ci].vortex][i] = std::real(cands[ci].part * ctx->tau[i]);
        HvPhi phi = hv_phi_integrals(ref, *ctx, A, B);
        cols.col(static_cast<int>(ci)) = phi.components(kind);
    }
    // greedy column pivoting for a well-conditioned phi minor
    std::vector<int> chosen;
    Eigen::MatrixXd R = cols;
    for (int pick = 0; pick < ns; ++pick) {
        int best = -1;
        double bestn = -1;
        for (int j = 0; j < cols.cols(); ++j) {
            if (std::find(chosen.begin(), chosen.end(), j) != chosen.end()) continue;
            if (R.col(j).norm() > bestn) {
                bestn = R.col(j).norm();
                best = j;
            }
        }
        if (best < 0 || bestn <= 1e-14)
            throw degeneracy_error("could not build a slack basis (phi map degenerate)", bestn, 0);
        chosen.push_back(best);
        Eigen::VectorXd q = R.col(best).normalized();
        R -= q * (q.transpose() * R);
    }
    for (int j : chosen) {
        slack_.push_back(cands[j]);
        // projected residual column of the direction
        Residual res;
        res.A.assign(M_, std::vector<double>(Nq, 0.0));
        res.B.assign(M_, std::vector<double>(Nq, 0.0));
        auto& tgt = cands[j].on_A ? res.A : res.B;
        for (int i = 0; i < Nq; ++i)
            tgt[cands[j].vortex][i] = std::real(cands[j].part * ctx->tau[i]);
        slack_cols_.push_back(extract(res));
    }
}

Eigen::VectorXd ReducedSystem::eval(const Eigen::VectorXd& x, const HollowState& ref) const {
    HollowState u = unpack(x, ref);
    auto ctx = context_for(u);
    Residual res = full_residual(u, *ctx);
    Eigen::VectorXd r = extract(res);
    int si = 0;
    for (int i = 0; i < dim(); ++i)
        if (dofs_[i].kind == Dof::Slack) r -= x(i) * slack_cols_[si++];
    return r;
}

double ReducedSystem::slack_magnitude(const Eigen::VectorXd& x) const {
    double z = 0.0;
    for (int i = 0; i < dim(); ++i)
        if (dofs_[i].kind == Dof::Slack) z = std::max(z, std::abs(x(i)));
    return z;
}

}  // namespace

HollowState newton_solve(const HollowState& u_init, const Scenario& sc,
                         const NewtonSettings& settings, NewtonReport* report) {
    u_init.validate();
    int N = u_init.N(), M = u_init.M();
    ReducedSystem rs(sc, N, M);
    double defect = rs.symmetry_defect(u_init);
    if (defect > 1e-8)
        throw domain_error("initial state violates the scenario symmetry (defect " +
                           std::to_string(defect) + ")");
    rs.prepare_slack(u_init);
    Eigen::VectorXd x = rs.pack(u_init);
    double last = std::numeric_limits<double>::infinity();
    std::string trace;
    for (int it = 0; it <= settings.max_iter; ++it) {
        Eigen::VectorXd r = rs.eval(x, u_init);
        last = r.lpNorm<Eigen::Infinity>();
        trace += (it ? " " : "") + std::to_string(last);
        if (last < settings.residual_tol) {
            // the slack must vanish with the residual (identity-explained deficiency)
            double zmax = rs.slack_magnitude(x);
            if (zmax > 10.0 * settings.residual_tol)
                throw degeneracy_error("slack did not vanish at the solution", zmax, it);
            if (report) *report = {it, last, zmax};
            return rs.unpack(x, u_init);
        }
        if (it == settings.max_iter) break;
        int n = rs.dim();
        Eigen::MatrixXd J(n, n);
        parallel_for(n, [&](int i) {
            double h = settings.fd_step * (1.0 + std::abs(x(i)));
            Eigen::VectorXd xp = x;
            xp(i) += h;
            J.col(i) = (rs.eval(xp, u_init) - r) / h;
        });
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
        double rc = lu.rcond();
        if (!(rc > settings.min_rcond))
            throw degeneracy_error("near-singular reduced Jacobian (rcond " + std::to_string(rc) +
                                       ")",
                                   last, it);
        Eigen::VectorXd dx = lu.solve(-r);
        double step = 1.0;
        bool moved = false;
        for (int h = 0; h <= settings.backtracking; ++h) {
            Eigen::VectorXd xn = x + step * dx;
            bool exited = false;
            double nn = std::numeric_limits<double>::infinity();
            try {
                nn = rs.eval(xn, u_init).lpNorm<Eigen::Infinity>();
            } catch (const domain_error&) {
                exited = true;
            }
            if (!exited && (nn < last || nn < settings.residual_tol)) {
                x = xn;
                moved = true;
                break;
            }
            step *= 0.5;
            if (h == settings.backtracking && exited)
                throw domain_error("line search exited the admissible set O_delta");
        }
        if (!moved)
            throw convergence_error("Newton line search stalled; residual trace: " + trace, last,
                                    it);
    }
    throw convergence_error("Newton did not converge; residual trace: " + trace, last,
                            settings.max_iter);
}

namespace {

HollowState state_with_rho(const HollowState& u, double rho) {
    HollowState v = u;
    v.rho = rho;
    return v;
}

// zero-pad all densities to a finer truncation (late-branch resolution escalation)
HollowState pad_state(const HollowState& u, int N2) {
    HollowState v = u;
    for (auto* dv : {&v.mu, &v.nu})
        for (auto& d : *dv) {
            SpectralDensity e(N2);
            for (int m = 1; m <= d.N(); ++m) e[m] = d[m];
            d = e;
        }
    return v;
}

// Pseudo-arclength corrector in (x, rho): reduced residual plus the tangent constraint
// t . ((x, rho) - (x_pred, rho_pred)) = 0. Used when the fixed-rho corrector goes
// near-singular (possible fold).
std::pair<HollowState, double> newton_solve_arclength(ReducedSystem& rs, const HollowState& ref,
                                                      const Eigen::VectorXd& x_pred,
                                                      double rho_pred,
                                                      const Eigen::VectorXd& tangent,
                                                      const NewtonSettings& settings) {
    int n = rs.dim();
    Eigen::VectorXd y(n + 1);
    y.head(n) = x_pred;
    y(n) = rho_pred;
    auto eval = [&](const Eigen::VectorXd& yy) {
        Eigen::VectorXd g(n + 1);
        HollowState r = state_with_rho(ref, yy(n));
        g.head(n) = rs.eval(yy.head(n), r);
        Eigen::VectorXd d(n + 1);
        d.head(n) = yy.head(n) - x_pred;
        d(n) = yy(n) - rho_pred;
        g(n) = tangent.dot(d);
        return g;
    };
    double last = std::numeric_limits<double>::infinity();
    for (int it = 0; it <= settings.max_iter; ++it) {
        Eigen::VectorXd r = eval(y);
        last = r.lpNorm<Eigen::Infinity>();
        if (last < settings.residual_tol)
            return {state_with_rho(rs.unpack(y.head(n), ref), y(n)), y(n)};
        if (it == settings.max_iter) break;
        Eigen::MatrixXd J(n + 1, n + 1);
        parallel_for(n + 1, [&](int i) {
            double h = settings.fd_step * (1.0 + std::abs(y(i)));
            Eigen::VectorXd yp = y;
            yp(i) += h;
            J.col(i) = (eval(yp) - r) / h;
        });
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
        if (!(lu.rcond() > 1e-13))
            throw degeneracy_error("singular arclength system", last, it);
        Eigen::VectorXd dy = lu.solve(-r);
        double step = 1.0;
        for (int h = 0; h <= settings.backtracking; ++h) {
            try {
                if (eval(y + step * dy).lpNorm<Eigen::Infinity>() < last) break;
            } catch (const domain_error&) {
            }
            step *= 0.5;
        }
        y += step * dy;
    }
    throw convergence_error("arclength corrector did not converge", last, settings.max_iter);
}

}  // namespace

ContinuationResult continue_branch_from(const Scenario& sc, const HollowState& start,
                                        double arclength0, const StepControl& ctrl,
                                        const NewtonSettings& settings,
                                        const BranchCallback& on_accept) {
    ContinuationResult out;
    HollowState u = start;
    auto rs_ptr = std::make_unique<ReducedSystem>(sc, u.N(), u.M());
    Eigen::VectorXd x = rs_ptr->pack(u);
    double rho = u.rho;
    double arclen = arclength0;

    DiagnosticsReport rep0 = run_diagnostics(u, ctrl.with_momentum_check);
    if (!rep0.gates_ok(ctrl.o_delta_gate)) {
        out.reason = TerminationReason::step_failure;
        out.note = "start state fails diagnostics gates";
        return out;
    }
    // monitor baselines: the first accepted point of the branch (callers may override on resume)
    double nconf0 = ctrl.monitor_baseline_n_conf > 0 ? ctrl.monitor_baseline_n_conf : rep0.n_conf;
    double nvel0 = ctrl.monitor_baseline_n_vel > 0 ? ctrl.monitor_baseline_n_vel : rep0.n_vel;

    Eigen::VectorXd x_prev = x;
    double rho_prev = rho;
    bool have_prev = false;
    double drho = ctrl.drho_init;
    int consecutive = 0;
    int fail_streak = 0;

    for (int step = 0; static_cast<int>(out.points.size()) < ctrl.max_steps + 1; ++step) {
        if (drho < ctrl.drho_min) {
            out.reason = TerminationReason::step_failure;
            out.note = "step size underflow without monitor blowup";
            return out;
        }
        double rho_new = std::min(rho + drho, ctrl.rho_max);
        // secant predictor in the packed unknown
        Eigen::VectorXd x_pred = x;
        if (have_prev && rho != rho_prev)
            x_pred = x + (x - x_prev) * ((rho_new - rho) / (rho - rho_prev));
        bool ok = false;
        HollowState unew;
        Eigen::VectorXd xnew;
        try {
            HollowState guess = state_with_rho(rs_ptr->unpack(x_pred, u), rho_new);
            // fixed-rho corrector; the rcond floor matches the arclength handover rule
            NewtonSettings fixed = settings;
            fixed.min_rcond = std::max(settings.min_rcond, 1.0 / ctrl.arclength_cond_switch);
            unew = newton_solve(guess, sc, fixed);
            xnew = rs_ptr->pack(unew);
            rho_new = unew.rho;
            ok = true;
        } catch (const degeneracy_error&) {
            // possible fold: pseudo-arclength corrector in (u, rho)
            try {
                rs_ptr->prepare_slack(u);
                Eigen::VectorXd tangent(rs_ptr->dim() + 1);
                if (have_prev && rho != rho_prev) {
                    tangent.head(rs_ptr->dim()) = x - x_prev;
                    tangent(rs_ptr->dim()) = rho - rho_prev;
                } else {
                    tangent.setZero();
                    tangent(rs_ptr->dim()) = 1.0;
                }
                tangent.normalize();
                auto [ua, rho_a] =
                    newton_solve_arclength(*rs_ptr, u, x_pred, rho_new, tangent, settings);
                unew = ua;
                rho_new = rho_a;
                xnew = rs_ptr->pack(unew);
                ok = true;
            } catch (const std::runtime_error&) {
                ok = false;
            }
        } catch (const std::runtime_error&) {
            ok = false;
        }
        DiagnosticsReport rep;
        if (ok) {
            try {
                // gates first; the momentum cross-check is costly and only attaches to
                // points that will actually be accepted
                rep = run_diagnostics(unew, false);
                ok = rep.gates_ok(ctrl.o_delta_gate);
                if (ok && ctrl.with_momentum_check &&
                    steady_kind(unew.config()) == SteadyKind::rotating) {
                    try {
                        rep.momentum_identity = momentum_identity_residual(FlowFields(unew));
                    } catch (const domain_error&) {
                    }
                }
            } catch (const std::runtime_error&) {
                ok = false;  // a monitor outside its domain counts as a failed gate
            }
        }
        if (!ok) {
            drho *= 0.5;
            consecutive = 0;
            ++fail_streak;
            // resolution escalation for late-branch states before giving up on the step
            if ((fail_streak >= 6 || drho < 1e3 * ctrl.drho_min) && u.N() < ctrl.N_max) {
                int N2 = std::min(2 * u.N(), ctrl.N_max);
                u = pad_state(u, N2);
                rs_ptr = std::make_unique<ReducedSystem>(sc, N2, u.M());
                x = rs_ptr->pack(u);
                have_prev = false;
                drho = std::max(drho, 16.0 * ctrl.drho_min);
                fail_streak = 0;
            }
            continue;
        }
        fail_streak = 0;
        double ds = std::sqrt((xnew - x).squaredNorm() + (rho_new - rho) * (rho_new - rho));
        arclen += ds;
        x_prev = x;
        rho_prev = rho;
        have_prev = true;
        x = xnew;
        rho = rho_new;
        u = unew;
        BranchPoint bp{u, rep, arclen, true};
        out.points.push_back(bp);
        if (on_accept) on_accept(bp);

        // termination monitors
        bool conf_blow = rep.n_conf > ctrl.monitor_factor * nconf0;
        bool vel_blow = rep.n_vel > ctrl.monitor_factor * nvel0;
        if (conf_blow || vel_blow) {
            out.reason = (rep.n_conf / nconf0 >= rep.n_vel / nvel0)
                             ? TerminationReason::conformal_degeneracy
                             : TerminationReason::velocity_degeneracy;
            out.note = "monitor exceeded " + std::to_string(ctrl.monitor_factor) +
                       "x its first accepted value";
            return out;
        }
        double lam_mag = 0.0;
        for (double l : u.lambda) lam_mag = std::max(lam_mag, std::abs(l));
        if (lam_mag > ctrl.lambda_blowup) {
            VortexConfiguration cfg = u.config();
            if (steady_kind(cfg) == SteadyKind::rotating &&
                std::abs(rep.excess_L) > ctrl.momentum_blowup) {
                out.reason = TerminationReason::angular_momentum_blowup;
            } else {
                out.reason = TerminationReason::parameter_blowup;
            }
            return out;
        }
        if (rho >= ctrl.rho_max) {
            out.reason = TerminationReason::max_steps;
            out.note = "reached rho_max";
            return out;
        }
        if (++consecutive >= 3) {
            consecutive = 0;
            double gap = u.config().min_gap();
            double cap = 0.1 * (gap - 2.0 * rho);
            drho = std::min(2.0 * drho, std::max(cap, ctrl.drho_min));
        }
    }
    out.reason = TerminationReason::max_steps;
    return out;
}

ContinuationResult continue_branch(const Scenario& sc, const StepControl& ctrl,
                                   const NewtonSettings& settings,
                                   const BranchCallback& on_accept) {
    HollowState u0 = leading_guess(sc, ctrl.rho_start, ctrl.N);
    HollowState u = newton_solve(u0, sc, settings);
    DiagnosticsReport rep0 = run_diagnostics(u, ctrl.with_momentum_check);
    ContinuationResult out;
    if (!rep0.gates_ok(ctrl.o_delta_gate)) {
        out.reason = TerminationReason::step_failure;
        out.note = "start state fails diagnostics gates";
        return out;
    }
    BranchPoint first{u, rep0, 0.0, true};
    if (on_accept) on_accept(first);
    ContinuationResult rest = continue_branch_from(sc, u, 0.0, ctrl, settings, on_accept);
    out.points.push_back(first);
    out.points.insert(out.points.end(), rest.points.begin(), rest.points.end());
    out.reason = rest.reason;
    out.note = rest.note;
    return out;
}

FarFieldCoeffs far_field_coeffs(const HollowState& u) {
    FarFieldCoeffs out;
    double r3 = u.rho * u.rho * u.rho;
    for (int k = 0; k < u.M(); ++k) {
        out.f_simple_pole.push_back(-r3 * std::conj(u.mu[k][1]));
        out.w_cubic.push_back(2.0 * r3 * std::conj(u.nu[k][2]));
    }
    return out;
}

}  // namespace vf
