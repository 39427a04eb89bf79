// Acceptance suite: one pass/fail line per criterion, every tolerance pinned in code.
// Exit status is the number of failed criteria.

#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "vortexforge/branchio.hpp"
#include "vortexforge/desingularize.hpp"

using namespace vf;

namespace {

int failures = 0;

void report(int idx, const std::string& name, bool ok, const std::string& detail) {
    std::printf("[%s] criterion %2d: %-58s %s\n", ok ? "PASS" : "FAIL", idx, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

VortexConfiguration lambda_t0() {
    return {{1.0, -1.0}, {cplx(0, 1), cplx(0, -1)}, 1.0 / (4.0 * pi), 0.0};
}
VortexConfiguration lambda_r0() {
    return {{1.0, 1.0}, {cplx(1, 0), cplx(-1, 0)}, 0.0, 1.0 / (4.0 * pi)};
}
VortexConfiguration lambda_s0() {
    return {{2.0, -1.0, 2.0}, {cplx(1, 0), cplx(0, 0), cplx(-1, 0)}, 0.0, 0.0};
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
}

// ---------------------------------------------------------------------------

void criterion_1() {
    double worst = 0;
    for (const auto& cfg : {lambda_t0(), lambda_r0(), lambda_s0()})
        for (const cplx& v : eval_pv_residual(cfg)) worst = std::max(worst, std::abs(v));
    report(1, "steady residuals of the three worked equilibria", worst < 1e-14,
           "max |V| = " + fmt(worst) + " (tol 1e-14)");
}

void criterion_2() {
    struct Case {
        VortexConfiguration cfg;
        std::vector<std::string> names;
        int codim;
    };
    std::vector<Case> cases{
        {lambda_t0(), {"gamma1", "re_zeta2", "im_zeta2"}, 1},
        {lambda_r0(), {"re_zeta1", "re_zeta2", "im_zeta2"}, 1},
        {lambda_s0(), {"gamma1", "re_zeta3", "im_zeta3"}, 3},
    };
    bool ok = true;
    double fd_worst = 0;
    for (const auto& c : cases) {
        auto split = ParameterSplit::from_names(c.names, c.cfg.size());
        SteadyClass cls = classify_nondegeneracy(c.cfg, split);
        Eigen::MatrixXd J = pv_jacobian(c.cfg, split);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
        int rank = 0;
        for (int i = 0; i < svd.singularValues().size(); ++i)
            if (svd.singularValues()(i) > 1e-9 * svd.singularValues()(0)) ++rank;
        ok = ok && (rank == 3) && (cls.codim == c.codim) && cls.nondegenerate;
        // analytic vs central finite differences, step 1e-6, entrywise
        double h = 1e-6;
        for (int col = 0; col < J.cols(); ++col) {
            VortexConfiguration p = c.cfg, m = c.cfg;
            p.set_coord(split.varying[col], c.cfg.coord(split.varying[col]) + h);
            m.set_coord(split.varying[col], c.cfg.coord(split.varying[col]) - h);
            auto Vp = eval_pv_residual(p), Vm = eval_pv_residual(m);
            for (int k = 0; k < c.cfg.size(); ++k) {
                cplx fd = (Vp[k] - Vm[k]) / (2.0 * h);
                fd_worst = std::max(fd_worst, std::abs(J(2 * k, col) - fd.real()));
                fd_worst = std::max(fd_worst, std::abs(J(2 * k + 1, col) - fd.imag()));
            }
        }
    }
    ok = ok && fd_worst <= 1e-6;
    report(2, "non-degeneracy ranks 3 / codims 1,1,3 + FD jacobian", ok,
           "FD defect = " + fmt(fd_worst) + " (tol 1e-6)");
}

void criterion_3() {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> mdist(1, 5);
    double worst = 0;
    for (int t = 0; t < 100; ++t) {
        int M = mdist(rng);
        VortexConfiguration cfg;
        for (int k = 0; k < M; ++k) {
            cfg.gammas.push_back(u(rng) + 2.0);
            cfg.centers.emplace_back(3.0 * u(rng) + 4.0 * k, 3.0 * u(rng));
        }
        cfg.c = u(rng);
        cfg.omega = u(rng);
        double scale = std::abs(cfg.c) + std::abs(cfg.omega);
        for (double g : cfg.gammas) scale += std::abs(g);
        auto [r1, r2] = check_pv_identities(cfg);
        worst = std::max(worst, std::max(std::abs(r1), std::abs(r2)) / std::max(1.0, scale));
    }
    report(3, "point-vortex identities on 100 random configurations", worst < 1e-13,
           "max scaled residual = " + fmt(worst) + " (tol 1e-13)");
}

void criterion_4() {
    int N = 64;
    double worst = 0;
    for (int m = 1; m <= N; ++m) {
        SpectralDensity e(N);
        e[m] = cplx(1.0, -0.5);
        SpectralDensity r1 = apply_multiplier(MultiplierKind::Re_tauC_dtau, e);
        SpectralDensity r2 = apply_multiplier(MultiplierKind::Re_itauC_dtau, e);
        SpectralDensity r3 = apply_multiplier(MultiplierKind::Re_C_dtau, e);
        for (int j = 1; j <= N; ++j) {
            cplx w1 = (j == m) ? 0.5 * m * e[m] : cplx(0);
            cplx w2 = (j == m) ? -0.5 * cplx(0, 1) * double(m) * e[m] : cplx(0);
            worst = std::max(worst, std::abs(r1[j] - w1) / m);
            worst = std::max(worst, std::abs(r2[j] - w2) / m);
        }
        for (int j = 1; j <= N + 1; ++j) {
            cplx w3 = (j == m + 1) ? 0.5 * m * e[m] : cplx(0);
            worst = std::max(worst, std::abs(r3[j] - w3) / m);
        }
    }
    bool mult_ok = worst < 1e-15;
    // 2C = iH + P0 - 1 against an independent Hilbert multiplier, unit-scale density;
    // both sides synthesized by FFT so the comparison measures the operators
    std::mt19937 rng(11);
    std::normal_distribution<double> g;
    double hil = 0;
    int Nq = 4 * N;
    SpectralDensity d(N);
    double nrm = 0;
    for (int m = 1; m <= N; ++m) d[m] = std::exp(-0.3 * m) * cplx(g(rng), g(rng));
    GridFunction phi = to_grid(d, Nq);
    for (const cplx& v : phi.values) nrm = std::max(nrm, std::abs(v));
    for (cplx& c : d.coeffs) c /= nrm;  // sup-norm ~ 1
    phi = to_grid(d, Nq);
    GridFunction c2 = cauchy(d, Nq);
    // H phi via its multiplier -i sign(m), synthesized independently
    std::vector<cplx> hat(Nq, cplx(0));
    for (int m = 1; m <= N; ++m) {
        hat[m] = -cplx(0, 1) * d[m];
        hat[Nq - m] = cplx(0, 1) * std::conj(d[m]);
    }
    GridFunction hphi(Nq);
    dft(hat.data(), hphi.values.data(), Nq, true);
    for (int i = 0; i < Nq; ++i) {
        cplx rhs = cplx(0, 1) * hphi.values[i] - phi.values[i];  // P0 phi = 0
        hil = std::max(hil, std::abs(2.0 * c2.values[i] - rhs));
    }
    report(4, "multiplier exactness and 2C = iH + P0 - 1", mult_ok && hil < 1e-14,
           "mode defect " + fmt(worst) + " (1e-15), Hilbert " + fmt(hil) + " (1e-14)");
}

void criterion_5() {
    // closed-form off-diagonal trace: -rho/(2 + rho tau)
    VortexConfiguration cfg{{1.0, 1.0}, {cplx(1, 0), cplx(-1, 0)}, 0.0, 0.0};
    int N = 32, Nq = 4 * N;
    DensityVector mu(2, SpectralDensity(N));
    mu[1][1] = 1.0;
    double rho = 0.1;
    GridFunction tr = trace_Z(rho, cfg, mu, 0, Nq);
    auto tau = grid_nodes(Nq);
    double e1 = 0;
    for (int i = 0; i < Nq; ++i)
        e1 = std::max(e1, std::abs(tr.values[i] + rho / (2.0 + rho * tau[i])));
    // round trip through recover_density
    std::mt19937 rng(5);
    std::normal_distribution<double> g;
    DensityVector rnd(2, SpectralDensity(N));
    for (int k = 0; k < 2; ++k)
        for (int m = 1; m <= N; ++m) rnd[k][m] = std::exp(-0.2 * m) * cplx(g(rng), g(rng));
    double e2 = 0;
    for (int k = 0; k < 2; ++k) {
        SpectralDensity rec = recover_density(trace_Z(rho, cfg, rnd, k, Nq), N);
        for (int m = 1; m <= N; ++m) e2 = std::max(e2, std::abs(rec[m] - rnd[k][m]));
    }
    // trapezoid refinement: doubling Nq moves the off-diagonal terms by < 1e-13
    GridFunction a = trace_Z(0.35, cfg, rnd, 0, 4 * N);
    GridFunction b = trace_Z(0.35, cfg, rnd, 0, 8 * N);
    double e3 = 0;
    for (int i = 0; i < 4 * N; ++i) e3 = std::max(e3, std::abs(a.values[i] - b.values[2 * i]));
    report(5, "layer-potential oracles (trace, round trip, refinement)",
           e1 < 1e-12 && e2 < 1e-12 && e3 < 1e-13,
           "closed form " + fmt(e1) + ", round trip " + fmt(e2) + ", refine " + fmt(e3));
}

void criterion_6() {
    bool ok = true;
    std::string detail;
    NewtonSettings st;
    st.residual_tol = 1e-11;
    st.max_iter = 8;
    for (auto sc : {Scenario::rotating_pair(), Scenario::stationary_tripole(),
                    Scenario::translating_pair()}) {
        NewtonReport rep;
        try {
            HollowState u = newton_solve(leading_guess(sc, 0.05, 64), sc, st, &rep);
            Residual res = full_residual(u);
            double rmax = 0;
            for (const auto& row : res.A)
                for (double v : row) rmax = std::max(rmax, std::abs(v));
            for (const auto& row : res.B)
                for (double v : row) rmax = std::max(rmax, std::abs(v));
            ok = ok && rep.iterations <= 8 && rmax < 1e-11;
            detail += to_string(sc.kind) + ":" + std::to_string(rep.iterations) + "it/" +
                      fmt(rmax) + " ";
        } catch (const std::exception&) {
            ok = false;
            detail += to_string(sc.kind) + ":threw ";
        }
    }
    report(6, "desingularization at rho = 0.05, N = 64, <= 8 iterations", ok, detail);
}

void criterion_7() {
    Scenario sc = Scenario::rotating_pair();
    std::vector<double> rhos{1e-3, 2e-3, 4e-3};
    std::vector<double> rem_mn, rem_ql;
    for (double rho : rhos) {
        HollowState u = newton_solve(leading_guess(sc, rho, 24), sc);
        HollowState dot = leading_guess(sc, rho, 24);
        double mn = 0, ql = std::abs(u.lambda[0] - sc.base.omega);
        for (int k = 0; k < 2; ++k) {
            for (int m = 1; m <= 24; ++m) {
                mn = std::max(mn, std::abs(u.mu[k][m] - dot.mu[k][m]));
                mn = std::max(mn, std::abs(u.nu[k][m] - dot.nu[k][m]));
            }
            ql = std::max(ql, std::abs(u.Q[k] - dot.Q[k]));
        }
        rem_mn.push_back(mn);
        rem_ql.push_back(ql);
    }
    double s1 = std::log2(rem_mn[1] / rem_mn[0]), s2 = std::log2(rem_mn[2] / rem_mn[1]);
    double s3 = std::log2(rem_ql[1] / rem_ql[0]), s4 = std::log2(rem_ql[2] / rem_ql[1]);
    bool slopes_ok = s1 >= 1.9 && s2 >= 1.9 && s3 >= 1.9 && s4 >= 1.9;
    // far-field rho^4 coefficient matched with order >= 0.9
    cplx S1 = straining_coefficient(sc.base, 0);
    cplx tf = 8.0 * pi * cplx(0, 1) * std::conj(S1) / sc.base.gammas[0];
    cplx tw = -2.0 * std::conj(S1);
    std::vector<double> ef, ew;
    for (double rho : {0.01, 0.02}) {
        HollowState u = newton_solve(leading_guess(sc, rho, 24), sc);
        FarFieldCoeffs fc = far_field_coeffs(u);
        double r4 = std::pow(rho, 4);
        ef.push_back(std::abs(fc.f_simple_pole[0] / r4 - tf));
        ew.push_back(std::abs(fc.w_cubic[0] / r4 - tw));
    }
    double of = std::log2(ef[1] / ef[0]), ow = std::log2(ew[1] / ew[0]);
    bool far_ok = of >= 0.9 && ow >= 0.9;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "slopes (mu,nu) %.2f/%.2f (Q,lam) %.2f/%.2f; far-field %.2f/%.2f", s1, s2, s3,
                  s4, of, ow);
    report(7, "asymptotic orders of the desingularized branch", slopes_ok && far_ok, buf);
}

struct BranchBundle {
    ContinuationResult rotating, translating, tripole;
};

BranchBundle run_branches() {
    BranchBundle b;
    NewtonSettings st;
    {
        StepControl ctrl;
        ctrl.rho_start = 0.02;
        ctrl.rho_max = 0.995;
        ctrl.drho_init = 0.01;
        ctrl.max_steps = 120;
        ctrl.N = 64;
        ctrl.monitor_factor = 1e3;
        ctrl.with_momentum_check = true;
        b.rotating = continue_branch(Scenario::rotating_pair(), ctrl, st);
    }
    {
        StepControl ctrl;
        ctrl.rho_start = 0.03;
        ctrl.rho_max = 0.6;
        ctrl.drho_init = 0.03;
        ctrl.max_steps = 25;
        ctrl.N = 64;
        b.translating = continue_branch(Scenario::translating_pair(), ctrl, st);
    }
    {
        StepControl ctrl;
        ctrl.rho_start = 0.02;
        ctrl.rho_max = 0.42;
        ctrl.drho_init = 0.02;
        ctrl.max_steps = 22;
        ctrl.N = 64;
        b.tripole = continue_branch(Scenario::stationary_tripole(), ctrl, st);
    }
    return b;
}

void criterion_8(const BranchBundle& b) {
    double circ = 0, speed = 0, flux = 0, ucst = 0;
    bool gates = true;
    int npts = 0;
    for (const auto* res : {&b.rotating, &b.translating, &b.tripole}) {
        for (const auto& bp : res->points) {
            ++npts;
            VortexConfiguration cfg = bp.state.config();
            for (int k = 0; k < bp.state.M(); ++k) {
                circ = std::max(circ, std::abs(bp.diagnostics.circulations[k] - cfg.gammas[k]));
                speed = std::max(speed, bp.diagnostics.speed_identity_resid[k]);
                flux = std::max(flux, bp.diagnostics.flux_spread[k]);
            }
            gates = gates && bp.diagnostics.winding_ok && bp.diagnostics.boundary_injective &&
                    bp.diagnostics.mutually_exterior;
            FlowFields F(bp.state);
            for (int k = 0; k < bp.state.M(); ++k) {
                double lo = 1e300, hi = 0;
                for (const cplx& uu : F.U_trace(k)) {
                    lo = std::min(lo, std::abs(uu));
                    hi = std::max(hi, std::abs(uu));
                }
                ucst = std::max(ucst, hi - lo);
            }
        }
    }
    bool ok = circ < 1e-10 && speed < 1e-8 && flux < 1e-9 && ucst < 1e-9 && gates && npts > 0;
    report(8, "exact invariants at every accepted branch point", ok,
           "circ " + fmt(circ) + ", speed " + fmt(speed) + ", flux " + fmt(flux) + ", |U| " +
               fmt(ucst) + ", " + std::to_string(npts) + " pts");
}

void criterion_9(const BranchBundle& b) {
    // 50 random class-matched states with ||(mu,nu)|| <= 0.1, |rho| <= 0.05
    std::mt19937 rng(77);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> ur(-0.05, 0.05);
    double worst = 0;
    for (int t = 0; t < 50; ++t) {
        SteadyKind kind = (t % 3 == 0)   ? SteadyKind::translating
                          : (t % 3 == 1) ? SteadyKind::rotating
                                         : SteadyKind::stationary;
        Scenario sc = (kind == SteadyKind::rotating)      ? Scenario::rotating_pair()
                      : (kind == SteadyKind::translating) ? Scenario::translating_pair()
                                                          : Scenario::stationary_tripole();
        HollowState u;
        u.base = sc.base;
        for (auto& z : u.base.centers) z += 0.03 * cplx(g(rng), g(rng));
        for (auto& gm : u.base.gammas) gm += 0.03 * g(rng);
        u.split = sc.split;
        for (int i : sc.split.varying) u.lambda.push_back(u.base.coord(i));
        int N = 24;
        for (int k = 0; k < u.base.size(); ++k) {
            SpectralDensity dm(N), dn(N);
            for (int m = 1; m <= N; ++m) {
                dm[m] = 0.02 * std::exp(-0.35 * m) * cplx(g(rng), g(rng));
                dn[m] = 0.02 * std::exp(-0.35 * m) * cplx(g(rng), g(rng));
            }
            u.mu.push_back(dm);
            u.nu.push_back(dn);
            u.Q.push_back(0.02 * g(rng));
        }
        u.rho = ur(rng);
        Residual res = full_residual(u);
        double scale = 1.0;
        for (const auto& row : res.B)
            for (double v : row) scale = std::max(scale, std::abs(v));
        Eigen::VectorXd p = hv_phi(kind, res.A, res.B, u);
        worst = std::max(worst, p.lpNorm<Eigen::Infinity>() / scale);
    }
    // and at all accepted branch points
    double worst_branch = 0;
    for (const auto* res : {&b.rotating, &b.translating, &b.tripole})
        for (const auto& bp : res->points)
            worst_branch = std::max(worst_branch, bp.diagnostics.phi_resid);
    bool ok = worst < 1e-9 && worst_branch < 1e-9;
    report(9, "hollow-vortex identity suite (phi maps)", ok,
           "random states " + fmt(worst) + ", branch points " + fmt(worst_branch) +
               " (tol 1e-9 x scale)");
}

void criterion_10(const BranchBundle& b) {
    double worst = 0;
    int n = 0;
    for (const auto& bp : b.rotating.points) {
        if (bp.diagnostics.momentum_identity >= 0) {
            worst = std::max(worst, bp.diagnostics.momentum_identity);
            ++n;
        }
    }
    report(10, "momentum identity with independent domain quadrature", n > 0 && worst < 1e-6,
           "max rel residual " + fmt(worst) + " over " + std::to_string(n) + " pts (tol 1e-6)");
}

void criterion_11(const BranchBundle& b) {
    double worst = 1e300;
    for (const auto& bp : b.translating.points) {
        FlowFields F(bp.state);
        worst = std::min(worst, wave_speed_check(F));
    }
    report(11, "wave speed bound along the Pocklington branch",
           worst > -1e-10 && !b.translating.points.empty(),
           "min margin " + fmt(worst) + " over " + std::to_string(b.translating.points.size()) +
               " pts");
}

void criterion_12() {
    // rotating class: genuinely rho-dependent integrals with measurable order
    VortexConfiguration rot{{1.0, 1.05}, {cplx(1.02, 0), cplx(-1, 0.03)}, 0.0, 1.0 / (4.0 * pi)};
    auto tr = appendix_limit_check(rot, {0.04, 0.02, 0.01});
    std::vector<double> errs;
    for (const auto& row : tr.rows) errs.push_back(std::abs(row.plain_integral - tr.plain_limit));
    double o1 = std::log2(errs[0] / errs[1]), o2 = std::log2(errs[1] / errs[2]);
    // translating/stationary classes: the zero-density integrals reduce by residues to the
    // limit itself, so convergence is exact at roundoff
    VortexConfiguration trl{{1.0, -0.5}, {cplx(0, 1.08), cplx(0.02, -0.97)}, 1.0 / (4.0 * pi),
                            0.0};
    auto tt = appendix_limit_check(trl, {0.04, 0.02, 0.01});
    double et = 0;
    for (const auto& row : tt.rows)
        et = std::max(et, std::abs(row.plain_integral - tt.plain_limit));
    VortexConfiguration sta{{2.0, -1.1, 2.0}, {cplx(1.03, 0), cplx(0, 0.01), cplx(-1, 0)}, 0.0,
                            0.0};
    auto ts = appendix_limit_check(sta, {0.04, 0.02, 0.01});
    double es = 0;
    for (const auto& row : ts.rows)
        es = std::max(es, std::abs(row.plain_integral - ts.plain_limit));
    bool ok = o1 >= 0.9 && o2 >= 0.9 && et < 1e-12 && es < 1e-12;
    char buf[120];
    std::snprintf(buf, sizeof buf, "rotating orders %.2f/%.2f; t/s exact to %s/%s", o1, o2,
                  fmt(et).c_str(), fmt(es).c_str());
    report(12, "Appendix limit checks of the combined boundary integrals", ok, buf);
}

void criterion_13(const BranchBundle& b) {
    double defect = 0;
    // scenario symmetry classes per vortex
    for (const auto& bp : b.rotating.points) {
        defect = std::max(defect, symmetry_defect(SymmetryClass::rr, bp.state.mu[0]));
        defect = std::max(defect, symmetry_defect(SymmetryClass::ir, bp.state.nu[0]));
    }
    for (const auto& bp : b.translating.points) {
        defect = std::max(defect, symmetry_defect(SymmetryClass::ii, bp.state.mu[0]));
        defect = std::max(defect, symmetry_defect(SymmetryClass::ii, bp.state.nu[0]));
    }
    for (const auto& bp : b.tripole.points) {
        defect = std::max(defect, symmetry_defect(SymmetryClass::rr, bp.state.mu[0]));
        defect = std::max(defect, symmetry_defect(SymmetryClass::ir, bp.state.nu[0]));
        defect = std::max(defect, symmetry_defect(SymmetryClass::rr_ii, bp.state.mu[1]));
        defect = std::max(defect, symmetry_defect(SymmetryClass::ir_ii, bp.state.nu[1]));
    }
    // exported physical boundaries even across both axes (checked on the last point of
    // each branch: the mirrored node set coincides with the curve family's node set)
    double mirror = 0;
    for (const auto* res : {&b.rotating, &b.translating, &b.tripole}) {
        if (res->points.empty()) continue;
        const auto& bp = res->points.back();
        FlowFields F(bp.state);
        int Nq = F.ctx().Nq;
        for (int k = 0; k < bp.state.M(); ++k) {
            const auto& all = F.f_trace(k);
            for (int i = 0; i < Nq; ++i) {
                for (cplx zr : {std::conj(all[i]), -std::conj(all[i])}) {
                    double best = 1e300;
                    for (int kk = 0; kk < bp.state.M(); ++kk)
                        for (int j = 0; j < Nq; ++j)
                            best = std::min(best, std::abs(zr - F.f_trace(kk)[j]));
                    mirror = std::max(mirror, best);
                }
            }
        }
    }
    bool ok = defect < 1e-12 && mirror < 1e-10;
    report(13, "symmetry preservation along all three branches", ok,
           "class defect " + fmt(defect) + " (1e-12), mirror " + fmt(mirror) + " (1e-10)");
}

void criterion_14(const BranchBundle& b) {
    const auto& res = b.rotating;
    bool n_ok = res.points.size() >= 20u;
    bool mono = true, gates = true;
    double prev = -1;
    for (const auto& bp : res.points) {
        if (bp.diagnostics.noncircularity <= prev) mono = false;
        prev = bp.diagnostics.noncircularity;
        gates = gates && bp.diagnostics.winding_ok && bp.diagnostics.boundary_injective &&
                bp.diagnostics.mutually_exterior;
    }
    bool reason_ok = res.reason == TerminationReason::conformal_degeneracy ||
                     res.reason == TerminationReason::velocity_degeneracy ||
                     res.reason == TerminationReason::angular_momentum_blowup;
    report(14, "global rotating-pair continuation behavior", n_ok && mono && gates && reason_ok,
           std::to_string(res.points.size()) + " pts, terminal " + to_string(res.reason) +
               ", noncirc " + fmt(res.points.back().diagnostics.noncircularity));
}

}  // namespace

int main() {
    std::printf("vortexforge acceptance suite\n");
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    std::printf("... running the three continuation branches (N = 64)\n");
    BranchBundle b = run_branches();
    criterion_8(b);
    criterion_9(b);
    criterion_10(b);
    criterion_11(b);
    criterion_12();
    criterion_13(b);
    criterion_14(b);
    std::printf("%s: %d criterion(s) failed\n", failures == 0 ? "SUCCESS" : "FAILURE", failures);
    return failures;
}
