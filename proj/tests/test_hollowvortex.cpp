#include <doctest.h>

#include <nlohmann/json.hpp>

#include "helpers.hpp"

using namespace vf;
using namespace vftest;

namespace {

// brute-force V_k^rho via the (corrected) series expansion, for the cross-oracle
cplx vrho_series(const VortexConfiguration& cfg, double rho, int k, cplx tau, int terms) {
    auto V = eval_pv_residual(cfg);
    cplx out = V[k] + cplx(0, cfg.omega) * rho * std::conj(tau);
    for (int n = 1; n <= terms; ++n) {
        cplx s = 0.0;
        for (int j = 0; j < cfg.size(); ++j)
            if (j != k)
                s += cfg.gammas[j] / two_pi_i * std::pow(rho * tau, n) /
                     std::pow(cfg.centers[j] - cfg.centers[k], n + 1);
        out -= s;
    }
    return out;
}

}  // namespace

TEST_CASE("w0 and its derivative for the worked potentials") {
    // rotating pair: w0 = (1/2 pi i) log((z-1)(z+1)) up to an integer branch shift
    VortexConfiguration r{{1.0, 1.0}, {cplx(1, 0), cplx(-1, 0)}, 0.0, 1.0 / (4.0 * pi)};
    for (cplx z : {cplx(0.5, 1.2), cplx(-2, 0.3), cplx(0, 3)}) {
        cplx direct = std::log((z - 1.0) * (z + 1.0)) / two_pi_i;
        cplx diff = build_w0(r, z) - direct;  // difference is an integer (branch multiple)
        CHECK(std::abs(diff - std::round(diff.real())) < 1e-13);
    }
    // tripole: w0' = derivative of (1/2 pi i) log((z-1)^2 (z+1)^2 / z)
    VortexConfiguration s{{2.0, -1.0, 2.0}, {cplx(1, 0), cplx(0, 0), cplx(-1, 0)}, 0.0, 0.0};
    for (cplx z : {cplx(0.4, 0.7), cplx(-1.5, -0.2)}) {
        cplx want = (2.0 / (z - 1.0) + 2.0 / (z + 1.0) - 1.0 / z) / two_pi_i;
        CHECK(std::abs(w0_zeta(s, z) - want) < 1e-14);
    }
    // single vortex, gamma = 2 pi at the origin: w0' = 1/(i z)
    VortexConfiguration one{{2.0 * pi}, {cplx(0, 0)}, 0.0, 0.0};
    cplx z(0.3, -0.8);
    CHECK(std::abs(w0_zeta(one, z) - 1.0 / (cplx(0, 1) * z)) < 1e-14);
    CHECK_THROWS_AS(w0_zeta(one, cplx(0, 0)), domain_error);
}

TEST_CASE("eval_Vrho: direct evaluation vs series, constants at rho = 0") {
    // steady rotating pair at rho = 0: V_k = 0 constantly
    VortexConfiguration r{{1.0, 1.0}, {cplx(1, 0), cplx(-1, 0)}, 0.0, 1.0 / (4.0 * pi)};
    GridFunction v0 = eval_Vrho(0.0, r, 0, 32);
    for (const cplx& v : v0.values) CHECK(std::abs(v) < 1e-16);
    // non-steady: constant V_k(Lambda)
    VortexConfiguration off = r;
    off.gammas[1] = 1.3;
    GridFunction voff = eval_Vrho(0.0, off, 0, 32);
    cplx want = eval_pv_residual(off)[0];
    for (const cplx& v : voff.values) CHECK(std::abs(v - want) < 1e-16);
    // direct value agrees with the m-series for |rho| < half the min gap
    VortexConfiguration cfg{{1.0, 1.0}, {cplx(1, 0), cplx(-1, 0)}, 0.0, 0.0};
    double rho = 0.1;
    GridFunction vr = eval_Vrho(rho, cfg, 0, 16);
    auto tau = grid_nodes(16);
    for (int i = 0; i < 16; ++i)
        CHECK(std::abs(vr.values[i] - vrho_series(cfg, rho, 0, tau[i], 60)) < 1e-12);
    CHECK_THROWS_AS(eval_Vrho(1.2, cfg, 0, 16), domain_error);
}

TEST_CASE("residuals vanish at the trivial state over a steady base") {
    for (auto kind : {SteadyKind::translating, SteadyKind::rotating, SteadyKind::stationary}) {
        Scenario sc = (kind == SteadyKind::rotating)      ? Scenario::rotating_pair()
                      : (kind == SteadyKind::translating) ? Scenario::translating_pair()
                                                          : Scenario::stationary_tripole();
        HollowState u = leading_guess(sc, 0.0, 16);
        Residual res = full_residual(u);
        CHECK(residual_inf(res) < 1e-15);
    }
}

TEST_CASE("kinematic residual components have zero grid mean") {
    std::mt19937 rng(21);
    for (auto kind : {SteadyKind::rotating, SteadyKind::translating, SteadyKind::stationary}) {
        HollowState u = random_state(rng, kind, 12, 0.04, 0.05);
        auto A = kinematic_residual(u);
        for (const auto& row : A) {
            double mean = 0;
            for (double v : row) mean += v;
            mean /= row.size();
            CHECK(std::abs(mean) < 1e-13);
        }
    }
}

TEST_CASE("Bernoulli residual: cancelled form equals the raw quotient for rho != 0") {
    std::mt19937 rng(22);
    HollowState u = random_state(rng, SteadyKind::rotating, 12, 0.05, 0.05);
    FlowFields F(u);
    auto B = bernoulli_residual(u);
    const auto& cfg = F.ctx().cfg;
    for (int k = 0; k < u.M(); ++k) {
        for (int i = 0; i < F.ctx().Nq; ++i) {
            double U2 = std::norm(F.U_trace(k)[i]);
            double raw = (u.rho * u.rho * U2 - cfg.gammas[k] * cfg.gammas[k] / (4.0 * pi * pi)) /
                             u.rho -
                         u.Q[k];
            CHECK(std::abs(B[k][i] - raw) < 1e-11);
        }
    }
}

TEST_CASE("rho = 0 Bernoulli limit matches the linear operator form") {
    // B at rho=0, mu=nu=0, Q=0, non-steady Lambda: (g^2/2pi^2) Re((2 pi i tau/g) V_k)
    VortexConfiguration off{{1.0, 1.0}, {cplx(1, 0), cplx(-1, 0)}, 0.0, 1.1 / (4.0 * pi)};
    Scenario sc = Scenario::rotating_pair();
    HollowState u;
    u.base = off;
    u.split = sc.split;
    u.lambda = {off.omega};
    u.rho = 0.0;
    int N = 12;
    u.mu.assign(2, SpectralDensity(N));
    u.nu.assign(2, SpectralDensity(N));
    u.Q.assign(2, 0.0);
    auto B = bernoulli_residual(u);
    auto V = eval_pv_residual(off);
    auto tau = grid_nodes(default_Nq(N));
    for (int k = 0; k < 2; ++k) {
        double g = off.gammas[k];
        for (size_t i = 0; i < tau.size(); ++i) {
            double want = g * g / (2.0 * pi * pi) * std::real(two_pi_i * tau[i] / g * V[k]);
            CHECK(std::abs(B[k][i] - want) < 1e-14);
        }
    }
}

TEST_CASE("q_from_state algebra and round trip") {
    Scenario sc = Scenario::rotating_pair();
    HollowState u = leading_guess(sc, 0.1, 8);
    u.Q.assign(2, 0.0);
    CHECK(q_from_state(u, 0) == doctest::Approx(1.0 / (2.0 * pi * 0.1)).epsilon(1e-12));
    // Q = (rho^2 q^2 - gamma^2/4pi^2)/rho inversion round trip
    double q = 2.3;
    u.Q[0] = (0.1 * 0.1 * q * q - 1.0 / (4.0 * pi * pi)) / 0.1;
    CHECK(q_from_state(u, 0) == doctest::Approx(q).epsilon(1e-12));
    u.rho = 0.0;
    CHECK_THROWS_AS(q_from_state(u, 0), domain_error);
}

TEST_CASE("circulation is gamma_k independent of the nu layer") {
    std::mt19937 rng(23);
    Scenario sc = Scenario::rotating_pair();
    HollowState u = leading_guess(sc, 0.1, 16);
    CHECK(circulation(u, 0) == doctest::Approx(1.0).epsilon(1e-12));
    // random nu at rho = 0.1: the layer contributes zero circulation
    u.nu[0] = random_density(rng, 16, 0.5);
    u.nu[1] = random_density(rng, 16, 0.5);
    CHECK(std::abs(circulation(u, 0) - 1.0) < 1e-12);
    CHECK(std::abs(circulation(u, 1) - 1.0) < 1e-12);
}

TEST_CASE("hv_phi vanishes on (0,0) and on the residual of states in O") {
    // tolerance 1e-9 x scale: the identity holds up to the trapezoid error of the
    // rational integrand, which is set by the smoothness of the test densities
    std::mt19937 rng(24);
    for (auto kind : {SteadyKind::translating, SteadyKind::rotating, SteadyKind::stationary}) {
        HollowState u = random_state(rng, kind, 24, 0.04, 0.04);
        BoundaryContext ctx(u.rho, u.config(), u.N());
        int Nq = ctx.Nq;
        std::vector<std::vector<double>> zero(u.M(), std::vector<double>(Nq, 0.0));
        Eigen::VectorXd z = hv_phi(kind, zero, zero, u);
        CHECK(z.lpNorm<Eigen::Infinity>() == 0.0);
        Residual res = full_residual(u, ctx);
        Eigen::VectorXd p = hv_phi(kind, res.A, res.B, u);
        double scale = std::max(1.0, residual_inf(res));
        CHECK(p.lpNorm<Eigen::Infinity>() < 1e-9 * scale);
        // class mismatch is a precondition error
        SteadyKind other =
            (kind == SteadyKind::rotating) ? SteadyKind::translating : SteadyKind::rotating;
        CHECK_THROWS_AS(hv_phi(other, res.A, res.B, u), domain_error);
    }
}

TEST_CASE("operator symmetry under (mu, nu, Q, rho) -> (mu(-.), -nu(-.), -Q, -rho)") {
    std::mt19937 rng(25);
    HollowState u = random_state(rng, SteadyKind::rotating, 12, 0.05, 0.04);
    Residual r1 = full_residual(u);
    HollowState v = u;
    v.rho = -u.rho;
    for (int k = 0; k < u.M(); ++k) {
        for (int m = 1; m <= u.N(); ++m) {
            double sgn = (m % 2 == 0) ? 1.0 : -1.0;  // (-1)^m
            v.mu[k][m] = sgn * u.mu[k][m];
            v.nu[k][m] = -sgn * u.nu[k][m];
        }
        v.Q[k] = -u.Q[k];
    }
    Residual r2 = full_residual(v);
    int Nq = static_cast<int>(r1.A[0].size());
    int sh = Nq / 2;  // tau -> -tau is a half-grid shift
    for (int k = 0; k < u.M(); ++k)
        for (int i = 0; i < Nq; ++i) {
            CHECK(std::abs(r1.A[k][i] + r2.A[k][(i + sh) % Nq]) < 1e-13);
            CHECK(std::abs(r1.B[k][i] + r2.B[k][(i + sh) % Nq]) < 1e-13);
        }
}

TEST_CASE("rho = 0 uniqueness: zero residual forces the trivial state") {
    // solve F(u, 0) = 0 by the scenario Newton from small random seeds
    std::mt19937 rng(26);
    Scenario sc = Scenario::rotating_pair();
    for (int t = 0; t < 3; ++t) {
        HollowState u0 = leading_guess(sc, 0.0, 12);
        u0.mu[0] = symmetry_project(SymmetryClass::rr, random_density(rng, 12, 1e-3));
        u0.nu[0] = symmetry_project(SymmetryClass::ir, random_density(rng, 12, 1e-3));
        for (int m = 1; m <= 12; ++m) {
            double sgn = (m % 2 == 0) ? -1.0 : 1.0;
            u0.mu[1][m] = sgn * std::conj(u0.mu[0][m]);
            u0.nu[1][m] = sgn * std::conj(u0.nu[0][m]);
        }
        u0.Q.assign(2, 1e-3);
        HollowState sol = newton_solve(u0, sc);
        for (int k = 0; k < 2; ++k) {
            CHECK(sol.mu[k].norm_inf() < 1e-10);
            CHECK(sol.nu[k].norm_inf() < 1e-10);
            CHECK(std::abs(sol.Q[k]) < 1e-10);
        }
        // and Lambda is steady
        auto V = eval_pv_residual(sol.config());
        for (const cplx& v : V) CHECK(std::abs(v) < 1e-10);
    }
}

TEST_CASE("linearized blocks match finite differences of the nonlinear residual") {
    Scenario sc = Scenario::translating_pair();
    // full-parameter split of the translating example to exercise the lambda columns
    auto split = ParameterSplit::from_names({"gamma1", "re_zeta2", "im_zeta2"}, 2);
    LinearizedTrivial lin = linearized_trivial(sc.base, split);
    int N = 8;
    Eigen::MatrixXd Jan = lin.assemble_full(N);

    HollowState u0;
    u0.base = sc.base;
    u0.split = split;
    u0.lambda = {1.0, 0.0, -1.0};
    u0.rho = 0.0;
    u0.mu.assign(2, SpectralDensity(N));
    u0.nu.assign(2, SpectralDensity(N));
    u0.Q.assign(2, 0.0);

    int M = 2;
    int nu_off = M * 2 * N, q_off = 2 * M * 2 * N, l_off = q_off + M;
    int ncols = l_off + 3;
    auto apply = [&](const HollowState& u) {
        Residual res = full_residual(u);
        Eigen::VectorXd out(Jan.rows());
        int arows = 2 * N, brows = 1 + 2 * (N + 1);
        for (int k = 0; k < M; ++k) {
            GridFunction ga(default_Nq(N)), gb(default_Nq(N));
            for (int i = 0; i < ga.Nq(); ++i) {
                ga.values[i] = res.A[k][i];
                gb.values[i] = res.B[k][i];
            }
            auto ha = grid_to_laurent(ga);
            auto hb = grid_to_laurent(gb);
            int ra = k * (arows + brows), rb = ra + arows;
            for (int m = 1; m <= N; ++m) {
                out(ra + 2 * (m - 1)) = laurent_mode(ha, m).real();
                out(ra + 2 * (m - 1) + 1) = laurent_mode(ha, m).imag();
            }
            out(rb) = laurent_mode(hb, 0).real();
            for (int m = 1; m <= N + 1; ++m) {
                out(rb + 1 + 2 * (m - 1)) = laurent_mode(hb, m).real();
                out(rb + 1 + 2 * (m - 1) + 1) = laurent_mode(hb, m).imag();
            }
        }
        return out;
    };
    auto set_coord = [&](HollowState& u, int col, double v) {
        if (col < nu_off) {
            int k = col / (2 * N), r = col % (2 * N);
            cplx& c = u.mu[k].coeffs[r / 2];
            c += (r % 2 == 0) ? cplx(v, 0) : cplx(0, v);
        } else if (col < q_off) {
            int cc = col - nu_off;
            int k = cc / (2 * N), r = cc % (2 * N);
            cplx& c = u.nu[k].coeffs[r / 2];
            c += (r % 2 == 0) ? cplx(v, 0) : cplx(0, v);
        } else if (col < l_off) {
            u.Q[col - q_off] += v;
        } else {
            u.lambda[col - l_off] += v;
        }
    };
    double h = 1e-6;
    for (int col = 0; col < ncols; ++col) {
        HollowState up = u0, um = u0;
        set_coord(up, col, h);
        set_coord(um, col, -h);
        Eigen::VectorXd fd = (apply(up) - apply(um)) / (2.0 * h);
        Eigen::VectorXd an = Jan.col(col);
        CHECK((fd - an).lpNorm<Eigen::Infinity>() < 1e-6);
    }
}

TEST_CASE("row-reduced operator: Qdot column is the constant -1") {
    Scenario sc = Scenario::stationary_tripole();
    auto split = ParameterSplit::from_names({"gamma1", "re_zeta3", "im_zeta3"}, 3);
    LinearizedTrivial lin = linearized_trivial(sc.base, split);
    int N = 6;
    Eigen::MatrixXd L = lin.assemble_L(N);
    int rows_per = 1 + 2 * (N + 1);
    int mu_cols = 2 * N, M = 3;
    for (int k = 0; k < M; ++k) {
        Eigen::VectorXd col = L.col(M * mu_cols + k);
        // mode-0 row of vortex k is -1; everything else 0
        for (int r = 0; r < L.rows(); ++r) CHECK(col(r) == (r == k * rows_per ? -1.0 : 0.0));
    }
}

TEST_CASE("assembled flow: trivial state gives f = id and w' = w0'") {
    Scenario sc = Scenario::rotating_pair();
    HollowState u = leading_guess(sc, 0.0, 8);
    FlowFields F(u);
    for (cplx z : {cplx(0.5, 0.7), cplx(-2, 1)}) {
        CHECK(std::abs(F.f(z) - z) == 0.0);
        CHECK(std::abs(F.f_zeta(z) - 1.0) == 0.0);
        CHECK(std::abs(F.w_zeta(z) - w0_zeta(u.config(), z)) == 0.0);
    }
}

TEST_CASE("assembled flow: leading guess has |f' - 1| = O(rho^2) and far-field decay") {
    Scenario sc = Scenario::rotating_pair();
    double rho = 0.02;
    HollowState u = leading_guess(sc, rho, 16);
    FlowFields F(u);
    for (int k = 0; k < 2; ++k)
        for (const cplx& fp : F.fp_trace(k)) CHECK(std::abs(fp - 1.0) < 10.0 * rho * rho);
    // f(zeta) - zeta = O(1/zeta) far out
    double far = std::abs(F.f(cplx(50, 0)) - cplx(50, 0));
    double farther = std::abs(F.f(cplx(100, 0)) - cplx(100, 0));
    CHECK(farther < far);
    CHECK(far < 1e-5);
}

TEST_CASE("HollowState JSON round trip") {
    std::mt19937 rng(27);
    HollowState u = random_state(rng, SteadyKind::translating, 6, 0.03, 0.02, false);
    nlohmann::json j;
    to_json(j, u);
    HollowState back;
    from_json(j, back);
    CHECK(back.rho == u.rho);
    CHECK(back.Q == u.Q);
    CHECK(back.lambda == u.lambda);
    for (int k = 0; k < u.M(); ++k)
        for (int m = 1; m <= u.N(); ++m) {
            CHECK(back.mu[k][m] == u.mu[k][m]);
            CHECK(back.nu[k][m] == u.nu[k][m]);
        }
}

TEST_CASE("residual classes close on the scenario symmetry subspaces") {
    // coupled symmetric (non-solution) states: A_1 lands in ir / B_1 in rr for the
    // rotating pair, A_1 in ii / B_1 in ri for the translating pair
    std::mt19937 rng(28);
    int N = 16;
    {
        Scenario sc = Scenario::rotating_pair();
        HollowState u = leading_guess(sc, 0.05, N);
        u.mu[0] = symmetry_project(SymmetryClass::rr, random_density(rng, N, 0.05));
        u.nu[0] = symmetry_project(SymmetryClass::ir, random_density(rng, N, 0.05));
        for (int m = 1; m <= N; ++m) {
            double sgn = (m % 2 == 0) ? -1.0 : 1.0;
            u.mu[1][m] = sgn * std::conj(u.mu[0][m]);
            u.nu[1][m] = sgn * std::conj(u.nu[0][m]);
        }
        u.Q = {0.01, 0.01};
        Residual res = full_residual(u);
        GridFunction ga(default_Nq(N)), gb(default_Nq(N));
        for (int i = 0; i < ga.Nq(); ++i) {
            ga.values[i] = res.A[0][i];
            gb.values[i] = res.B[0][i];
        }
        auto ha = grid_to_laurent(ga);
        auto hb = grid_to_laurent(gb);
        for (int m = 1; m <= N; ++m) {
            CHECK(std::abs(laurent_mode(ha, m).real()) < 1e-12);  // A_1 in ir
            CHECK(std::abs(laurent_mode(hb, m).imag()) < 1e-12);  // B_1 in rr
        }
    }
    {
        Scenario sc = Scenario::translating_pair();
        HollowState u = leading_guess(sc, 0.05, N);
        u.mu[0] = symmetry_project(SymmetryClass::ii, random_density(rng, N, 0.05));
        u.nu[0] = symmetry_project(SymmetryClass::ii, random_density(rng, N, 0.05));
        for (int m = 1; m <= N; ++m) {
            u.mu[1][m] = std::conj(u.mu[0][m]);
            u.nu[1][m] = std::conj(u.nu[0][m]);
        }
        u.Q = {0.01, 0.01};
        Residual res = full_residual(u);
        GridFunction ga(default_Nq(N)), gb(default_Nq(N));
        for (int i = 0; i < ga.Nq(); ++i) {
            ga.values[i] = res.A[0][i];
            gb.values[i] = res.B[0][i];
        }
        auto ha = grid_to_laurent(ga);
        auto hb = grid_to_laurent(gb);
        for (int m = 1; m <= N; ++m) {
            bool odd = (m % 2 == 1);
            // ii: odd modes real, even imaginary; ri: odd imaginary, even real
            CHECK(std::abs(odd ? laurent_mode(ha, m).imag() : laurent_mode(ha, m).real()) <
                  1e-12);
            CHECK(std::abs(odd ? laurent_mode(hb, m).real() : laurent_mode(hb, m).imag()) <
                  1e-12);
        }
    }
}
