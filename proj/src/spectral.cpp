#include "vortexforge/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

namespace vf {

double SpectralDensity::norm_inf() const {
    double m = 0;
    for (const cplx& c : coeffs) m = std::max(m, std::abs(c));
    return m;
}

std::vector<cplx> grid_nodes(int Nq) {
    std::vector<cplx> tau(Nq);
    for (int j = 0; j < Nq; ++j) tau[j] = std::polar(1.0, 2.0 * pi * j / Nq);
    return tau;
}

GridFunction to_grid(const SpectralDensity& d, int Nq, int deriv_order) {
    int N = d.N();
    if (Nq < 2 * N + 1) throw domain_error("to_grid: Nq too small, aliasing");
    // assemble Laurent coefficients in FFT layout and inverse-transform
    std::vector<cplx> hat(Nq, cplx(0.0));
    for (int m = 1; m <= N; ++m) {
        cplx cp = d[m], cm = std::conj(d[m]);
        int p = m, q = m;  // exponents of the +m and -m terms after differentiation
        double fp = 1.0, fm = 1.0;
        if (deriv_order >= 1) {
            fp *= m;
            fm *= -m;
            p = m - 1;
            q = m + 1;
        }
        if (deriv_order == 2) {
            fp *= m - 1;
            fm *= -(m + 1);
            p = m - 2;
            q = m + 2;
        }
        if (deriv_order > 2) throw internal_error("to_grid: deriv_order > 2");
        // tau^p term
        hat[((p % Nq) + Nq) % Nq] += fp * cp;
        hat[((-q % Nq) + Nq) % Nq] += fm * cm;
    }
    GridFunction g(Nq);
    dft(hat.data(), g.values.data(), Nq, true);  // values_j = sum hat_m tau_j^m
    return g;
}

SpectralDensity to_coeffs(const GridFunction& g, int N) {
    int Nq = g.Nq();
    if (Nq < 2 * N + 1) throw domain_error("to_coeffs: Nq too small for N modes");
    std::vector<cplx> hat(Nq);
    dft(g.values.data(), hat.data(), Nq, false);
    SpectralDensity d(N);
    for (int m = 1; m <= N; ++m) d[m] = hat[m] / double(Nq);
    return d;
}

std::vector<cplx> grid_to_laurent(const GridFunction& g) {
    std::vector<cplx> hat(g.Nq());
    dft(g.values.data(), hat.data(), g.Nq(), false);
    for (cplx& h : hat) h /= double(g.Nq());
    return hat;
}

cplx laurent_mode(const std::vector<cplx>& hat, int m) {
    int Nq = static_cast<int>(hat.size());
    if (std::abs(m) >= Nq / 2) throw internal_error("laurent_mode out of resolved range");
    return hat[((m % Nq) + Nq) % Nq];
}

GridFunction cauchy(const SpectralDensity& d, int Nq) {
    return cauchy_deriv(d, Nq, 0);
}

GridFunction cauchy_deriv(const SpectralDensity& d, int Nq, int deriv_order) {
    int N = d.N();
    if (Nq < 2 * N + 2 * deriv_order + 1) throw domain_error("cauchy: Nq too small");
    // C keeps only the negative Laurent modes of the (differentiated) density, negated:
    //   order 0: -conj(c_m) tau^{-m}
    //   order 1: +m conj(c_m) tau^{-m-1}
    //   order 2: -m(m+1) conj(c_m) tau^{-m-2}
    std::vector<cplx> hat(Nq, cplx(0.0));
    for (int m = 1; m <= N; ++m) {
        cplx cm = std::conj(d[m]);
        if (deriv_order == 0)
            hat[((-m % Nq) + Nq) % Nq] += -cm;
        else if (deriv_order == 1)
            hat[((-(m + 1) % Nq) + Nq) % Nq] += double(m) * cm;
        else if (deriv_order == 2)
            hat[((-(m + 2) % Nq) + Nq) % Nq] += -double(m) * double(m + 1) * cm;
        else
            throw internal_error("cauchy_deriv: deriv_order > 2");
    }
    GridFunction g(Nq);
    dft(hat.data(), g.values.data(), Nq, true);
    return g;
}

SpectralDensity apply_multiplier(MultiplierKind kind, const SpectralDensity& d) {
    int N = d.N();
    if (kind == MultiplierKind::Re_tauC_dtau) {
        SpectralDensity out(N);
        for (int m = 1; m <= N; ++m) out[m] = 0.5 * m * d[m];
        return out;
    }
    if (kind == MultiplierKind::Re_itauC_dtau) {
        SpectralDensity out(N);
        for (int m = 1; m <= N; ++m) out[m] = -0.5 * cplx(0, 1) * double(m) * d[m];
        return out;
    }
    // Re(C phi'): mode m shifts to m+1 with weight m/2
    SpectralDensity out(N + 1);
    for (int m = 1; m <= N; ++m) out[m + 1] = 0.5 * m * d[m];
    return out;
}

SpectralDensity invert_multiplier(MultiplierKind kind, const SpectralDensity& target) {
    if (kind != MultiplierKind::Re_tauC_dtau)
        throw domain_error("invert_multiplier: only Re_tauC_dtau is invertible on mean-zero");
    SpectralDensity out(target.N());
    for (int m = 1; m <= target.N(); ++m) out[m] = 2.0 / m * target[m];
    return out;
}

SpectralDensity project(ProjectRange range, int m, const SpectralDensity& d) {
    SpectralDensity out(d.N());
    for (int k = 1; k <= d.N(); ++k) {
        bool keep = (range == ProjectRange::P_m)      ? (k == m)
                    : (range == ProjectRange::P_le_m) ? (k <= m)
                                                      : (k > m);
        if (keep) out[k] = d[k];
    }
    return out;
}

bool pair_admissible(double rho, const VortexConfiguration& cfg) {
    if (cfg.size() == 1) return true;
    return cfg.min_gap() > 2.0 * std::abs(rho);
}

void require_admissible(double rho, const VortexConfiguration& cfg) {
    if (!pair_admissible(rho, cfg))
        throw domain_error("(rho, Lambda) outside the admissible set: min gap <= 2|rho|");
}

GridFunction trace_Z(double rho, const VortexConfiguration& cfg, const DensityVector& dens,
                     int k, int Nq, int deriv_order) {
    cfg.validate();
    require_admissible(rho, cfg);
    int M = cfg.size();
    if (static_cast<int>(dens.size()) != M) throw domain_error("density count != M");
    int N = 0;
    for (const auto& d : dens) N = std::max(N, d.N());
    if (Nq == 0) Nq = default_Nq(std::max(N, 1));
    GridFunction out = cauchy_deriv(dens[k], Nq, deriv_order);
    if (rho == 0.0 || M == 1) return out;
    auto tau = grid_nodes(Nq);
    for (int j = 0; j < M; ++j) {
        if (j == k) continue;
        GridFunction gj = to_grid(dens[j], Nq, deriv_order);
        cplx d0 = cfg.centers[j] - cfg.centers[k];
        for (int i = 0; i < Nq; ++i) {
            cplx acc = 0.0;
            for (int q = 0; q < Nq; ++q)
                acc += gj.values[q] * tau[q] / (rho * (tau[q] - tau[i]) + d0);
            out.values[i] += acc * rho / double(Nq);
        }
    }
    return out;
}

cplx field_Z(double rho, const VortexConfiguration& cfg, const DensityVector& dens, cplx zeta,
             int Nq, int deriv_order) {
    cfg.validate();
    require_admissible(rho, cfg);
    int M = cfg.size();
    int N = 0;
    for (const auto& d : dens) N = std::max(N, d.N());
    if (Nq == 0) Nq = default_Nq(std::max(N, 1));
    double ar = std::abs(rho);
    for (int k = 0; k < M; ++k)
        if (std::abs(zeta - cfg.centers[k]) < 1.05 * ar)
            throw domain_error("field_Z: evaluation within 0.05 rho of a boundary circle");
    auto tau = grid_nodes(Nq);
    cplx acc = 0.0;
    for (int k = 0; k < M; ++k) {
        GridFunction gk = to_grid(dens[k], Nq, deriv_order);
        cplx dk = cfg.centers[k] - zeta;
        cplx s = 0.0;
        for (int q = 0; q < Nq; ++q) s += gk.values[q] * tau[q] / (rho * tau[q] + dk);
        acc += s * rho / double(Nq);
    }
    return acc;
}

cplx field_Z_series(double rho, const VortexConfiguration& cfg, const DensityVector& dens,
                    cplx zeta, int deriv_order) {
    // Multipole moments of the differentiated density: with m_{k,n} the tau^{-1-n}
    // Laurent coefficient of g_k,
    //   Z[g](zeta) = -sum_k sum_{n>=0} m_{k,n} (rho/(zeta-zeta_k))^{n+1}.
    // Exact for band-limited densities, valid on all of D_rho.
    cplx acc = 0.0;
    for (int k = 0; k < cfg.size(); ++k) {
        const auto& d = dens[k];
        cplx r_over = rho / (zeta - cfg.centers[k]);
        if (deriv_order == 0) {
            cplx p = r_over;  // (rho/dz)^{n+1}, m_{k,n} = conj(c_{n+1})
            for (int n = 0; n < d.N(); ++n) {
                acc += -std::conj(d[n + 1]) * p;
                p *= r_over;
            }
        } else if (deriv_order == 1) {
            cplx p = r_over * r_over;  // m_{k,n} = -n conj(c_n), n >= 1
            for (int n = 1; n <= d.N(); ++n) {
                acc += double(n) * std::conj(d[n]) * p;
                p *= r_over;
            }
        } else if (deriv_order == 2) {
            cplx p = r_over * r_over * r_over;  // m_{k,n} = n(n-1) conj(c_{n-1}), n >= 2
            for (int n = 2; n <= d.N() + 1; ++n) {
                acc += -double(n) * double(n - 1) * std::conj(d[n - 1]) * p;
                p *= r_over;
            }
        } else {
            throw internal_error("field_Z_series: deriv_order > 2");
        }
    }
    return acc;
}

SpectralDensity recover_density(const GridFunction& trace, int N) {
    // mu_m = -conj(hat(g)_{-m}) for m = 1..N, from mu = 2 Re(C g).
    auto hat = grid_to_laurent(trace);
    SpectralDensity d(N);
    for (int m = 1; m <= N; ++m) d[m] = -std::conj(laurent_mode(hat, -m));
    return d;
}

namespace {

// Projection of one coefficient onto the class constraint at mode m.
cplx project_mode(SymmetryClass cls, int m, cplx c) {
    auto real_part = [](cplx v) { return cplx(v.real(), 0.0); };
    auto imag_part = [](cplx v) { return cplx(0.0, v.imag()); };
    bool odd = (m % 2 != 0);
    switch (cls) {
        case SymmetryClass::rr: return real_part(c);
        case SymmetryClass::ir: return imag_part(c);
        case SymmetryClass::ii: return odd ? real_part(c) : imag_part(c);
        case SymmetryClass::ri: return odd ? imag_part(c) : real_part(c);
        case SymmetryClass::rr_ii: return odd ? real_part(c) : cplx(0.0);
        case SymmetryClass::rr_ri: return odd ? cplx(0.0) : real_part(c);
        case SymmetryClass::ir_ii: return odd ? cplx(0.0) : imag_part(c);
        case SymmetryClass::none: return c;
    }
    return c;
}

}  // namespace

std::string to_string(SymmetryClass s) {
    switch (s) {
        case SymmetryClass::rr: return "rr";
        case SymmetryClass::ir: return "ir";
        case SymmetryClass::ii: return "ii";
        case SymmetryClass::ri: return "ri";
        case SymmetryClass::rr_ii: return "rr_ii";
        case SymmetryClass::rr_ri: return "rr_ri";
        case SymmetryClass::ir_ii: return "ir_ii";
        default: return "none";
    }
}

SpectralDensity symmetry_project(SymmetryClass cls, const SpectralDensity& d) {
    SpectralDensity out(d.N());
    for (int m = 1; m <= d.N(); ++m) out[m] = project_mode(cls, m, d[m]);
    return out;
}

double symmetry_defect(SymmetryClass cls, const SpectralDensity& d) {
    double defect = 0.0;
    for (int m = 1; m <= d.N(); ++m)
        defect = std::max(defect, std::abs(d[m] - project_mode(cls, m, d[m])));
    return defect;
}

bool is_member(SymmetryClass cls, const SpectralDensity& d, double tol) {
    return symmetry_defect(cls, d) < tol;
}

void to_json(nlohmann::json& j, const SpectralDensity& d) {
    j = nlohmann::json::array();
    for (const cplx& c : d.coeffs) j.push_back({c.real(), c.imag()});
}

void from_json(const nlohmann::json& j, SpectralDensity& d) {
    d.coeffs.clear();
    for (const auto& p : j) d.coeffs.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
}

}  // namespace vf
