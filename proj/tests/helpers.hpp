#ifndef VORTEXFORGE_TEST_HELPERS_HPP
#define VORTEXFORGE_TEST_HELPERS_HPP

#include <random>

#include "vortexforge/desingularize.hpp"

namespace vftest {

using namespace vf;

inline SpectralDensity random_density(std::mt19937& rng, int N, double scale) {
    std::normal_distribution<double> g;
    SpectralDensity d(N);
    for (int m = 1; m <= N; ++m) d[m] = scale * std::exp(-0.25 * m) * cplx(g(rng), g(rng));
    return d;
}

// random state in O near a (possibly perturbed) configuration of the given class
inline HollowState random_state(std::mt19937& rng, SteadyKind kind, int N, double rho,
                                double amp, bool perturb_lambda = true) {
    std::normal_distribution<double> g;
    Scenario sc = (kind == SteadyKind::rotating)      ? Scenario::rotating_pair()
                  : (kind == SteadyKind::translating) ? Scenario::translating_pair()
                                                      : Scenario::stationary_tripole();
    HollowState u;
    u.base = sc.base;
    if (perturb_lambda) {
        for (auto& z : u.base.centers) z += 0.05 * cplx(g(rng), g(rng));
        for (auto& gm : u.base.gammas) gm += 0.05 * g(rng);
    }
    u.split = sc.split;
    for (int i : sc.split.varying) u.lambda.push_back(u.base.coord(i));
    int M = u.base.size();
    for (int k = 0; k < M; ++k) {
        u.mu.push_back(random_density(rng, N, amp));
        u.nu.push_back(random_density(rng, N, amp));
        u.Q.push_back(amp * g(rng));
    }
    u.rho = rho;
    return u;
}

inline double residual_inf(const Residual& r) {
    double s = 0;
    for (const auto& v : r.A)
        for (double x : v) s = std::max(s, std::abs(x));
    for (const auto& v : r.B)
        for (double x : v) s = std::max(s, std::abs(x));
    return s;
}

}  // namespace vftest

#endif
