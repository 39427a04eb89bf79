#ifndef VORTEXFORGE_COMMON_HPP
#define VORTEXFORGE_COMMON_HPP

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace vf {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;
inline const cplx two_pi_i{0.0, 2.0 * pi};

// Error taxonomy. CLI exit codes: input 2, convergence 3, domain 4, internal 5.
struct input_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct domain_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct geometry_error : domain_error {
    using domain_error::domain_error;
};

struct unphysical_error : domain_error {
    using domain_error::domain_error;
};

struct convergence_error : std::runtime_error {
    double last_residual;
    int iterations;
    convergence_error(const std::string& msg, double resid, int iters)
        : std::runtime_error(msg), last_residual(resid), iterations(iters) {}
};

struct degeneracy_error : convergence_error {
    using convergence_error::convergence_error;
};

struct internal_error : std::logic_error {
    using std::logic_error::logic_error;
};

// Thread cap from VORTEXFORGE_THREADS (defaults to hardware concurrency).
int max_threads();

// Runs fn(i) for i in [0, n); parallel when worthwhile. fn must be pure w.r.t. shared state.
void parallel_for(int n, const std::function<void(int)>& fn);

// Cached-plan complex DFT, forward = sum x_j e^{-2pi i jk/n} (FFTW convention).
void dft(const cplx* in, cplx* out, int n, bool inverse);

}  // namespace vf

#endif
