#include "vortexforge/common.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstdlib>
#include <map>
#include <mutex>
#include <thread>

namespace vf {

int max_threads() {
    static const int cap = [] {
        int hw = static_cast<int>(std::thread::hardware_concurrency());
        if (hw <= 0) hw = 1;
        if (const char* env = std::getenv("VORTEXFORGE_THREADS")) {
            int v = std::atoi(env);
            if (v >= 1) hw = std::min(hw, v);
        }
        return hw;
    }();
    return cap;
}

void parallel_for(int n, const std::function<void(int)>& fn) {
    int nt = std::min(max_threads(), n);
    if (nt <= 1 || n < 4) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nt);
    std::exception_ptr err;
    std::mutex err_mtx;
    for (int t = 0; t < nt; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (int i = t; i < n; i += nt) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(err_mtx);
                if (!err) err = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

namespace {

// Plan creation is not thread-safe; execution on caller buffers is.
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

fftw_plan get_plan(int n, bool inverse) {
    static std::map<std::pair<int, bool>, fftw_plan> cache;
    std::lock_guard<std::mutex> lk(plan_mutex());
    auto key = std::make_pair(n, inverse);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    std::vector<cplx> tmp(n);
    fftw_plan p = fftw_plan_dft_1d(
        n, reinterpret_cast<fftw_complex*>(tmp.data()), reinterpret_cast<fftw_complex*>(tmp.data()),
        inverse ? FFTW_BACKWARD : FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache.emplace(key, p);
    return p;
}

}  // namespace

void dft(const cplx* in, cplx* out, int n, bool inverse) {
    fftw_plan p = get_plan(n, inverse);
    // new-array execute; in-place safe since FFTW copies via buffer for n this small
    std::vector<cplx> tmp(in, in + n);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(tmp.data()),
                     reinterpret_cast<fftw_complex*>(out));
}

}  // namespace vf
