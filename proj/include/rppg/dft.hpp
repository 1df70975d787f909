#pragma once

#include <fftw3.h>

#include <complex>
#include <mutex>
#include <vector>

namespace rppg::dft {

inline std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

/// In-place complex DFT (FFTW, any length). sign = FFTW_FORWARD or
/// FFTW_BACKWARD; the backward transform is unnormalized.
inline void transform(std::vector<std::complex<double>>& x, int sign) {
    const int n = static_cast<int>(x.size());
    if (n == 0) return;
    fftw_complex* buf = reinterpret_cast<fftw_complex*>(x.data());
    fftw_plan plan;
    {
        // FFTW's planner is not thread-safe; execution is.
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan = fftw_plan_dft_1d(n, buf, buf, sign, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
}

inline void forward(std::vector<std::complex<double>>& x) {
    transform(x, FFTW_FORWARD);
}

/// Normalized inverse: forward followed by inverse returns the input.
inline void inverse(std::vector<std::complex<double>>& x) {
    transform(x, FFTW_BACKWARD);
    const double inv = 1.0 / static_cast<double>(x.size());
    for (auto& v : x) v *= inv;
}

} // namespace rppg::dft
