#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "rppg/dft.hpp"

namespace rppg::sigproc {

/// Uniformly sampled 1-D trace (PPG waveforms, labels, noise).
struct Signal {
    std::vector<double> samples;
    double fs = 0.0; // Hz

    std::size_t size() const { return samples.size(); }
    double duration() const {
        return static_cast<double>(samples.size() - 1) / fs;
    }

    void check(const char* who) const {
        if (fs <= 0.0) throw std::invalid_argument(std::string(who) + ": fs <= 0");
        if (samples.size() < 2)
            throw std::invalid_argument(std::string(who) + ": need >= 2 samples");
        for (double v : samples)
            if (!std::isfinite(v))
                throw std::invalid_argument(std::string(who) +
                                            ": non-finite sample");
    }
};

constexpr double kRateLoBpm = 40.0;
constexpr double kRateHiBpm = 240.0;
constexpr std::size_t kRateWindow = 256;
constexpr std::size_t kRateFftSize = 2048;

/// Sliding-window pulse-rate estimates in bpm (window 256, hop 1).
struct RateTrace {
    std::vector<double> rates;      // bpm, clamped to [40, 240]
    std::vector<double> confidence; // peak / median in-band magnitude
    double fs = 0.0;
    std::size_t window_len = kRateWindow;
    std::size_t start_offset = 0;
};

inline double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

/// Zero-phase brickwall bandpass: zero every DFT bin whose frequency lies
/// outside [lo, hi] (and the mirrored negative band), including DC.
inline Signal bandpass(const Signal& x, double lo = 0.7, double hi = 3.0) {
    x.check("bandpass");
    if (lo >= hi) throw std::invalid_argument("bandpass: lo >= hi");
    if (hi >= x.fs / 2.0)
        throw std::invalid_argument("bandpass: high cut-off must be below "
                                    "Nyquist");
    const std::size_t n = x.size();
    std::vector<std::complex<double>> spec(n);
    for (std::size_t i = 0; i < n; ++i) spec[i] = x.samples[i];
    dft::forward(spec);
    for (std::size_t k = 0; k < n; ++k) {
        const double f = static_cast<double>(std::min(k, n - k)) * x.fs /
                         static_cast<double>(n);
        if (f < lo || f > hi) spec[k] = 0.0;
    }
    dft::inverse(spec);
    Signal out{std::vector<double>(n), x.fs};
    for (std::size_t i = 0; i < n; ++i) out.samples[i] = spec[i].real();
    return out;
}

/// Shifts the phase of every frequency component by phi_degrees using the
/// analytic signal: out = Re{ a(t) * exp(-i*phi) }. The mean is removed.
inline Signal hilbert_phase_shift(const Signal& x, double phi_degrees) {
    x.check("hilbert_phase_shift");
    const std::size_t n = x.size();
    const double m = mean(x.samples);
    std::vector<std::complex<double>> spec(n);
    for (std::size_t i = 0; i < n; ++i) spec[i] = x.samples[i] - m;
    dft::forward(spec);
    // Analytic signal: zero negative frequencies, double positives.
    for (std::size_t k = 1; k < n; ++k) {
        if (2 * k < n)
            spec[k] *= 2.0;
        else if (2 * k > n)
            spec[k] = 0.0;
        // k == n/2 (even n): kept as-is
    }
    spec[0] = 0.0;
    dft::inverse(spec);
    const double phi = phi_degrees * M_PI / 180.0;
    const std::complex<double> rot = std::exp(std::complex<double>(0.0, -phi));
    Signal out{std::vector<double>(n), x.fs};
    if (phi_degrees == 0.0) {
        out.samples = x.samples; // exact identity
        return out;
    }
    for (std::size_t i = 0; i < n; ++i)
        out.samples[i] = (spec[i] * rot).real();
    return out;
}

/// First difference; output has length len-1 at the same sampling rate.
inline Signal differentiate(const Signal& x) {
    x.check("differentiate");
    Signal out{std::vector<double>(x.size() - 1), x.fs};
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        out.samples[i] = x.samples[i + 1] - x.samples[i];
    return out;
}

/// Zero mean, unit variance. A constant signal maps to all zeros.
inline Signal zscore(const Signal& x) {
    x.check("zscore");
    const double m = mean(x.samples);
    double var = 0.0;
    for (double v : x.samples) var += (v - m) * (v - m);
    var /= static_cast<double>(x.size());
    Signal out{std::vector<double>(x.size()), x.fs};
    if (var == 0.0) return out;
    const double inv = 1.0 / std::sqrt(var);
    for (std::size_t i = 0; i < x.size(); ++i)
        out.samples[i] = (x.samples[i] - m) * inv;
    return out;
}

/// Linear interpolation onto a uniform fs_out grid spanning the same time
/// interval.
inline Signal resample_linear(const Signal& x, double fs_out) {
    x.check("resample_linear");
    if (fs_out <= 0.0)
        throw std::invalid_argument("resample_linear: fs_out <= 0");
    if (fs_out == x.fs) return x;
    const double span = x.duration();
    const std::size_t n_out =
        static_cast<std::size_t>(std::floor(span * fs_out + 1e-9)) + 1;
    Signal out{std::vector<double>(n_out), fs_out};
    for (std::size_t i = 0; i < n_out; ++i) {
        const double t = static_cast<double>(i) / fs_out;
        double pos = t * x.fs;
        if (pos > static_cast<double>(x.size() - 1))
            pos = static_cast<double>(x.size() - 1);
        const std::size_t i0 = static_cast<std::size_t>(pos);
        const std::size_t i1 = std::min(i0 + 1, x.size() - 1);
        const double frac = pos - static_cast<double>(i0);
        out.samples[i] =
            (1.0 - frac) * x.samples[i0] + frac * x.samples[i1];
    }
    return out;
}

namespace detail {

/// Spectral peak of one 256-sample window: mean removal, Hann taper,
/// zero-pad to 2048, argmax of the magnitude spectrum restricted to
/// [40, 240] bpm, parabolic interpolation around the peak bin.
inline void window_rate(const double* w, double fs, double& rate_bpm,
                        double& confidence) {
    std::vector<std::complex<double>> buf(kRateFftSize, 0.0);
    double m = 0.0;
    for (std::size_t i = 0; i < kRateWindow; ++i) m += w[i];
    m /= static_cast<double>(kRateWindow);
    for (std::size_t i = 0; i < kRateWindow; ++i) {
        const double hann =
            0.5 * (1.0 - std::cos(2.0 * M_PI * static_cast<double>(i) /
                                  static_cast<double>(kRateWindow - 1)));
        buf[i] = (w[i] - m) * hann;
    }
    dft::forward(buf);

    const double bin_hz = fs / static_cast<double>(kRateFftSize);
    const std::size_t k_lo = static_cast<std::size_t>(
        std::ceil(kRateLoBpm / 60.0 / bin_hz));
    const std::size_t k_hi = std::min(
        kRateFftSize / 2,
        static_cast<std::size_t>(std::floor(kRateHiBpm / 60.0 / bin_hz)));

    std::size_t k_peak = k_lo;
    std::vector<double> mags;
    mags.reserve(k_hi - k_lo + 1);
    for (std::size_t k = k_lo; k <= k_hi; ++k) {
        const double mag = std::abs(buf[k]);
        mags.push_back(mag);
        if (mag > std::abs(buf[k_peak])) k_peak = k;
    }

    double delta = 0.0;
    if (k_peak > k_lo && k_peak < k_hi) {
        const double a = std::abs(buf[k_peak - 1]);
        const double b = std::abs(buf[k_peak]);
        const double c = std::abs(buf[k_peak + 1]);
        const double denom = a - 2.0 * b + c;
        if (denom != 0.0) delta = 0.5 * (a - c) / denom;
        delta = std::clamp(delta, -0.5, 0.5);
    }
    rate_bpm = std::clamp((static_cast<double>(k_peak) + delta) * bin_hz * 60.0,
                          kRateLoBpm, kRateHiBpm);

    std::nth_element(mags.begin(), mags.begin() + mags.size() / 2, mags.end());
    const double med = mags[mags.size() / 2];
    confidence = med > 0.0 ? std::abs(buf[k_peak]) / med : 0.0;
}

} // namespace detail

inline RateTrace rate_trace(const Signal& x) {
    x.check("rate_trace");
    if (x.size() < kRateWindow)
        throw std::invalid_argument(
            "rate_trace: signal shorter than the 256-sample window");
    RateTrace out;
    out.fs = x.fs;
    const std::size_t n_win = x.size() - kRateWindow + 1;
    out.rates.resize(n_win);
    out.confidence.resize(n_win);
    for (std::size_t i = 0; i < n_win; ++i)
        detail::window_rate(x.samples.data() + i, x.fs, out.rates[i],
                            out.confidence[i]);
    return out;
}

inline void require_aligned(const RateTrace& a, const RateTrace& b,
                            const char* who) {
    if (a.rates.size() != b.rates.size() || a.start_offset != b.start_offset)
        throw std::invalid_argument(std::string(who) +
                                    ": rate traces not aligned (" +
                                    std::to_string(a.rates.size()) + " vs " +
                                    std::to_string(b.rates.size()) + ")");
}

inline double rmse(const RateTrace& a, const RateTrace& b) {
    require_aligned(a, b, "rmse");
    double s = 0.0;
    for (std::size_t i = 0; i < a.rates.size(); ++i) {
        const double d = a.rates[i] - b.rates[i];
        s += d * d;
    }
    return std::sqrt(s / static_cast<double>(a.rates.size()));
}

/// Percentage of windows with |a - b| strictly below the threshold.
inline double accuracy(const RateTrace& a, const RateTrace& b,
                       double threshold_bpm = 3.0) {
    require_aligned(a, b, "accuracy");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < a.rates.size(); ++i)
        if (std::abs(a.rates[i] - b.rates[i]) < threshold_bpm) ++hits;
    return 100.0 * static_cast<double>(hits) /
           static_cast<double>(a.rates.size());
}

} // namespace rppg::sigproc
