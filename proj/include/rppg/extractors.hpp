#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "rppg/frames.hpp"
#include "rppg/sigproc.hpp"

namespace rppg::extract {

using frames::RgbTrace;
using sigproc::Signal;

enum class Method { POS, CHROM, GREEN };

inline Method method_from_string(const std::string& s) {
    if (s == "pos") return Method::POS;
    if (s == "chrom") return Method::CHROM;
    if (s == "green") return Method::GREEN;
    throw std::invalid_argument("unknown extractor method: " + s);
}

struct ExtractorParams {
    double window_seconds = 1.6;
    Method method = Method::POS;
};

namespace detail {

inline void check_trace(const RgbTrace& t, std::size_t window,
                        const char* who) {
    t.r.check(who);
    if (t.g.size() != t.r.size() || t.b.size() != t.r.size() ||
        t.g.fs != t.r.fs || t.b.fs != t.r.fs)
        throw std::invalid_argument(std::string(who) +
                                    ": channel traces not aligned");
    if (t.r.size() < window)
        throw std::invalid_argument(std::string(who) +
                                    ": trace shorter than the sliding window");
}

inline double window_mean(const std::vector<double>& v, std::size_t off,
                          std::size_t len) {
    double s = 0.0;
    for (std::size_t i = 0; i < len; ++i) s += v[off + i];
    return s / static_cast<double>(len);
}

inline double stddev(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size()));
}

/// Blood absorption darkens the skin, so a pulse signal should
/// anti-correlate with the raw G trace; flip the sign if it does not.
inline void fix_sign(std::vector<double>& out, const Signal& g) {
    const double gm = sigproc::mean(g.samples);
    const double om =
        sigproc::mean(out) * 0.0; // overlap-added windows are zero-mean
    double corr = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i)
        corr += (out[i] - om) * (g.samples[i] - gm);
    if (corr > 0.0)
        for (double& x : out) x = -x;
}

/// Shared sliding-window overlap-add skeleton for the two projection
/// extractors. `combine` maps mean-normalized channel windows to h.
template <typename Combine>
Signal windowed_extract(const RgbTrace& trace, const ExtractorParams& params,
                        Combine combine) {
    const double fs = trace.r.fs;
    const std::size_t win =
        static_cast<std::size_t>(std::lround(params.window_seconds * fs));
    if (win < 8)
        throw std::invalid_argument(
            "extractor: window_seconds * fps must be >= 8 samples");
    detail::check_trace(trace, win, "extractor");

    const std::size_t n = trace.r.size();
    std::vector<double> out(n, 0.0);
    std::vector<double> rn(win), gn(win), bn(win), h(win);
    for (std::size_t start = 0; start + win <= n; ++start) {
        const double rm = window_mean(trace.r.samples, start, win);
        const double gm = window_mean(trace.g.samples, start, win);
        const double bm = window_mean(trace.b.samples, start, win);
        if (rm <= 0.0 || gm <= 0.0 || bm <= 0.0)
            throw std::invalid_argument(
                "extractor: non-positive channel mean in window " +
                std::to_string(start));
        for (std::size_t i = 0; i < win; ++i) {
            rn[i] = trace.r.samples[start + i] / rm;
            gn[i] = trace.g.samples[start + i] / gm;
            bn[i] = trace.b.samples[start + i] / bm;
        }
        combine(rn, gn, bn, h);
        const double hm = window_mean(h, 0, win);
        for (std::size_t i = 0; i < win; ++i) out[start + i] += h[i] - hm;
    }
    // Pure intensity modulation leaves only rounding dust on the projected
    // axes; report exact rejection instead of z-scoring noise to unit power.
    if (stddev(out) < 1e-9) return Signal{std::vector<double>(n, 0.0), fs};
    fix_sign(out, trace.g);
    return sigproc::zscore(Signal{std::move(out), fs});
}

} // namespace detail

/// Plane-orthogonal-to-skin extraction: project mean-normalized channels
/// onto the two axes orthogonal to [1,1,1] and alpha-combine them.
inline Signal pos_extract(const RgbTrace& trace, const ExtractorParams& params = {}) {
    return detail::windowed_extract(
        trace, params,
        [](const std::vector<double>& rn, const std::vector<double>& gn,
           const std::vector<double>& bn, std::vector<double>& h) {
            const std::size_t win = rn.size();
            std::vector<double> s1(win), s2(win);
            for (std::size_t i = 0; i < win; ++i) {
                s1[i] = gn[i] - bn[i];
                s2[i] = -2.0 * rn[i] + gn[i] + bn[i];
            }
            const double sd1 = detail::stddev(s1);
            const double sd2 = detail::stddev(s2);
            const double alpha = sd2 > 0.0 ? sd1 / sd2 : 0.0;
            for (std::size_t i = 0; i < win; ++i)
                h[i] = s1[i] + alpha * s2[i];
        });
}

/// Chrominance extraction: X = 3Rn - 2Gn, Y = 1.5Rn + Gn - 1.5Bn,
/// h = X - alpha * Y with alpha = sd(X)/sd(Y).
inline Signal chrom_extract(const RgbTrace& trace, const ExtractorParams& params = {}) {
    return detail::windowed_extract(
        trace, params,
        [](const std::vector<double>& rn, const std::vector<double>& gn,
           const std::vector<double>& bn, std::vector<double>& h) {
            const std::size_t win = rn.size();
            std::vector<double> xs(win), ys(win);
            for (std::size_t i = 0; i < win; ++i) {
                xs[i] = 3.0 * rn[i] - 2.0 * gn[i];
                ys[i] = 1.5 * rn[i] + gn[i] - 1.5 * bn[i];
            }
            const double sdx = detail::stddev(xs);
            const double sdy = detail::stddev(ys);
            const double alpha = sdy > 0.0 ? sdx / sdy : 0.0;
            for (std::size_t i = 0; i < win; ++i) h[i] = xs[i] - alpha * ys[i];
        });
}

/// Baseline: mean-normalized G channel, mean-subtracted and z-scored.
inline Signal green_extract(const RgbTrace& trace) {
    trace.g.check("green_extract");
    const double gm = sigproc::mean(trace.g.samples);
    if (gm <= 0.0)
        throw std::invalid_argument("green_extract: non-positive mean");
    std::vector<double> out(trace.g.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = trace.g.samples[i] / gm - 1.0;
    detail::fix_sign(out, trace.g);
    return sigproc::zscore(Signal{std::move(out), trace.g.fs});
}

inline Signal run_extractor(const RgbTrace& trace, const ExtractorParams& params) {
    switch (params.method) {
        case Method::POS: return pos_extract(trace, params);
        case Method::CHROM: return chrom_extract(trace, params);
        case Method::GREEN: return green_extract(trace);
    }
    throw std::logic_error("run_extractor: bad method");
}

/// Builds a training label from a video: spatial means -> extractor ->
/// bandpass 0.7-3 Hz -> first difference -> z-score. The result has length
/// T-1 and aligns with the normalized difference frames.
inline Signal make_reference_label(const frames::FrameSequence& video,
                                   const ExtractorParams& params,
                                   bool bandpass_label = true) {
    frames::FrameSequence roi = video;
    Signal raw = run_extractor(frames::spatial_mean(roi), params);
    if (bandpass_label) raw = sigproc::bandpass(raw, 0.7, 3.0);
    return sigproc::zscore(sigproc::differentiate(raw));
}

inline Signal make_reference_label(const frames::FrameSequence& video,
                                   const ExtractorParams& params,
                                   const frames::RoiBox& roi,
                                   bool bandpass_label = true) {
    return make_reference_label(frames::crop(video, roi), params,
                                bandpass_label);
}

} // namespace rppg::extract
