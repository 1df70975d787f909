#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <iostream>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rppg/frames.hpp"
#include "rppg/sigproc.hpp"

namespace rppg::synth {

using frames::FrameSequence;
using sigproc::Signal;

/// Parameters of one synthetic skin-video subject. The generated pulse has
/// the strongest relative amplitude in G, then B, then R.
struct SubjectSpec {
    std::uint64_t seed = 1;
    double duration_s = 60.0;
    double fps = 20.0;
    std::size_t frame_side = 64;
    double hr_start_bpm = 72.0;
    double hr_end_bpm = 72.0;
    std::vector<std::pair<int, double>> ppg_harmonics = {{1, 1.0}, {2, 0.3}};
    std::array<double, 3> skin_dc = {150.0, 110.0, 95.0}; // R, G, B counts
    double ac_strength = 0.02;                            // AC/DC for G
    std::array<double, 3> channel_ratio = {0.4, 1.0, 0.7}; // relative to G
    std::uint64_t spatial_texture_seed = 7;

    void validate() const {
        if (duration_s <= 0.0 || fps <= 0.0 || frame_side < 1)
            throw std::invalid_argument("SubjectSpec: bad geometry/timing");
        for (double hr : {hr_start_bpm, hr_end_bpm})
            if (hr < 40.0 || hr > 240.0)
                throw std::invalid_argument(
                    "SubjectSpec: heart rate outside [40, 240] bpm");
        if (ac_strength < 0.0 || ac_strength >= 0.2)
            throw std::invalid_argument("SubjectSpec: ac_strength in [0, 0.2)");
        if (channel_ratio[1] != 1.0 || channel_ratio[1] <= channel_ratio[2] ||
            channel_ratio[2] <= channel_ratio[0])
            throw std::invalid_argument(
                "SubjectSpec: channel ratios must satisfy G=1 > B > R");
        if (ppg_harmonics.empty())
            throw std::invalid_argument("SubjectSpec: no harmonics");
    }
};

enum class NoiseKind { gaussian, periodic };

/// Multiplicative intensity noise shared by all pixels. With the default
/// per-channel gains the disturbance lies on the [1,1,1] skin-tone
/// direction; channel_gain lets experiments skew it.
struct NoiseSpec {
    NoiseKind kind = NoiseKind::gaussian;
    double gain = 0.0; // relative AC amplitude
    double freq_hz = 1.67;
    std::uint64_t seed = 0;
    std::array<double, 3> channel_gain = {1.0, 1.0, 1.0};

    void validate(double fps) const {
        if (gain < 0.0) throw std::invalid_argument("NoiseSpec: gain < 0");
        if (kind == NoiseKind::periodic &&
            (freq_hz <= 0.0 || freq_hz >= fps / 2.0))
            throw std::invalid_argument(
                "NoiseSpec: freq_hz must lie in (0, fps/2)");
    }
};

namespace detail {

/// Smooth multiplicative texture in +-10%: bilinear interpolation of a
/// seeded coarse grid.
inline std::vector<double> make_texture(std::size_t side, std::uint64_t seed) {
    constexpr std::size_t grid = 9;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-0.1, 0.1);
    std::array<double, grid * grid> coarse;
    for (double& v : coarse) v = u(rng);

    std::vector<double> tex(side * side);
    for (std::size_t y = 0; y < side; ++y) {
        for (std::size_t x = 0; x < side; ++x) {
            const double gy = static_cast<double>(y) /
                              static_cast<double>(side) * (grid - 1);
            const double gx = static_cast<double>(x) /
                              static_cast<double>(side) * (grid - 1);
            const std::size_t y0 = static_cast<std::size_t>(gy);
            const std::size_t x0 = static_cast<std::size_t>(gx);
            const std::size_t y1 = std::min(y0 + 1, grid - 1);
            const std::size_t x1 = std::min(x0 + 1, grid - 1);
            const double fy = gy - static_cast<double>(y0);
            const double fx = gx - static_cast<double>(x0);
            tex[y * side + x] =
                (1 - fy) * ((1 - fx) * coarse[y0 * grid + x0] +
                            fx * coarse[y0 * grid + x1]) +
                fy * ((1 - fx) * coarse[y1 * grid + x0] +
                      fx * coarse[y1 * grid + x1]);
        }
    }
    return tex;
}

} // namespace detail

/// Pulse waveform of the spec at time t: harmonics of a phase-integrated
/// linearly drifting instantaneous rate.
inline double pulse_value(const SubjectSpec& spec, double t) {
    const double f0 = spec.hr_start_bpm / 60.0;
    const double f1 = spec.hr_end_bpm / 60.0;
    const double phase =
        2.0 * M_PI * (f0 * t + (f1 - f0) * t * t / (2.0 * spec.duration_s));
    double p = 0.0;
    for (const auto& [order, amp] : spec.ppg_harmonics)
        p += amp * std::sin(static_cast<double>(order) * phase);
    return p;
}

/// Deterministic synthetic skin video plus its ground-truth PPG waveform.
/// Pixel model: I_c(x,y,t) = DC_c(x,y) * (1 - ac * ratio_c * p(t)) — blood
/// absorption darkens the skin when the pulse wave p is high.
inline std::pair<FrameSequence, Signal> generate_subject(const SubjectSpec& spec) {
    spec.validate();
    const std::size_t t_count =
        static_cast<std::size_t>(std::lround(spec.duration_s * spec.fps));
    const std::size_t side = spec.frame_side;
    const std::vector<double> tex =
        detail::make_texture(side, spec.spatial_texture_seed);

    FrameSequence seq;
    seq.fps = spec.fps;
    seq.provenance = frames::Provenance::synthetic;
    Signal truth{std::vector<double>(t_count), spec.fps};

    for (std::size_t t = 0; t < t_count; ++t) {
        const double p = pulse_value(spec, static_cast<double>(t) / spec.fps);
        truth.samples[t] = p;
        Tensor frame({side, side, 3});
        for (std::size_t i = 0; i < side * side; ++i) {
            const double dc_mod = 1.0 + tex[i];
            for (std::size_t c = 0; c < 3; ++c)
                frame[i * 3 + c] =
                    spec.skin_dc[c] * dc_mod *
                    (1.0 - spec.ac_strength * spec.channel_ratio[c] * p);
        }
        seq.frames.push_back(std::move(frame));
    }
    return {std::move(seq), std::move(truth)};
}

/// The shared noise waveform of a NoiseSpec, one value per frame.
inline std::vector<double> noise_waveform(const NoiseSpec& spec,
                                          std::size_t t_count, double fps) {
    std::vector<double> n(t_count);
    if (spec.kind == NoiseKind::gaussian) {
        std::mt19937_64 rng(spec.seed);
        std::normal_distribution<double> g(0.0, 1.0);
        for (double& v : n) v = g(rng);
    } else {
        for (std::size_t t = 0; t < t_count; ++t)
            n[t] = std::sin(2.0 * M_PI * spec.freq_hz *
                            static_cast<double>(t) / fps);
    }
    return n;
}

/// I_c <- I_c * (1 + gain * channel_gain[c] * n(t)), the same n(t) for
/// every pixel. Negative results are clamped to zero with a warning.
inline FrameSequence add_intensity_noise(const FrameSequence& seq,
                                         const NoiseSpec& spec) {
    seq.check("add_intensity_noise");
    spec.validate(seq.fps);
    if (seq.channels() != 3)
        throw std::invalid_argument("add_intensity_noise: need 3 channels");
    const std::vector<double> n = noise_waveform(spec, seq.count(), seq.fps);

    FrameSequence out = seq;
    std::size_t clamped = 0;
    for (std::size_t t = 0; t < out.count(); ++t) {
        Tensor& f = out.frames[t];
        const double m[3] = {1.0 + spec.gain * spec.channel_gain[0] * n[t],
                             1.0 + spec.gain * spec.channel_gain[1] * n[t],
                             1.0 + spec.gain * spec.channel_gain[2] * n[t]};
        for (std::size_t i = 0; i < f.size(); i += 3)
            for (std::size_t c = 0; c < 3; ++c) {
                double v = f[i + c] * m[c];
                if (v < 0.0) {
                    v = 0.0;
                    ++clamped;
                }
                f[i + c] = v;
            }
    }
    if (clamped > 0)
        std::cerr << "add_intensity_noise: clamped " << clamped
                  << " negative pixel values to 0\n";
    return out;
}

/// Simulated finger-oximeter reference: the ground truth delayed by the
/// pulse transit time, with extra 2nd/3rd harmonic content derived from
/// the analytic signal.
inline Signal make_finger_reference(const Signal& ground_truth,
                                    double transit_delay_s,
                                    const std::vector<double>& extra_harmonics =
                                        {0.4, 0.2}) {
    ground_truth.check("make_finger_reference");
    if (transit_delay_s < 0.0)
        throw std::invalid_argument("make_finger_reference: negative delay");
    if (transit_delay_s >= ground_truth.duration())
        throw std::invalid_argument(
            "make_finger_reference: delay exceeds signal duration");

    // Fractional-sample delay via linear interpolation, edge-held.
    const std::size_t n = ground_truth.size();
    const double shift = transit_delay_s * ground_truth.fs;
    Signal delayed{std::vector<double>(n), ground_truth.fs};
    for (std::size_t i = 0; i < n; ++i) {
        double pos = static_cast<double>(i) - shift;
        if (pos < 0.0) pos = 0.0;
        const std::size_t i0 = static_cast<std::size_t>(pos);
        const std::size_t i1 = std::min(i0 + 1, n - 1);
        const double frac = pos - static_cast<double>(i0);
        delayed.samples[i] = (1.0 - frac) * ground_truth.samples[i0] +
                             frac * ground_truth.samples[i1];
    }
    if (extra_harmonics.empty()) return delayed;

    // Harmonics from the instantaneous phase/amplitude of the analytic
    // signal: out = Re{a} + sum_k amp_k * |a| * sin((k+1) * arg(a)).
    const double m = sigproc::mean(delayed.samples);
    std::vector<std::complex<double>> spec(n);
    for (std::size_t i = 0; i < n; ++i) spec[i] = delayed.samples[i] - m;
    dft::forward(spec);
    for (std::size_t k = 1; k < n; ++k) {
        if (2 * k < n)
            spec[k] *= 2.0;
        else if (2 * k > n)
            spec[k] = 0.0;
    }
    spec[0] = 0.0;
    dft::inverse(spec);

    Signal out{std::vector<double>(n), ground_truth.fs};
    for (std::size_t i = 0; i < n; ++i) {
        const double amp = std::abs(spec[i]);
        const double phase = std::arg(spec[i]);
        double v = spec[i].real();
        for (std::size_t k = 0; k < extra_harmonics.size(); ++k)
            v += extra_harmonics[k] * amp *
                 std::sin(static_cast<double>(k + 2) * phase);
        out.samples[i] = v + m;
    }
    return out;
}

} // namespace rppg::synth
