#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "rppg/image_io.hpp"
#include "rppg/sigproc.hpp"
#include "rppg/tensor.hpp"

namespace rppg::frames {

enum class Provenance { file, synthetic };

/// Timestamped multi-channel image sequence; pixel values are doubles in
/// native count units (0..255 for file data).
struct FrameSequence {
    std::vector<Tensor> frames; // each H x W x C
    double fps = 0.0;
    Provenance provenance = Provenance::synthetic;
    std::string channel_tag = "RGB";

    std::size_t count() const { return frames.size(); }
    std::size_t height() const { return frames.at(0).dim(0); }
    std::size_t width() const { return frames.at(0).dim(1); }
    std::size_t channels() const { return frames.at(0).dim(2); }

    void check(const char* who) const {
        if (fps <= 0.0) throw std::invalid_argument(std::string(who) + ": fps <= 0");
        if (frames.empty())
            throw std::invalid_argument(std::string(who) + ": no frames");
        for (const Tensor& f : frames)
            if (f.shape() != frames.front().shape())
                throw std::invalid_argument(std::string(who) +
                                            ": mixed frame dimensions");
    }
};

/// Normalized frame differences plus the per-clip standardization factor.
struct DiffClip {
    std::vector<Tensor> diffs; // (T-1) images H x W x C
    double fps = 0.0;
    double scale = 1.0; // std of the raw ratio values

    std::size_t count() const { return diffs.size(); }
};

struct RoiBox {
    std::size_t x = 0, y = 0, w = 0, h = 0;
};

/// Per-channel spatial-mean traces of a 3-channel sequence.
struct RgbTrace {
    sigproc::Signal r, g, b;
};

inline FrameSequence load_sequence(const std::string& directory, double fps) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(directory))
        throw std::runtime_error("not a directory: " + directory);
    std::vector<std::string> files;
    for (const auto& e : fs::directory_iterator(directory)) {
        if (!e.is_regular_file()) continue;
        const std::string ext = e.path().extension().string();
        if (ext == ".png" || ext == ".bmp" || ext == ".PNG" || ext == ".BMP")
            files.push_back(e.path().string());
    }
    std::sort(files.begin(), files.end());
    if (files.empty())
        throw std::runtime_error("no PNG/BMP frames in: " + directory);
    if (files.size() < 2)
        throw std::runtime_error("need >= 2 frames, found 1 in: " + directory);

    FrameSequence seq;
    seq.fps = fps;
    seq.provenance = Provenance::file;
    for (const std::string& path : files) {
        const bool png = path.ends_with(".png") || path.ends_with(".PNG");
        img::Image8 im = png ? img::read_png(path) : img::read_bmp(path);
        Tensor frame({im.height, im.width, 3});
        for (std::size_t i = 0; i < im.rgb.size(); ++i)
            frame[i] = static_cast<double>(im.rgb[i]);
        if (!seq.frames.empty() &&
            frame.shape() != seq.frames.front().shape())
            throw std::runtime_error("mixed frame dimensions at: " + path);
        seq.frames.push_back(std::move(frame));
    }
    return seq;
}

/// Writes frames as frame_%06d.png, quantized to 8 bits. Optional seeded
/// uniform dither decorrelates the quantization error; without it,
/// integer-valued pixels round-trip exactly.
inline void save_sequence_png(const FrameSequence& seq,
                              const std::string& directory,
                              bool dither = false,
                              std::uint64_t dither_seed = 0) {
    seq.check("save_sequence_png");
    if (seq.channels() != 3)
        throw std::invalid_argument("save_sequence_png: need 3 channels");
    std::filesystem::create_directories(directory);
    std::mt19937_64 rng(dither_seed);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    char name[32];
    for (std::size_t t = 0; t < seq.count(); ++t) {
        const Tensor& f = seq.frames[t];
        img::Image8 im;
        im.width = seq.width();
        im.height = seq.height();
        im.rgb.resize(im.width * im.height * 3);
        for (std::size_t i = 0; i < im.rgb.size(); ++i) {
            double v = f[i] + (dither ? u(rng) : 0.0);
            v = std::lround(v);
            im.rgb[i] = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
        }
        std::snprintf(name, sizeof(name), "frame_%06zu.png", t);
        img::write_png(im, (std::filesystem::path(directory) / name).string());
    }
}

inline FrameSequence crop(const FrameSequence& seq, const RoiBox& box) {
    seq.check("crop");
    if (box.w == 0 || box.h == 0 || box.x + box.w > seq.width() ||
        box.y + box.h > seq.height())
        throw std::invalid_argument("crop: box out of frame bounds");
    FrameSequence out = seq;
    out.frames.clear();
    const std::size_t c = seq.channels();
    for (const Tensor& f : seq.frames) {
        Tensor g({box.h, box.w, c});
        for (std::size_t y = 0; y < box.h; ++y)
            for (std::size_t x = 0; x < box.w; ++x)
                for (std::size_t ci = 0; ci < c; ++ci)
                    g.at3(y, x, ci) = f.at3(box.y + y, box.x + x, ci);
        out.frames.push_back(std::move(g));
    }
    return out;
}

/// Nearest-neighbor rescale; source index = floor((i + 0.5) * in / out).
inline FrameSequence scale_nearest(const FrameSequence& seq, std::size_t out_w,
                                   std::size_t out_h) {
    seq.check("scale_nearest");
    if (out_w == 0 || out_h == 0)
        throw std::invalid_argument("scale_nearest: non-positive target size");
    const std::size_t in_w = seq.width(), in_h = seq.height(),
                      c = seq.channels();
    std::vector<std::size_t> map_x(out_w), map_y(out_h);
    for (std::size_t x = 0; x < out_w; ++x)
        map_x[x] = std::min(
            in_w - 1, static_cast<std::size_t>((static_cast<double>(x) + 0.5) *
                                               static_cast<double>(in_w) /
                                               static_cast<double>(out_w)));
    for (std::size_t y = 0; y < out_h; ++y)
        map_y[y] = std::min(
            in_h - 1, static_cast<std::size_t>((static_cast<double>(y) + 0.5) *
                                               static_cast<double>(in_h) /
                                               static_cast<double>(out_h)));
    FrameSequence out = seq;
    out.frames.clear();
    for (const Tensor& f : seq.frames) {
        Tensor g({out_h, out_w, c});
        for (std::size_t y = 0; y < out_h; ++y)
            for (std::size_t x = 0; x < out_w; ++x)
                for (std::size_t ci = 0; ci < c; ++ci)
                    g.at3(y, x, ci) = f.at3(map_y[y], map_x[x], ci);
        out.frames.push_back(std::move(g));
    }
    return out;
}

/// Down-scale to n x n and back up to the original side with
/// nearest-neighbor sampling, destroying spatial detail but not size.
inline FrameSequence resolution_degrade(const FrameSequence& seq,
                                        std::size_t n) {
    seq.check("resolution_degrade");
    const std::size_t side = seq.width();
    if (n > side)
        throw std::invalid_argument("resolution_degrade: n exceeds frame side");
    if (n == side) return seq;
    return scale_nearest(scale_nearest(seq, n, n), side, seq.height());
}

/// Exact pixel permutation; only 90 and 180 degrees are supported.
inline FrameSequence rotate(const FrameSequence& seq, int degrees) {
    seq.check("rotate");
    if (degrees != 90 && degrees != 180)
        throw std::invalid_argument("rotate: unsupported angle " +
                                    std::to_string(degrees));
    const std::size_t h = seq.height(), w = seq.width(), c = seq.channels();
    FrameSequence out = seq;
    out.frames.clear();
    for (const Tensor& f : seq.frames) {
        if (degrees == 180) {
            Tensor g({h, w, c});
            for (std::size_t y = 0; y < h; ++y)
                for (std::size_t x = 0; x < w; ++x)
                    for (std::size_t ci = 0; ci < c; ++ci)
                        g.at3(y, x, ci) = f.at3(h - 1 - y, w - 1 - x, ci);
            out.frames.push_back(std::move(g));
        } else { // 90 degrees counter-clockwise
            Tensor g({w, h, c});
            for (std::size_t y = 0; y < w; ++y)
                for (std::size_t x = 0; x < h; ++x)
                    for (std::size_t ci = 0; ci < c; ++ci)
                        g.at3(y, x, ci) = f.at3(x, w - 1 - y, ci);
            out.frames.push_back(std::move(g));
        }
    }
    return out;
}

/// Reorders (or duplicates) channels: out channel i = in channel map[i].
inline FrameSequence permute_channels(const FrameSequence& seq,
                                      const std::array<std::size_t, 3>& map,
                                      const std::string& tag = "") {
    seq.check("permute_channels");
    if (seq.channels() != 3)
        throw std::invalid_argument("permute_channels: sequence must be "
                                    "3-channel");
    for (std::size_t m : map)
        if (m > 2)
            throw std::invalid_argument("permute_channels: index out of {0,1,2}");
    const std::size_t h = seq.height(), w = seq.width();
    FrameSequence out = seq;
    out.frames.clear();
    for (const Tensor& f : seq.frames) {
        Tensor g({h, w, 3});
        for (std::size_t y = 0; y < h; ++y)
            for (std::size_t x = 0; x < w; ++x)
                for (std::size_t ci = 0; ci < 3; ++ci)
                    g.at3(y, x, ci) = f.at3(y, x, map[ci]);
        out.frames.push_back(std::move(g));
    }
    if (!tag.empty()) {
        out.channel_tag = tag;
    } else {
        const char* names = "RGB";
        out.channel_tag = {names[map[0]], names[map[1]], names[map[2]]};
    }
    return out;
}

/// AC/DC preprocessing: D_t = (I_{t+1} - I_t) / max(I_{t+1} + I_t, eps),
/// then the whole clip is divided by its global standard deviation.
inline DiffClip normalized_diff(const FrameSequence& seq, double eps = 1e-6) {
    seq.check("normalized_diff");
    if (seq.count() < 2)
        throw std::invalid_argument("normalized_diff: need >= 2 frames");
    DiffClip clip;
    clip.fps = seq.fps;
    double sum = 0.0, sum2 = 0.0;
    std::size_t n = 0;
    for (std::size_t t = 0; t + 1 < seq.count(); ++t) {
        const Tensor& a = seq.frames[t];
        const Tensor& b = seq.frames[t + 1];
        Tensor d(a.shape());
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double denom = std::max(a[i] + b[i], eps);
            d[i] = (b[i] - a[i]) / denom;
            sum += d[i];
            sum2 += d[i] * d[i];
        }
        n += a.size();
        clip.diffs.push_back(std::move(d));
    }
    const double m = sum / static_cast<double>(n);
    const double var = sum2 / static_cast<double>(n) - m * m;
    clip.scale = var > 0.0 ? std::sqrt(var) : 1.0;
    const double inv = 1.0 / clip.scale;
    for (Tensor& d : clip.diffs)
        for (std::size_t i = 0; i < d.size(); ++i) d[i] *= inv;
    return clip;
}

/// Per-frame mean over all pixels, one Signal per channel.
inline RgbTrace spatial_mean(const FrameSequence& seq) {
    seq.check("spatial_mean");
    if (seq.channels() != 3)
        throw std::invalid_argument("spatial_mean: sequence must be 3-channel");
    const std::size_t t = seq.count();
    RgbTrace trace;
    trace.r.fs = trace.g.fs = trace.b.fs = seq.fps;
    trace.r.samples.resize(t);
    trace.g.samples.resize(t);
    trace.b.samples.resize(t);
    const double inv = 1.0 / static_cast<double>(seq.width() * seq.height());
    for (std::size_t i = 0; i < t; ++i) {
        const Tensor& f = seq.frames[i];
        double acc[3] = {0.0, 0.0, 0.0};
        for (std::size_t p = 0; p < f.size(); p += 3) {
            acc[0] += f[p];
            acc[1] += f[p + 1];
            acc[2] += f[p + 2];
        }
        trace.r.samples[i] = acc[0] * inv;
        trace.g.samples[i] = acc[1] * inv;
        trace.b.samples[i] = acc[2] * inv;
    }
    return trace;
}

using PlaneMatrix = std::array<std::array<double, 3>, 2>;

/// Projection plane orthogonal to the [1,1,1] intensity direction.
inline constexpr PlaneMatrix kPosPlane{{{0.0, 1.0, -1.0}, {-2.0, 1.0, 1.0}}};
/// Chrominance plane orthogonal to the specular reflection direction.
inline constexpr PlaneMatrix kChromPlane{{{3.0, -2.0, 0.0}, {1.5, 1.0, -1.5}}};

/// Per-pixel linear map across channels: out = P * [r,g,b]^T.
inline DiffClip project_plane(const DiffClip& clip, const PlaneMatrix& p) {
    if (clip.diffs.empty() || clip.diffs.front().dim(2) != 3)
        throw std::invalid_argument("project_plane: clip must be 3-channel");
    DiffClip out;
    out.fps = clip.fps;
    out.scale = clip.scale;
    const std::size_t h = clip.diffs.front().dim(0);
    const std::size_t w = clip.diffs.front().dim(1);
    for (const Tensor& d : clip.diffs) {
        Tensor g({h, w, 2});
        for (std::size_t i = 0, j = 0; i < d.size(); i += 3, j += 2) {
            g[j] = p[0][0] * d[i] + p[0][1] * d[i + 1] + p[0][2] * d[i + 2];
            g[j + 1] = p[1][0] * d[i] + p[1][1] * d[i + 1] + p[1][2] * d[i + 2];
        }
        out.diffs.push_back(std::move(g));
    }
    return out;
}

} // namespace rppg::frames
