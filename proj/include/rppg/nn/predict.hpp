#pragma once

#include "rppg/frames.hpp"
#include "rppg/nn/network.hpp"
#include "rppg/sigproc.hpp"

namespace rppg::nn {

/// Runs the network over every difference frame of a clip; one scalar per
/// frame at the clip frame rate. Callers bandpass the result before rate
/// estimation.
inline sigproc::Signal predict_clip(const Network& net,
                                    const frames::DiffClip& clip) {
    sigproc::Signal out{std::vector<double>(clip.count()), clip.fps};
    for (std::size_t i = 0; i < clip.count(); ++i)
        out.samples[i] = net.forward(clip.diffs[i]);
    return out;
}

} // namespace rppg::nn
