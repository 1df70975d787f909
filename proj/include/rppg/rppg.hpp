#pragma once

#include "rppg/csv.hpp"
#include "rppg/extractors.hpp"
#include "rppg/frames.hpp"
#include "rppg/harness/config.hpp"
#include "rppg/harness/experiments.hpp"
#include "rppg/harness/report.hpp"
#include "rppg/image_io.hpp"
#include "rppg/nn/adadelta.hpp"
#include "rppg/nn/checkpoint.hpp"
#include "rppg/nn/kernel_summary.hpp"
#include "rppg/nn/network.hpp"
#include "rppg/nn/ops.hpp"
#include "rppg/nn/predict.hpp"
#include "rppg/nn/train.hpp"
#include "rppg/sigproc.hpp"
#include "rppg/synth.hpp"
#include "rppg/tensor.hpp"
