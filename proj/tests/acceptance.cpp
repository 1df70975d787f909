// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. argv[1] must be the path to the rppg CLI binary (used by
// criterion 9). Criteria 5-8 run the full diagnostic experiments and take
// tens of minutes in total on a single core.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rppg/extractors.hpp"
#include "rppg/frames.hpp"
#include "rppg/harness/config.hpp"
#include "rppg/harness/experiments.hpp"
#include "rppg/harness/report.hpp"
#include "rppg/nn/checkpoint.hpp"
#include "rppg/nn/network.hpp"
#include "rppg/nn/ops.hpp"
#include "rppg/nn/predict.hpp"
#include "rppg/nn/train.hpp"
#include "rppg/sigproc.hpp"
#include "rppg/synth.hpp"

using namespace rppg;
namespace fs = std::filesystem;

namespace {

std::string g_cli;
int g_failures = 0;

class Timer {
  public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(
                   std::chrono::steady_clock::now() - start_)
            .count();
    }

  private:
    std::chrono::steady_clock::time_point start_;
};

void report(int criterion, bool ok, const std::string& detail) {
    std::cout << (ok ? "PASS" : "FAIL") << " criterion-" << criterion << ": "
              << detail << std::endl;
    if (!ok) ++g_failures;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

Tensor random_tensor(std::vector<std::size_t> shape, std::uint64_t seed) {
    Tensor t(std::move(shape));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = u(rng);
    return t;
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// ---------------------------------------------------------------------------
// Criterion 1: layer ops match naive-loop oracles below 1e-12 and the full
// network passes a central-difference gradient check below 1e-4 relative
// error, all within one minute.
// ---------------------------------------------------------------------------
void criterion_1() {
    Timer timer;
    double worst_op = 0.0;

    { // conv oracle: six nested loops, zero padding
        const Tensor in = random_tensor({8, 8, 3}, 101);
        const Tensor w = random_tensor({3, 3, 3, 4}, 102);
        const Tensor b = random_tensor({4}, 103);
        Tensor want({8, 8, 4});
        for (std::size_t y = 0; y < 8; ++y)
            for (std::size_t x = 0; x < 8; ++x)
                for (std::size_t k = 0; k < 4; ++k) {
                    double acc = b[k];
                    for (int dy = -1; dy <= 1; ++dy)
                        for (int dx = -1; dx <= 1; ++dx) {
                            const int yy = static_cast<int>(y) + dy;
                            const int xx = static_cast<int>(x) + dx;
                            if (yy < 0 || xx < 0 || yy >= 8 || xx >= 8)
                                continue;
                            for (std::size_t c = 0; c < 3; ++c)
                                acc += in.at3(static_cast<std::size_t>(yy),
                                              static_cast<std::size_t>(xx),
                                              c) *
                                       w[((static_cast<std::size_t>(dy + 1) *
                                               3 +
                                           static_cast<std::size_t>(dx + 1)) *
                                              3 +
                                          c) *
                                             4 +
                                         k];
                        }
                    want.at3(y, x, k) = acc;
                }
        worst_op = std::max(
            worst_op, max_abs_diff(nn::conv2d_forward(in, w, b), want));
    }
    { // average-pooling oracle
        const Tensor in = random_tensor({8, 8, 2}, 104);
        const Tensor got = nn::avgpool2x2(in);
        Tensor want({4, 4, 2});
        for (std::size_t y = 0; y < 4; ++y)
            for (std::size_t x = 0; x < 4; ++x)
                for (std::size_t c = 0; c < 2; ++c)
                    want.at3(y, x, c) =
                        0.25 * (in.at3(2 * y, 2 * x, c) +
                                in.at3(2 * y, 2 * x + 1, c) +
                                in.at3(2 * y + 1, 2 * x, c) +
                                in.at3(2 * y + 1, 2 * x + 1, c));
        worst_op = std::max(worst_op, max_abs_diff(got, want));
    }
    { // dense oracle
        const Tensor in = random_tensor({24}, 105);
        const Tensor w = random_tensor({24, 6}, 106);
        const Tensor b = random_tensor({6}, 107);
        const Tensor got = nn::dense_forward(in, w, b);
        Tensor want({6});
        for (std::size_t o = 0; o < 6; ++o) {
            double acc = b[o];
            for (std::size_t i = 0; i < 24; ++i) acc += in[i] * w[i * 6 + o];
            want[o] = acc;
        }
        worst_op = std::max(worst_op, max_abs_diff(got, want));
    }

    // Full-network gradient check on the tiny preset (dropout disabled so
    // the net is a fixed deterministic function during the probe).
    nn::NetworkConfig cfg = nn::NetworkConfig::tiny_preset(3);
    cfg.dropout_rate = 0.0;
    nn::Network net(cfg);
    net.init_weights(9001);
    const Tensor input = random_tensor({64, 64, 3}, 108);
    const double label = 0.37;

    std::mt19937_64 rng(1);
    nn::ForwardCache cache;
    auto loss_at = [&]() {
        const double out = net.forward(input, false, rng, cache);
        return 0.5 * (out - label) * (out - label);
    };
    const double out0 = net.forward(input, false, rng, cache);
    std::vector<Tensor> grads = net.zero_grads();
    net.backward(cache, out0 - label, grads);

    double max_rel = 0.0;
    const double h = 1e-4;
    std::mt19937_64 pick(77);
    for (std::size_t p = 0; p < net.params().size(); ++p) {
        Tensor& value = net.params()[p].value;
        for (int probe = 0; probe < 4; ++probe) {
            const std::size_t idx = pick() % value.size();
            const double orig = value[idx];
            value[idx] = orig + h;
            const double lp = loss_at();
            value[idx] = orig - h;
            const double lm = loss_at();
            value[idx] = orig;
            const double fd = (lp - lm) / (2.0 * h);
            const double an = grads[p][idx];
            const double rel = std::abs(fd - an) /
                               std::max({std::abs(fd), std::abs(an), 1e-8});
            max_rel = std::max(max_rel, rel);
        }
    }

    const double elapsed = timer.seconds();
    report(1,
           worst_op < 1e-12 && max_rel < 1e-4 && elapsed < 60.0,
           "op oracle max err " + fmt(worst_op * 1e12) +
               "e-12, gradcheck max rel err " + fmt(max_rel * 1e6) +
               "e-6 [" + fmt(elapsed) + "s <= 60s]");
}

// ---------------------------------------------------------------------------
// Criterion 2: Hilbert phase identities, bandpass idempotence, and a 1.2 Hz
// tone reading 72 bpm in every spectral window, within ten seconds.
// ---------------------------------------------------------------------------
void criterion_2() {
    Timer timer;
    bool ok = true;
    std::string detail;

    sigproc::Signal x{std::vector<double>(600), 20.0};
    for (std::size_t i = 0; i < x.size(); ++i)
        x.samples[i] =
            std::cos(2.0 * M_PI * 1.1 * static_cast<double>(i) / 20.0);

    { // phi = 0 is the identity; phi = 180 negates; phi = 90 is the
      // quadrature component (checked away from the edges).
        const sigproc::Signal s0 = sigproc::hilbert_phase_shift(x, 0.0);
        const sigproc::Signal s90 = sigproc::hilbert_phase_shift(x, 90.0);
        const sigproc::Signal s180 = sigproc::hilbert_phase_shift(x, 180.0);
        double e0 = 0.0, e90 = 0.0, e180 = 0.0;
        const std::size_t skip = x.size() / 20;
        for (std::size_t i = 0; i < x.size(); ++i) {
            e0 = std::max(e0, std::abs(s0.samples[i] - x.samples[i]));
            e180 = std::max(e180, std::abs(s180.samples[i] + x.samples[i]));
            if (i >= skip && i + skip < x.size()) {
                const double want =
                    std::sin(2.0 * M_PI * 1.1 * static_cast<double>(i) / 20.0);
                e90 = std::max(e90, std::abs(s90.samples[i] - want));
            }
        }
        ok = ok && e0 == 0.0 && e90 < 1e-3 && e180 < 1e-9;
        detail += "hilbert errs " + fmt(e0) + "/" + fmt(e90 * 1e3) + "e-3/" +
                  fmt(e180 * 1e9) + "e-9";
    }
    { // bandpass idempotence
        const sigproc::Signal once = sigproc::bandpass(x, 0.7, 3.0);
        const sigproc::Signal twice = sigproc::bandpass(once, 0.7, 3.0);
        double e = 0.0;
        for (std::size_t i = 0; i < once.size(); ++i)
            e = std::max(e, std::abs(once.samples[i] - twice.samples[i]));
        ok = ok && e < 1e-9;
        detail += ", bandpass idempotence " + fmt(e * 1e9) + "e-9";
    }
    { // 1.2 Hz tone -> 72 bpm in every window
        sigproc::Signal tone{std::vector<double>(600), 20.0};
        for (std::size_t i = 0; i < tone.size(); ++i)
            tone.samples[i] =
                std::sin(2.0 * M_PI * 1.2 * static_cast<double>(i) / 20.0);
        double worst = 0.0;
        for (double r : sigproc::rate_trace(tone).rates)
            worst = std::max(worst, std::abs(r - 72.0));
        ok = ok && worst < 0.6;
        detail += ", rate dev " + fmt(worst) + " bpm";
    }

    const double elapsed = timer.seconds();
    report(2, ok && elapsed < 10.0,
           detail + " [" + fmt(elapsed) + "s <= 10s]");
}

// ---------------------------------------------------------------------------
// Criterion 3: POS and CHROM both track a clean 60 s synthetic subject
// drifting 65 -> 80 bpm with RMSE < 1 bpm and 100% accuracy, in ten seconds.
// ---------------------------------------------------------------------------
void criterion_3() {
    Timer timer;
    synth::SubjectSpec spec;
    spec.duration_s = 60.0;
    spec.fps = 20.0;
    spec.frame_side = 64;
    spec.hr_start_bpm = 65.0;
    spec.hr_end_bpm = 80.0;
    auto [seq, truth] = synth::generate_subject(spec);
    const frames::RgbTrace trace = frames::spatial_mean(seq);
    const sigproc::RateTrace ref = sigproc::rate_trace(truth);

    const sigproc::RateTrace pos =
        sigproc::rate_trace(extract::pos_extract(trace));
    const sigproc::RateTrace chrom =
        sigproc::rate_trace(extract::chrom_extract(trace));
    const double pos_rmse = sigproc::rmse(pos, ref);
    const double chrom_rmse = sigproc::rmse(chrom, ref);
    const double pos_acc = sigproc::accuracy(pos, ref);
    const double chrom_acc = sigproc::accuracy(chrom, ref);

    const double elapsed = timer.seconds();
    report(3,
           pos_rmse < 1.0 && chrom_rmse < 1.0 && pos_acc == 100.0 &&
               chrom_acc == 100.0 && elapsed < 10.0,
           "pos rmse " + fmt(pos_rmse) + " acc " + fmt(pos_acc) +
               ", chrom rmse " + fmt(chrom_rmse) + " acc " + fmt(chrom_acc) +
               " [" + fmt(elapsed) + "s <= 10s]");
}

// ---------------------------------------------------------------------------
// Criterion 4: the POS plane annihilates [1,1,1] intensity modulation at
// the pixel level, and the POS extractor stays below 1 bpm RMSE when a
// 1.67 Hz periodic intensity tone rides on top of the pulse.
// ---------------------------------------------------------------------------
void criterion_4() {
    Timer timer;
    synth::NoiseSpec noise;
    noise.kind = synth::NoiseKind::periodic;
    noise.gain = 0.05;
    noise.freq_hz = 1.67;

    double proj = 0.0;
    { // pure intensity modulation: constant video + noise, diffs land on
      // [1,1,1] and the POS plane must remove them
        synth::SubjectSpec flat;
        flat.duration_s = 10.0;
        flat.fps = 20.0;
        flat.frame_side = 16;
        flat.ac_strength = 0.0;
        auto [seq, truth] = synth::generate_subject(flat);
        const frames::DiffClip projected = frames::project_plane(
            frames::normalized_diff(synth::add_intensity_noise(seq, noise)),
            frames::kPosPlane);
        for (const Tensor& d : projected.diffs)
            for (std::size_t i = 0; i < d.size(); ++i)
                proj = std::max(proj, std::abs(d[i]));
    }

    double noisy_rmse = 0.0;
    { // pulse + periodic distractor
        synth::SubjectSpec spec;
        spec.duration_s = 40.0;
        spec.fps = 20.0;
        spec.frame_side = 16;
        spec.hr_start_bpm = 66.0;
        spec.hr_end_bpm = 78.0;
        auto [seq, truth] = synth::generate_subject(spec);
        const frames::FrameSequence noisy =
            synth::add_intensity_noise(seq, noise);
        const sigproc::RateTrace got = sigproc::rate_trace(
            extract::pos_extract(frames::spatial_mean(noisy)));
        noisy_rmse = sigproc::rmse(got, sigproc::rate_trace(truth));
    }

    const double elapsed = timer.seconds();
    report(4, proj < 1e-9 && noisy_rmse < 1.0 && elapsed < 30.0,
           "plane residual " + fmt(proj * 1e9) + "e-9, noisy POS rmse " +
               fmt(noisy_rmse) + " bpm [" + fmt(elapsed) + "s <= 30s]");
}

// ---------------------------------------------------------------------------
// Criterion 5 (E1): swapping test channels collapses accuracy by more than
// 20 points, and a G-only network beats an R-only network on RMSE.
// ---------------------------------------------------------------------------
void criterion_5() {
    Timer timer;
    harness::ExperimentConfig cfg;
    cfg.experiment = harness::Experiment::E1;
    const harness::ReportTable t = harness::run_experiment(cfg);

    const double acc_rgb = t.median_accuracy("RGB");
    const double acc_rbg = t.median_accuracy("RBG");
    const double rmse_ggg = t.median_rmse("GGG");
    const double rmse_rrr = t.median_rmse("RRR");

    const double elapsed = timer.seconds();
    report(5,
           acc_rbg < acc_rgb - 20.0 && rmse_ggg < rmse_rrr &&
               elapsed <= 900.0,
           "acc rgb " + fmt(acc_rgb) + " vs rbg " + fmt(acc_rbg) +
               ", rmse ggg " + fmt(rmse_ggg) + " vs rrr " + fmt(rmse_rrr) +
               " [" + fmt(elapsed) + "s <= 900s]");
}

// ---------------------------------------------------------------------------
// Criterion 6 (E2): median RMSE across reference phase shifts peaks at 90
// degrees, is symmetric at the ends, and phase correction plus filtering
// monotonically improves the finger reference.
// ---------------------------------------------------------------------------
void criterion_6() {
    Timer timer;
    harness::ExperimentConfig cfg;
    cfg.experiment = harness::Experiment::E2;
    // E2 trains 11 label variants per fold.  The full training schedule
    // is what separates the variants (undertrained networks reject the
    // test-time distractor by luck rather than by label quality), so the
    // budget is met by using 3 folds of 12 subjects -- the same 8
    // training subjects per network as the 5-fold default with fewer
    // jobs.
    cfg.subjects = 12;
    cfg.folds = 3;
    // Networks trained on badly phase-shifted (or harmonic-rich finger)
    // labels end up with weak pulse gain and lock onto a moderate
    // periodic distractor, while well-aligned training rejects it.
    cfg.test_noise_gain = 0.02;
    const harness::ReportTable t = harness::run_experiment(cfg);

    double peak = -1.0;
    double at90 = 0.0;
    for (double deg : cfg.phase_degrees) {
        const double r = t.median_rmse(
            "phase_" + std::to_string(static_cast<int>(deg)));
        if (deg == 90.0) at90 = r;
        peak = std::max(peak, r);
    }
    const double r0 = t.median_rmse("phase_0");
    const double r180 = t.median_rmse("phase_180");
    const double finger = t.median_rmse("finger");
    const double corrected = t.median_rmse("finger_phase_corrected");
    const double filtered = t.median_rmse("finger_phase_corrected_filtered");

    const double elapsed = timer.seconds();
    report(6,
           at90 >= peak - 1e-9 && std::abs(r0 - r180) < 1.5 &&
               finger >= corrected &&
               corrected >= filtered && elapsed <= 1200.0,
           "rmse@90 " + fmt(at90) + " (peak " + fmt(peak) + "), |0-180| " +
               fmt(std::abs(r0 - r180)) + ", finger " + fmt(finger) + " >= " +
               fmt(corrected) + " >= " + fmt(filtered) + " [" + fmt(elapsed) +
               "s <= 1200s]");
}

// ---------------------------------------------------------------------------
// Criterion 7 (E3): every probed resolution keeps median accuracy above 80%
// on clean data, and rotating the test clips moves median RMSE by < 1 bpm.
// ---------------------------------------------------------------------------
void criterion_7() {
    Timer timer;
    harness::ExperimentConfig cfg;
    cfg.experiment = harness::Experiment::E3;
    // Eight resolutions per fold; shorten the schedule to fit the budget.
    cfg.epochs = 2;
    cfg.train_stride = 3;
    const harness::ReportTable t = harness::run_experiment(cfg);

    double worst_acc = 101.0;
    std::string worst_res;
    for (std::size_t res : cfg.resolutions) {
        const double a = t.median_accuracy("res" + std::to_string(res));
        if (a < worst_acc) {
            worst_acc = a;
            worst_res = std::to_string(res);
        }
    }
    const double rot0 = t.median_rmse("rot0");
    const double dev = std::max(std::abs(t.median_rmse("rot90") - rot0),
                                std::abs(t.median_rmse("rot180") - rot0));

    const double elapsed = timer.seconds();
    report(7, worst_acc > 80.0 && dev < 1.0 && elapsed <= 900.0,
           "worst resolution acc " + fmt(worst_acc) + "% (res " + worst_res +
               "), rotation rmse shift " + fmt(dev) + " bpm [" + fmt(elapsed) +
               "s <= 900s]");
}

// ---------------------------------------------------------------------------
// Criterion 8 (E4): a clean-trained CNN collapses under the periodic
// intensity tone, noise-augmented training restores it, and the POS-plane
// input is at least as good as noise augmentation.
// ---------------------------------------------------------------------------
void criterion_8() {
    Timer timer;
    harness::ExperimentConfig cfg;
    cfg.experiment = harness::Experiment::E4;
    // Four variants per fold (one with doubled training data); a wider
    // sample stride keeps the run inside the budget.
    cfg.train_stride = 3;
    const harness::ReportTable t = harness::run_experiment(cfg);

    const double cnn_noisy_acc = t.median_accuracy("cnn_noisy");
    const double aug_noisy_acc = t.median_accuracy("cnn_noise_noisy");
    const double pos_rmse = t.median_rmse("cnn_pos_noisy");
    const double aug_rmse = t.median_rmse("cnn_noise_noisy");

    const double elapsed = timer.seconds();
    report(8,
           cnn_noisy_acc < 30.0 && aug_noisy_acc > 70.0 &&
               pos_rmse <= aug_rmse && elapsed <= 1200.0,
           "cnn acc on noise " + fmt(cnn_noisy_acc) + "%, augmented " +
               fmt(aug_noisy_acc) + "%, rmse pos " + fmt(pos_rmse) + " <= aug " +
               fmt(aug_rmse) + " [" + fmt(elapsed) + "s <= 1200s]");
}

// ---------------------------------------------------------------------------
// Criterion 9: the CLI kernel analysis of a POS-plane-input network (the E4
// cnn_pos recipe) reports a unit-norm principal direction whose two
// components share a sign, within five seconds of the analysis call.
// ---------------------------------------------------------------------------
void criterion_9() {
    harness::ExperimentConfig cfg;
    cfg.experiment = harness::Experiment::E4;
    cfg.subjects = 4;
    cfg.folds = 2;
    cfg.train_stride = 1;

    // Train one cnn_pos network with the E4 recipe. Channel-skewed sensor
    // noise is added to the training clips: on perfectly clean synthetic
    // data the two projected channels are exactly proportional, so the
    // first layer has a null space that random drift fills; channel-wise
    // noise (which survives the plane projection) breaks that degeneracy
    // and lets the kernels organize along the in-phase pulse direction.
    std::vector<nn::Sample> samples;
    for (std::size_t sid = 0; sid < cfg.subjects; ++sid) {
        const harness::SubjectData subj = harness::make_subject(cfg, sid);
        const frames::FrameSequence noisy = synth::add_intensity_noise(
            subj.clean, harness::detail::train_noise(cfg, sid, true));
        auto set = harness::build_training_set(
            frames::project_plane(frames::normalized_diff(noisy),
                                  frames::kPosPlane),
            harness::camera_pos_label(subj, cfg.label_bandpass),
            cfg.train_stride);
        samples.insert(samples.end(), std::make_move_iterator(set.begin()),
                       std::make_move_iterator(set.end()));
    }
    nn::Network net(cfg.make_net_config(2));
    net.init_weights(harness::derive_seed(cfg.seed, "init|E4|cnn_pos|fold0"));
    nn::TrainOptions opt;
    opt.epochs = 8;
    opt.batch_size = cfg.batch_size;
    opt.seed = harness::derive_seed(cfg.seed, "train|E4|cnn_pos|fold0");
    opt.patience = 0; // fixed-length schedule keeps the probe deterministic
    nn::train(net, samples, opt);

    const fs::path dir = fs::temp_directory_path() / "rppg_acceptance";
    fs::create_directories(dir);
    const fs::path ckpt = dir / "cnn_pos.ckpt";
    nn::save_checkpoint(nn::Checkpoint::from_network(net, cfg.seed),
                        ckpt.string());

    Timer timer; // the five-second budget covers the analysis itself
    const fs::path log = dir / "analyze.log";
    const std::string cmd = g_cli + " analyze-kernels --checkpoint " +
                            ckpt.string() + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    const double elapsed = timer.seconds();

    std::ifstream in(log);
    std::string line;
    std::vector<double> direction;
    double norm = -1.0;
    while (std::getline(in, line)) {
        if (line.rfind("principal_direction_norm,", 0) == 0) {
            norm = std::atof(line.c_str() + line.find(',') + 1);
        } else if (line.rfind("principal_direction,", 0) == 0) {
            std::stringstream ss(line.substr(line.find(',') + 1));
            std::string tok;
            while (std::getline(ss, tok, ','))
                direction.push_back(std::atof(tok.c_str()));
        }
    }
    fs::remove_all(dir);

    const bool exited_ok = status == 0;
    const bool unit = std::abs(norm - 1.0) < 1e-6;
    const bool same_sign = direction.size() == 2 &&
                           direction[0] * direction[1] > 0.0;
    report(9, exited_ok && unit && same_sign && elapsed < 5.0,
           "direction (" +
               (direction.size() == 2
                    ? fmt(direction[0]) + ", " + fmt(direction[1])
                    : std::string("missing")) +
               "), norm " + fmt(norm) + " [" + fmt(elapsed) + "s <= 5s]");
}

// ---------------------------------------------------------------------------
// Criterion 10: a full experiment run is bit-identical across reruns with
// the same seed at threads=1, and independent of the thread count.
// ---------------------------------------------------------------------------
void criterion_10() {
    Timer timer;
    harness::ExperimentConfig cfg;
    cfg.experiment = harness::Experiment::E1;
    cfg.subjects = 4;
    cfg.folds = 2;
    cfg.duration_s = 15.0;
    cfg.epochs = 2;

    cfg.threads = 1;
    const std::string a = harness::run_experiment(cfg).to_csv();
    const std::string b = harness::run_experiment(cfg).to_csv();
    cfg.threads = 2;
    const std::string c = harness::run_experiment(cfg).to_csv();

    const double elapsed = timer.seconds();
    report(10, a == b && a == c,
           std::string("rerun ") + (a == b ? "identical" : "DIFFERS") +
               ", threads=2 " + (a == c ? "identical" : "DIFFERS") + " [" +
               fmt(elapsed) + "s]");
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: acceptance <path-to-rppg-cli> [criteria]"
                  << std::endl;
        return 2;
    }
    g_cli = argv[1];

    // Optional second argument: comma-separated criterion numbers to run.
    std::vector<bool> enabled(11, true);
    if (argc > 2) {
        enabled.assign(11, false);
        std::stringstream ss(argv[2]);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            const int n = std::atoi(tok.c_str());
            if (n >= 1 && n <= 10) enabled[static_cast<std::size_t>(n)] = true;
        }
    }

    void (*criteria[])() = {criterion_1, criterion_2, criterion_3,
                            criterion_4, criterion_5, criterion_6,
                            criterion_7, criterion_8, criterion_9,
                            criterion_10};
    for (int n = 1; n <= 10; ++n)
        if (enabled[static_cast<std::size_t>(n)]) criteria[n - 1]();

    std::cout << (g_failures == 0 ? "ALL CRITERIA PASSED"
                                  : std::to_string(g_failures) +
                                        " CRITERIA FAILED")
              << std::endl;
    return g_failures == 0 ? 0 : 1;
}
