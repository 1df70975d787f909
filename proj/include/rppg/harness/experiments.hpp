#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <complex>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "rppg/extractors.hpp"
#include "rppg/frames.hpp"
#include "rppg/harness/config.hpp"
#include "rppg/harness/report.hpp"
#include "rppg/nn/predict.hpp"
#include "rppg/nn/train.hpp"
#include "rppg/sigproc.hpp"
#include "rppg/synth.hpp"

namespace rppg::harness {

/// Stable seed derivation: FNV-1a over a tag string, mixed with the base
/// seed. Independent of thread count and platform.
inline std::uint64_t derive_seed(std::uint64_t base, const std::string& tag) {
    std::uint64_t h = 14695981039346656037ull ^ base;
    for (unsigned char c : tag) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

/// Deterministic k-fold partition. Contiguous splits (Table-1 style) by
/// default; seeded shuffling when `shuffle` is set. Folds are disjoint and
/// cover every id exactly once as test.
inline std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>>
kfold_split(std::vector<std::size_t> ids, std::size_t k, std::uint64_t seed,
            bool shuffle = false) {
    if (k < 2 || k > ids.size())
        throw std::invalid_argument("kfold_split: need 2 <= k <= #subjects");
    if (shuffle) {
        std::mt19937_64 rng(seed);
        std::shuffle(ids.begin(), ids.end(), rng);
    }
    std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>>
        folds;
    const std::size_t n = ids.size();
    for (std::size_t f = 0; f < k; ++f) {
        const std::size_t lo = f * n / k, hi = (f + 1) * n / k;
        std::pair<std::vector<std::size_t>, std::vector<std::size_t>> fold;
        for (std::size_t i = 0; i < n; ++i)
            (i >= lo && i < hi ? fold.second : fold.first).push_back(ids[i]);
        folds.push_back(std::move(fold));
    }
    return folds;
}

/// One subject's raw material: the clean video and, for synthetic data,
/// its ground-truth pulse waveform.
struct SubjectData {
    std::string id;
    frames::FrameSequence clean;
    sigproc::Signal ground_truth; // empty for file-based subjects
    bool synthetic = true;
};

inline synth::SubjectSpec subject_spec(const ExperimentConfig& cfg,
                                       std::size_t index) {
    synth::SubjectSpec spec;
    spec.seed = derive_seed(cfg.seed, "subject" + std::to_string(index));
    spec.spatial_texture_seed =
        derive_seed(cfg.seed, "texture" + std::to_string(index));
    spec.duration_s = cfg.duration_s;
    spec.fps = cfg.fps;
    spec.ac_strength = cfg.ac_strength;
    spec.hr_start_bpm =
        cfg.hr_start_bpm + cfg.hr_step_bpm * static_cast<double>(index);
    spec.hr_end_bpm = spec.hr_start_bpm + cfg.hr_drift_bpm;
    return spec;
}

inline SubjectData make_subject(const ExperimentConfig& cfg,
                                std::size_t index) {
    SubjectData s;
    if (cfg.dataset_dirs.empty()) {
        auto [seq, truth] = synth::generate_subject(subject_spec(cfg, index));
        s.id = "synth" + std::to_string(index);
        s.clean = std::move(seq);
        s.ground_truth = std::move(truth);
        s.synthetic = true;
    } else {
        s.id = cfg.dataset_dirs[index];
        s.clean = frames::load_sequence(cfg.dataset_dirs[index], cfg.fps);
        s.synthetic = false;
    }
    return s;
}

inline std::size_t subject_count(const ExperimentConfig& cfg) {
    return cfg.dataset_dirs.empty() ? cfg.subjects : cfg.dataset_dirs.size();
}

/// Camera-side training label: POS on the clean video.
inline sigproc::Signal camera_pos_label(const SubjectData& s,
                                        bool bandpass_label) {
    return extract::make_reference_label(
        s.clean, {1.6, extract::Method::POS}, bandpass_label);
}

/// Reference pulse-rate trace a prediction is scored against: the
/// differentiated ground truth for synthetic data, the POS label for
/// file data.
inline sigproc::RateTrace reference_rates(const SubjectData& s) {
    if (s.synthetic)
        return sigproc::rate_trace(
            sigproc::zscore(sigproc::differentiate(s.ground_truth)));
    return sigproc::rate_trace(camera_pos_label(s, true));
}

/// Pairs difference frames with aligned scalar labels, keeping every
/// `stride`-th frame.
inline std::vector<nn::Sample> build_training_set(const frames::DiffClip& clip,
                                                  const sigproc::Signal& labels,
                                                  std::size_t stride = 1) {
    if (clip.count() != labels.size())
        throw std::invalid_argument(
            "build_training_set: " + std::to_string(clip.count()) +
            " difference frames vs " + std::to_string(labels.size()) +
            " labels");
    std::vector<nn::Sample> out;
    out.reserve(clip.count() / stride + 1);
    for (std::size_t i = 0; i < clip.count(); i += stride)
        out.push_back({clip.diffs[i], labels.samples[i]});
    return out;
}

/// predict -> bandpass -> rate trace -> metrics against the reference.
inline std::pair<double, double> evaluate(const nn::Network& net,
                                          const frames::DiffClip& clip,
                                          const sigproc::RateTrace& reference) {
    sigproc::Signal pred = nn::predict_clip(net, clip);
    pred = sigproc::bandpass(pred, 0.7, 3.0);
    const sigproc::RateTrace rt = sigproc::rate_trace(pred);
    return {sigproc::rmse(rt, reference), sigproc::accuracy(rt, reference)};
}

namespace detail {

/// Runs `count` independent jobs on up to `threads` workers. Each job
/// writes only its own output slots, so results are identical for any
/// thread count.
template <typename Fn>
void run_jobs(std::size_t count, std::size_t threads, Fn fn) {
    threads = std::max<std::size_t>(1, threads);
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (std::size_t w = 0; w < std::min(threads, count); ++w)
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

inline synth::NoiseSpec train_noise(const ExperimentConfig& cfg,
                                    std::size_t subject,
                                    bool channel_skewed) {
    synth::NoiseSpec n;
    n.kind = synth::NoiseKind::gaussian;
    n.gain = cfg.train_noise_gain;
    n.seed = derive_seed(cfg.seed, "trainnoise" + std::to_string(subject));
    if (channel_skewed) n.channel_gain = cfg.noise_channel_gain;
    return n;
}

inline synth::NoiseSpec test_noise(const ExperimentConfig& cfg,
                                   bool channel_skewed) {
    synth::NoiseSpec n;
    n.kind = synth::NoiseKind::periodic;
    n.gain = cfg.test_noise_gain;
    n.freq_hz = cfg.periodic_noise_hz;
    if (channel_skewed) n.channel_gain = cfg.noise_channel_gain;
    return n;
}

inline nn::Network train_network(const ExperimentConfig& cfg,
                                 std::size_t channels,
                                 const std::vector<nn::Sample>& samples,
                                 const std::string& tag) {
    nn::Network net(cfg.make_net_config(channels));
    net.init_weights(derive_seed(cfg.seed, "init|" + tag));
    nn::TrainOptions opt;
    opt.epochs = cfg.epochs;
    opt.batch_size = cfg.batch_size;
    opt.seed = derive_seed(cfg.seed, "train|" + tag);
    opt.patience = 2;
    opt.min_delta = 1e-4;
    nn::train(net, samples, opt);
    return net;
}

/// Mean phase offset (degrees) of `x` relative to `reference`, measured
/// on the analytic signals; feeding the result back into
/// hilbert_phase_shift(x, offset) aligns x with the reference.
inline double phase_offset_degrees(const sigproc::Signal& x,
                                   const sigproc::Signal& reference) {
    auto analytic = [](const sigproc::Signal& s) {
        const std::size_t n = s.size();
        const double m = sigproc::mean(s.samples);
        std::vector<std::complex<double>> spec(n);
        for (std::size_t i = 0; i < n; ++i) spec[i] = s.samples[i] - m;
        dft::forward(spec);
        for (std::size_t k = 1; k < n; ++k) {
            if (2 * k < n)
                spec[k] *= 2.0;
            else if (2 * k > n)
                spec[k] = 0.0;
        }
        spec[0] = 0.0;
        dft::inverse(spec);
        return spec;
    };
    const auto ax = analytic(x);
    const auto ar = analytic(reference);
    std::complex<double> acc = 0.0;
    for (std::size_t i = 0; i < ax.size(); ++i)
        acc += ax[i] * std::conj(ar[i]);
    return std::arg(acc) * 180.0 / M_PI;
}

} // namespace detail

/// E1: channel-order sensitivity. One net trained on R-G-B and tested on
/// permuted channel orders, plus nets trained and tested on replicated
/// single channels (R-R-R, G-G-G, B-B-B). Training uses Gaussian
/// intensity distortions, testing uses an in-band periodic distortion with
/// the same channel signature, so a net that learned the wrong channel
/// combination locks onto the distortion tone.
inline ReportTable run_e1(const ExperimentConfig& cfg) {
    cfg.validate();
    const std::size_t n = subject_count(cfg);
    std::vector<std::size_t> ids(n);
    std::iota(ids.begin(), ids.end(), 0);
    const auto folds =
        kfold_split(ids, cfg.folds, cfg.seed, cfg.shuffle_folds);

    std::vector<std::vector<Row>> fold_rows(folds.size());
    detail::run_jobs(folds.size(), cfg.threads, [&](std::size_t f) {
        const auto& [train_ids, test_ids] = folds[f];

        struct Variant {
            std::string name;
            std::array<std::size_t, 3> map;
            bool mono;
        };
        const std::vector<Variant> trainings = {
            {"RGB", {0, 1, 2}, false},
            {"RRR", {0, 0, 0}, true},
            {"GGG", {1, 1, 1}, true},
            {"BBB", {2, 2, 2}, true},
        };
        const std::vector<Variant> rgb_tests = {
            {"RGB", {0, 1, 2}, false},
            {"RBG", {0, 2, 1}, false},
            {"BGR", {2, 1, 0}, false},
        };

        for (const Variant& tv : trainings) {
            std::vector<nn::Sample> samples;
            for (std::size_t sid : train_ids) {
                const SubjectData subj = make_subject(cfg, sid);
                frames::FrameSequence noisy = synth::add_intensity_noise(
                    subj.clean, detail::train_noise(cfg, sid, true));
                if (tv.mono)
                    noisy = frames::permute_channels(noisy, tv.map);
                auto set = build_training_set(
                    frames::normalized_diff(noisy),
                    camera_pos_label(subj, cfg.label_bandpass),
                    cfg.train_stride);
                samples.insert(samples.end(),
                               std::make_move_iterator(set.begin()),
                               std::make_move_iterator(set.end()));
            }
            const nn::Network net = detail::train_network(
                cfg, 3, samples,
                "E1|" + tv.name + "|fold" + std::to_string(f));
            samples.clear();
            samples.shrink_to_fit();

            const auto tests = tv.mono ? std::vector<Variant>{tv} : rgb_tests;
            for (std::size_t sid : test_ids) {
                const SubjectData subj = make_subject(cfg, sid);
                const sigproc::RateTrace ref = reference_rates(subj);
                const frames::FrameSequence noisy = synth::add_intensity_noise(
                    subj.clean, detail::test_noise(cfg, true));
                for (const Variant& ev : tests) {
                    const auto [rmse, acc] = evaluate(
                        net,
                        frames::normalized_diff(
                            frames::permute_channels(noisy, ev.map)),
                        ref);
                    fold_rows[f].push_back(
                        {"E1", ev.name, f, subj.id, rmse, acc});
                }
            }
        }
    });

    ReportTable table;
    for (auto& rows : fold_rows)
        table.rows.insert(table.rows.end(), rows.begin(), rows.end());
    return table;
}

/// E2: label phase sensitivity. Part A trains on POS labels phase-shifted
/// by 0..180 degrees; part B trains on simulated finger-oximeter labels
/// (delayed, harmonic-rich) with and without phase correction and
/// filtering.
inline ReportTable run_e2(const ExperimentConfig& cfg) {
    cfg.validate();
    const std::size_t n = subject_count(cfg);
    std::vector<std::size_t> ids(n);
    std::iota(ids.begin(), ids.end(), 0);
    const auto folds =
        kfold_split(ids, cfg.folds, cfg.seed, cfg.shuffle_folds);

    struct LabelVariant {
        std::string name;
        double phase = 0.0; // for the phase sweep
        enum class Kind { phase, camera_nofilter, finger, corrected,
                          corrected_filtered } kind = Kind::phase;
    };
    std::vector<LabelVariant> variants;
    for (double phi : cfg.phase_degrees)
        variants.push_back({"phase_" + std::to_string(static_cast<int>(phi)),
                            phi, LabelVariant::Kind::phase});
    variants.push_back({"camera_pos_nofilter", 0.0,
                        LabelVariant::Kind::camera_nofilter});
    variants.push_back({"finger", 0.0, LabelVariant::Kind::finger});
    variants.push_back({"finger_phase_corrected", 0.0,
                        LabelVariant::Kind::corrected});
    variants.push_back({"finger_phase_corrected_filtered", 0.0,
                        LabelVariant::Kind::corrected_filtered});

    // Every fold/variant job consumes the same per-subject material, so
    // synthesize and preprocess each subject once instead of per job.
    struct SubjectCache {
        std::string id;
        bool synthetic = true;
        sigproc::Signal pos_raw; // POS on the clean video
        sigproc::Signal ground_truth;
        frames::DiffClip train_diffs; // with training-time sensor noise
        frames::DiffClip test_diffs;  // with the test-time distortion
        sigproc::RateTrace rates;
    };
    std::vector<SubjectCache> subjects(n);
    for (std::size_t sid = 0; sid < n; ++sid) {
        const SubjectData subj = make_subject(cfg, sid);
        SubjectCache& c = subjects[sid];
        c.id = subj.id;
        c.synthetic = subj.synthetic;
        c.pos_raw = extract::run_extractor(frames::spatial_mean(subj.clean),
                                           {1.6, extract::Method::POS});
        c.ground_truth = subj.ground_truth;
        c.train_diffs = frames::normalized_diff(synth::add_intensity_noise(
            subj.clean, detail::train_noise(cfg, sid, false)));
        c.test_diffs = frames::normalized_diff(synth::add_intensity_noise(
            subj.clean, detail::test_noise(cfg, false)));
        c.rates = reference_rates(subj);
    }

    auto make_label = [&](const SubjectCache& subj,
                          const LabelVariant& v) -> sigproc::Signal {
        using Kind = LabelVariant::Kind;
        const sigproc::Signal& pos_raw = subj.pos_raw;
        if (v.kind == Kind::phase) {
            sigproc::Signal s =
                cfg.label_bandpass ? sigproc::bandpass(pos_raw) : pos_raw;
            if (v.phase != 0.0) s = sigproc::hilbert_phase_shift(s, v.phase);
            return sigproc::zscore(sigproc::differentiate(s));
        }
        if (v.kind == Kind::camera_nofilter)
            return sigproc::zscore(sigproc::differentiate(pos_raw));

        const sigproc::Signal& base =
            subj.synthetic ? subj.ground_truth : pos_raw;
        sigproc::Signal finger =
            synth::make_finger_reference(base, cfg.transit_delay_s);
        if (v.kind == Kind::finger)
            return sigproc::zscore(sigproc::differentiate(finger));
        const double offset = detail::phase_offset_degrees(finger, pos_raw);
        sigproc::Signal corrected =
            sigproc::hilbert_phase_shift(finger, offset);
        if (v.kind == Kind::corrected_filtered)
            corrected = sigproc::bandpass(corrected);
        return sigproc::zscore(sigproc::differentiate(corrected));
    };

    const std::size_t jobs = folds.size() * variants.size();
    std::vector<std::vector<Row>> job_rows(jobs);
    detail::run_jobs(jobs, cfg.threads, [&](std::size_t j) {
        const std::size_t f = j / variants.size();
        const LabelVariant& v = variants[j % variants.size()];
        const auto& [train_ids, test_ids] = folds[f];

        std::vector<nn::Sample> samples;
        for (std::size_t sid : train_ids) {
            const SubjectCache& subj = subjects[sid];
            auto set = build_training_set(subj.train_diffs,
                                          make_label(subj, v),
                                          cfg.train_stride);
            samples.insert(samples.end(),
                           std::make_move_iterator(set.begin()),
                           std::make_move_iterator(set.end()));
        }
        const nn::Network net = detail::train_network(
            cfg, 3, samples, "E2|" + v.name + "|fold" + std::to_string(f));
        samples.clear();
        samples.shrink_to_fit();

        for (std::size_t sid : test_ids) {
            const SubjectCache& subj = subjects[sid];
            const auto [rmse, acc] =
                evaluate(net, subj.test_diffs, subj.rates);
            job_rows[j].push_back({"E2", v.name, f, subj.id, rmse, acc});
            // The 0-degree phase shift and the camera-POS baseline share
            // one label pipeline; report the run under both names.
            if (v.kind == LabelVariant::Kind::phase && v.phase == 0.0)
                job_rows[j].push_back(
                    {"E2", "camera_pos", f, subj.id, rmse, acc});
        }
    });

    ReportTable table;
    for (auto& rows : job_rows)
        table.rows.insert(table.rows.end(), rows.begin(), rows.end());
    return table;
}

/// E3: spatial-resolution and rotation robustness on clean data. Each
/// resolution trains and tests on identically degraded inputs; rotations
/// test the full-resolution net on rotated inputs.
inline ReportTable run_e3(const ExperimentConfig& cfg) {
    cfg.validate();
    const std::size_t n = subject_count(cfg);
    std::vector<std::size_t> ids(n);
    std::iota(ids.begin(), ids.end(), 0);
    const auto folds =
        kfold_split(ids, cfg.folds, cfg.seed, cfg.shuffle_folds);

    const std::size_t jobs = folds.size() * cfg.resolutions.size();
    std::vector<std::vector<Row>> job_rows(jobs);
    detail::run_jobs(jobs, cfg.threads, [&](std::size_t j) {
        const std::size_t f = j / cfg.resolutions.size();
        const std::size_t res = cfg.resolutions[j % cfg.resolutions.size()];
        const auto& [train_ids, test_ids] = folds[f];
        const bool full_res = res == 64;

        std::vector<nn::Sample> samples;
        for (std::size_t sid : train_ids) {
            const SubjectData subj = make_subject(cfg, sid);
            auto set = build_training_set(
                frames::normalized_diff(
                    frames::resolution_degrade(subj.clean, res)),
                camera_pos_label(subj, cfg.label_bandpass), cfg.train_stride);
            samples.insert(samples.end(),
                           std::make_move_iterator(set.begin()),
                           std::make_move_iterator(set.end()));
        }
        const nn::Network net = detail::train_network(
            cfg, 3, samples,
            "E3|res" + std::to_string(res) + "|fold" + std::to_string(f));
        samples.clear();
        samples.shrink_to_fit();

        for (std::size_t sid : test_ids) {
            const SubjectData subj = make_subject(cfg, sid);
            const sigproc::RateTrace ref = reference_rates(subj);
            const frames::FrameSequence degraded =
                frames::resolution_degrade(subj.clean, res);
            {
                const auto [rmse, acc] =
                    evaluate(net, frames::normalized_diff(degraded), ref);
                job_rows[j].push_back({"E3", "res" + std::to_string(res), f,
                                       subj.id, rmse, acc});
                if (full_res)
                    job_rows[j].push_back(
                        {"E3", "rot0", f, subj.id, rmse, acc});
            }
            if (full_res) {
                for (int deg : {90, 180}) {
                    const auto [rmse, acc] = evaluate(
                        net,
                        frames::normalized_diff(frames::rotate(degraded, deg)),
                        ref);
                    job_rows[j].push_back({"E3", "rot" + std::to_string(deg),
                                           f, subj.id, rmse, acc});
                }
            }
        }
    });

    ReportTable table;
    for (auto& rows : job_rows)
        table.rows.insert(table.rows.end(), rows.begin(), rows.end());
    return table;
}

/// E4: robustness to intensity distortions on the [1,1,1] direction.
/// Variants: plain CNN (clean-trained), CNN+Noise (mixed clean/noisy
/// training), CNN+POS and CNN+CHROM (plane-projected 2-channel inputs).
/// All are tested on clean clips and on clips carrying a 1.67 Hz periodic
/// intensity tone.
inline ReportTable run_e4(const ExperimentConfig& cfg) {
    cfg.validate();
    const std::size_t n = subject_count(cfg);
    std::vector<std::size_t> ids(n);
    std::iota(ids.begin(), ids.end(), 0);
    const auto folds =
        kfold_split(ids, cfg.folds, cfg.seed, cfg.shuffle_folds);

    struct Variant {
        std::string name;
        bool mixed_noise;
        const frames::PlaneMatrix* plane; // nullptr = raw RGB input
    };
    const std::vector<Variant> variants = {
        {"cnn", false, nullptr},
        {"cnn_noise", true, nullptr},
        {"cnn_pos", false, &frames::kPosPlane},
        {"cnn_chrom", false, &frames::kChromPlane},
    };

    const std::size_t jobs = folds.size() * variants.size();
    std::vector<std::vector<Row>> job_rows(jobs);
    detail::run_jobs(jobs, cfg.threads, [&](std::size_t j) {
        const std::size_t f = j / variants.size();
        const Variant& v = variants[j % variants.size()];
        const auto& [train_ids, test_ids] = folds[f];

        auto prepare = [&](const frames::FrameSequence& seq) {
            frames::DiffClip clip = frames::normalized_diff(seq);
            if (v.plane) clip = frames::project_plane(clip, *v.plane);
            return clip;
        };

        std::vector<nn::Sample> samples;
        for (std::size_t sid : train_ids) {
            const SubjectData subj = make_subject(cfg, sid);
            const sigproc::Signal label =
                camera_pos_label(subj, cfg.label_bandpass);
            auto set =
                build_training_set(prepare(subj.clean), label, cfg.train_stride);
            samples.insert(samples.end(),
                           std::make_move_iterator(set.begin()),
                           std::make_move_iterator(set.end()));
            if (v.mixed_noise) {
                auto noisy_set = build_training_set(
                    prepare(synth::add_intensity_noise(
                        subj.clean, detail::train_noise(cfg, sid, false))),
                    label, cfg.train_stride);
                samples.insert(samples.end(),
                               std::make_move_iterator(noisy_set.begin()),
                               std::make_move_iterator(noisy_set.end()));
            }
        }
        const nn::Network net = detail::train_network(
            cfg, v.plane ? 2 : 3, samples,
            "E4|" + v.name + "|fold" + std::to_string(f));
        samples.clear();
        samples.shrink_to_fit();

        for (std::size_t sid : test_ids) {
            const SubjectData subj = make_subject(cfg, sid);
            const sigproc::RateTrace ref = reference_rates(subj);
            {
                const auto [rmse, acc] = evaluate(net, prepare(subj.clean), ref);
                job_rows[j].push_back(
                    {"E4", v.name + "_clean", f, subj.id, rmse, acc});
            }
            {
                const auto [rmse, acc] = evaluate(
                    net,
                    prepare(synth::add_intensity_noise(
                        subj.clean, detail::test_noise(cfg, false))),
                    ref);
                job_rows[j].push_back(
                    {"E4", v.name + "_noisy", f, subj.id, rmse, acc});
            }
        }
    });

    ReportTable table;
    for (auto& rows : job_rows)
        table.rows.insert(table.rows.end(), rows.begin(), rows.end());
    return table;
}

inline ReportTable run_experiment(const ExperimentConfig& cfg) {
    switch (cfg.experiment) {
        case Experiment::E1: return run_e1(cfg);
        case Experiment::E2: return run_e2(cfg);
        case Experiment::E3: return run_e3(cfg);
        case Experiment::E4: return run_e4(cfg);
    }
    throw std::logic_error("run_experiment: bad experiment");
}

} // namespace rppg::harness
