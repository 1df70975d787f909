// rppg: command-line front end for the remote-PPG toolkit.
//
// Subcommands: synth, extract, train, infer, eval, experiment,
// analyze-kernels. Every subcommand is deterministic given --seed; all
// file outputs are written atomically. Set RPPG_LOG=debug for progress
// output on stderr.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "rppg/rppg.hpp"

namespace {

bool log_enabled() {
    const char* v = std::getenv("RPPG_LOG");
    return v && std::string(v) != "" && std::string(v) != "0";
}

void logline(const std::string& msg) {
    if (log_enabled()) std::cerr << "[rppg] " << msg << '\n';
}

// One-line machine-parsable failure categories; nonzero exit per category.
struct CategorizedError {
    std::string category;
    std::string message;
    int exit_code;
};

rppg::frames::RoiBox parse_roi(const std::string& s) {
    rppg::frames::RoiBox box;
    if (std::sscanf(s.c_str(), "%zu,%zu,%zu,%zu", &box.x, &box.y, &box.w,
                    &box.h) != 4)
        throw CategorizedError{"usage-error", "bad --roi, expected x,y,w,h", 2};
    return box;
}

int cmd_synth(const std::string& out_dir, rppg::synth::SubjectSpec spec,
              bool dither) {
    auto [seq, truth] = rppg::synth::generate_subject(spec);
    std::filesystem::create_directories(out_dir);
    rppg::frames::save_sequence_png(seq, out_dir, dither, spec.seed);
    rppg::csv::write_signal(
        truth, (std::filesystem::path(out_dir) / "ground_truth.csv").string());
    nlohmann::json j = {{"seed", spec.seed},
                        {"duration_s", spec.duration_s},
                        {"fps", spec.fps},
                        {"frame_side", spec.frame_side},
                        {"hr_start_bpm", spec.hr_start_bpm},
                        {"hr_end_bpm", spec.hr_end_bpm},
                        {"ac_strength", spec.ac_strength},
                        {"channel_ratio", spec.channel_ratio},
                        {"skin_dc", spec.skin_dc},
                        {"dither", dither}};
    rppg::csv::write_file_atomic(
        (std::filesystem::path(out_dir) / "spec.json").string(), j.dump(2) + "\n");
    logline("wrote " + std::to_string(seq.count()) + " frames to " + out_dir);
    return 0;
}

int cmd_extract(const std::string& in_dir, const std::string& method,
                const std::string& roi, double fps,
                const std::string& out_dir) {
    rppg::frames::FrameSequence seq = rppg::frames::load_sequence(in_dir, fps);
    if (!roi.empty()) seq = rppg::frames::crop(seq, parse_roi(roi));
    rppg::extract::ExtractorParams params;
    params.method = rppg::extract::method_from_string(method);
    const rppg::sigproc::Signal sig =
        rppg::extract::run_extractor(rppg::frames::spatial_mean(seq), params);
    std::filesystem::create_directories(out_dir);
    rppg::csv::write_signal(
        sig, (std::filesystem::path(out_dir) / "signal.csv").string());
    const rppg::sigproc::RateTrace rt =
        rppg::sigproc::rate_trace(rppg::sigproc::bandpass(sig));
    rppg::csv::write_rate_trace(
        rt, (std::filesystem::path(out_dir) / "rates.csv").string());
    return 0;
}

struct TrainArgs {
    std::vector<std::string> in_dirs;
    std::size_t synthetic_subjects = 0;
    double duration_s = 20.0;
    double fps = 20.0;
    std::string preset = "tiny";
    std::string method = "pos";
    std::size_t epochs = 3;
    std::size_t batch = 32;
    std::size_t stride = 1;
    std::uint64_t seed = 1;
    std::string out = "model.ckpt";
};

int cmd_train(const TrainArgs& a) {
    std::vector<rppg::nn::Sample> samples;
    auto add_clip = [&](const rppg::frames::FrameSequence& seq) {
        rppg::extract::ExtractorParams params;
        params.method = rppg::extract::method_from_string(a.method);
        const rppg::sigproc::Signal label =
            rppg::extract::make_reference_label(seq, params);
        auto set = rppg::harness::build_training_set(
            rppg::frames::normalized_diff(seq), label, a.stride);
        samples.insert(samples.end(), std::make_move_iterator(set.begin()),
                       std::make_move_iterator(set.end()));
    };
    for (const std::string& dir : a.in_dirs)
        add_clip(rppg::frames::load_sequence(dir, a.fps));
    for (std::size_t i = 0; i < a.synthetic_subjects; ++i) {
        rppg::synth::SubjectSpec spec;
        spec.seed = rppg::harness::derive_seed(a.seed, "subject" + std::to_string(i));
        spec.spatial_texture_seed =
            rppg::harness::derive_seed(a.seed, "texture" + std::to_string(i));
        spec.duration_s = a.duration_s;
        spec.fps = a.fps;
        spec.hr_start_bpm = 62.0 + 2.5 * static_cast<double>(i);
        spec.hr_end_bpm = spec.hr_start_bpm + 8.0;
        add_clip(rppg::synth::generate_subject(spec).first);
    }
    if (samples.empty())
        throw CategorizedError{"usage-error",
                               "no training data: give --in or --synthetic", 2};

    rppg::nn::NetworkConfig config =
        a.preset == "paper" ? rppg::nn::NetworkConfig::paper_preset()
                            : rppg::nn::NetworkConfig::tiny_preset();
    rppg::nn::Network net(config);
    net.init_weights(rppg::harness::derive_seed(a.seed, "init"));
    rppg::nn::TrainOptions opt;
    opt.epochs = a.epochs;
    opt.batch_size = a.batch;
    opt.seed = rppg::harness::derive_seed(a.seed, "train");
    auto [ckpt, report] = rppg::nn::train(net, samples, opt);
    for (std::size_t e = 0; e < report.epoch_loss.size(); ++e)
        logline("epoch " + std::to_string(e) + " loss " +
                std::to_string(report.epoch_loss[e]));
    rppg::nn::save_checkpoint(ckpt, a.out);
    std::cout << "checkpoint " << a.out << " epochs " << report.epochs_run
              << " final_loss " << report.epoch_loss.back() << '\n';
    return 0;
}

int cmd_infer(const std::string& checkpoint, const std::string& in_dir,
              double fps, const std::string& out) {
    const rppg::nn::Network net =
        rppg::nn::load_checkpoint(checkpoint).to_network();
    const rppg::frames::FrameSequence seq =
        rppg::frames::load_sequence(in_dir, fps);
    const rppg::sigproc::Signal pred =
        rppg::nn::predict_clip(net, rppg::frames::normalized_diff(seq));
    rppg::csv::write_signal(pred, out);
    return 0;
}

int cmd_eval(const std::string& pred_path, const std::string& ref_path,
             const std::string& out, bool apply_bandpass) {
    auto rates = [&](const std::string& path) {
        rppg::sigproc::Signal s = rppg::csv::read_signal(path);
        if (apply_bandpass) s = rppg::sigproc::bandpass(s);
        return rppg::sigproc::rate_trace(s);
    };
    rppg::sigproc::RateTrace a = rates(pred_path);
    rppg::sigproc::RateTrace b = rates(ref_path);
    const std::size_t n = std::min(a.rates.size(), b.rates.size());
    a.rates.resize(n);
    a.confidence.resize(n);
    b.rates.resize(n);
    b.confidence.resize(n);
    const double r = rppg::sigproc::rmse(a, b);
    const double acc = rppg::sigproc::accuracy(a, b);
    std::ostringstream ss;
    ss << "rmse_bpm,accuracy_pct,windows\n"
       << rppg::csv::format_double(r) << ',' << rppg::csv::format_double(acc)
       << ',' << n << '\n';
    if (!out.empty()) rppg::csv::write_file_atomic(out, ss.str());
    std::cout << ss.str();
    return 0;
}

int cmd_experiment(const std::string& config_path, const std::string& out_dir,
                   std::uint64_t seed_override, bool has_seed,
                   std::size_t threads_override, bool has_threads) {
    rppg::harness::ExperimentConfig cfg;
    try {
        cfg = rppg::harness::load_config(config_path);
    } catch (const std::runtime_error& e) {
        throw CategorizedError{"config-error", e.what(), 2};
    }
    if (has_seed) cfg.seed = seed_override;
    if (has_threads) cfg.threads = threads_override;
    const rppg::harness::ReportTable table = rppg::harness::run_experiment(cfg);
    std::filesystem::create_directories(out_dir);
    table.write((std::filesystem::path(out_dir) / "report.csv").string(),
                (std::filesystem::path(out_dir) / "summary.csv").string());
    std::cout << table.summary_csv();
    return 0;
}

int cmd_analyze_kernels(const std::string& checkpoint,
                        const std::string& out) {
    const rppg::nn::Network net =
        rppg::nn::load_checkpoint(checkpoint).to_network();
    const rppg::nn::KernelSummary s = rppg::nn::first_layer_channel_sums(net);
    std::ostringstream ss;
    ss << "kernel";
    for (std::size_t c = 0; c < s.channels; ++c) ss << ",sum_ch" << c;
    ss << '\n';
    for (std::size_t k = 0; k < s.kernels; ++k) {
        ss << k;
        for (std::size_t c = 0; c < s.channels; ++c)
            ss << ',' << rppg::csv::format_double(s.sum(k, c));
        ss << '\n';
    }
    ss << "principal_direction";
    for (std::size_t c = 0; c < s.channels; ++c)
        ss << ',' << rppg::csv::format_double(s.principal_direction[c]);
    ss << '\n';
    if (!out.empty()) rppg::csv::write_file_atomic(out, ss.str());
    std::cout << ss.str();
    double norm = 0.0;
    for (double v : s.principal_direction) norm += v * v;
    std::cout << "principal_direction_norm," << rppg::csv::format_double(std::sqrt(norm))
              << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"remote-PPG toolkit: synthesis, extraction, CNN training "
                 "and diagnostics"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic skin video");
    std::string synth_out = "clip";
    rppg::synth::SubjectSpec spec;
    bool dither = false;
    synth->add_option("--out", synth_out, "output directory");
    synth->add_option("--seed", spec.seed, "random seed");
    synth->add_option("--duration", spec.duration_s, "seconds (default 60)");
    synth->add_option("--fps", spec.fps, "frames per second (default 20)");
    synth->add_option("--side", spec.frame_side, "frame side in pixels");
    synth->add_option("--hr-start", spec.hr_start_bpm, "start rate in bpm");
    synth->add_option("--hr-end", spec.hr_end_bpm, "end rate in bpm");
    synth->add_option("--ac", spec.ac_strength, "pulsatile AC/DC amplitude");
    synth->add_flag("--dither", dither, "dither the 8-bit quantization");

    // extract
    auto* extract = app.add_subcommand("extract", "knowledge-based PPG extraction");
    std::string ex_in, ex_method = "pos", ex_roi, ex_out = "extract_out";
    double ex_fps = 20.0;
    extract->add_option("--in", ex_in, "frame directory")->required();
    extract->add_option("--method", ex_method, "pos|chrom|green");
    extract->add_option("--roi", ex_roi, "crop box x,y,w,h");
    extract->add_option("--fps", ex_fps, "frame rate");
    extract->add_option("--out", ex_out, "output directory");

    // train
    auto* train = app.add_subcommand("train", "train the CNN on clips");
    TrainArgs ta;
    train->add_option("--in", ta.in_dirs, "frame directories");
    train->add_option("--synthetic", ta.synthetic_subjects,
                      "number of synthetic subjects");
    train->add_option("--duration", ta.duration_s, "synthetic clip seconds");
    train->add_option("--fps", ta.fps, "frame rate");
    train->add_option("--preset", ta.preset, "tiny|paper");
    train->add_option("--method", ta.method, "label extractor pos|chrom|green");
    train->add_option("--epochs", ta.epochs, "training epochs");
    train->add_option("--batch", ta.batch, "batch size (default 32)");
    train->add_option("--stride", ta.stride, "keep every n-th frame");
    train->add_option("--seed", ta.seed, "random seed");
    train->add_option("--out", ta.out, "checkpoint path");

    // infer
    auto* infer = app.add_subcommand("infer", "predict a PPG signal from frames");
    std::string in_ckpt, in_dir, in_out = "prediction.csv";
    double in_fps = 20.0;
    infer->add_option("--checkpoint", in_ckpt, "checkpoint path")->required();
    infer->add_option("--in", in_dir, "frame directory")->required();
    infer->add_option("--fps", in_fps, "frame rate");
    infer->add_option("--out", in_out, "output signal CSV");

    // eval
    auto* eval = app.add_subcommand("eval", "rate metrics between two signals");
    std::string ev_pred, ev_ref, ev_out;
    bool ev_nobp = false;
    eval->add_option("--pred", ev_pred, "prediction signal CSV")->required();
    eval->add_option("--ref", ev_ref, "reference signal CSV")->required();
    eval->add_option("--out", ev_out, "metrics CSV path");
    eval->add_flag("--no-bandpass", ev_nobp, "skip the 0.7-3 Hz bandpass");

    // experiment
    auto* exp = app.add_subcommand("experiment", "run a diagnostic experiment");
    std::string exp_config, exp_out = "experiment_out";
    std::uint64_t exp_seed = 0;
    std::size_t exp_threads = 0;
    exp->add_option("--config", exp_config, "experiment JSON config")->required();
    exp->add_option("--out", exp_out, "output directory");
    auto* seed_opt = exp->add_option("--seed", exp_seed, "override config seed");
    auto* thr_opt =
        exp->add_option("--threads", exp_threads, "worker threads (1 = "
                        "bit-reproducible reference)");

    // analyze-kernels
    auto* ak = app.add_subcommand("analyze-kernels",
                                  "first-layer channel-sum analysis");
    std::string ak_ckpt, ak_out;
    ak->add_option("--checkpoint", ak_ckpt, "checkpoint path")->required();
    ak->add_option("--out", ak_out, "summary CSV path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*synth) return cmd_synth(synth_out, spec, dither);
        if (*extract) return cmd_extract(ex_in, ex_method, ex_roi, ex_fps, ex_out);
        if (*train) return cmd_train(ta);
        if (*infer) return cmd_infer(in_ckpt, in_dir, in_fps, in_out);
        if (*eval) return cmd_eval(ev_pred, ev_ref, ev_out, !ev_nobp);
        if (*exp)
            return cmd_experiment(exp_config, exp_out, exp_seed,
                                  seed_opt->count() > 0, exp_threads,
                                  thr_opt->count() > 0);
        if (*ak) return cmd_analyze_kernels(ak_ckpt, ak_out);
    } catch (const CategorizedError& e) {
        std::cerr << "error:" << e.category << ": " << e.message << '\n';
        return e.exit_code;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error:invalid-argument: " << e.what() << '\n';
        return 4;
    } catch (const std::runtime_error& e) {
        std::cerr << "error:io-error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error:internal: " << e.what() << '\n';
        return 5;
    }
    return 0;
}
