#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rppg/nn/network.hpp"

namespace rppg::harness {

enum class Experiment { E1, E2, E3, E4 };

inline Experiment experiment_from_string(const std::string& s) {
    if (s == "E1" || s == "e1") return Experiment::E1;
    if (s == "E2" || s == "e2") return Experiment::E2;
    if (s == "E3" || s == "e3") return Experiment::E3;
    if (s == "E4" || s == "e4") return Experiment::E4;
    throw std::invalid_argument("unknown experiment: " + s);
}

inline const char* to_string(Experiment e) {
    switch (e) {
        case Experiment::E1: return "E1";
        case Experiment::E2: return "E2";
        case Experiment::E3: return "E3";
        case Experiment::E4: return "E4";
    }
    return "?";
}

/// One experiment run, fully determined by this struct plus the seed.
/// Desk-scale defaults keep a full experiment in the minutes range on one
/// CPU core; synthetic subjects stand in for the private datasets.
struct ExperimentConfig {
    Experiment experiment = Experiment::E1;
    std::uint64_t seed = 1;
    std::size_t folds = 5;
    // Contiguous subject folds by default; seeded shuffling on request.
    bool shuffle_folds = false;
    std::string net_preset = "tiny"; // tiny | paper
    std::size_t epochs = 3;
    std::size_t batch_size = 32;
    std::size_t train_stride = 2; // keep every n-th difference frame
    double dropout_rate = 0.25;
    std::size_t threads = 1;

    // Synthetic dataset layout.
    std::size_t subjects = 10;
    double duration_s = 20.0;
    double fps = 20.0;
    double ac_strength = 0.02;
    double hr_start_bpm = 62.0;
    double hr_step_bpm = 2.5; // per subject
    double hr_drift_bpm = 8.0;

    // Optional user data: directories of frame_%06d.png, one per subject.
    std::vector<std::string> dataset_dirs;

    // Distortion model shared by E1/E2/E4: Gaussian intensity noise during
    // training, periodic (1.67 Hz) intensity noise during testing.
    double train_noise_gain = 0.10;
    double test_noise_gain = 0.05;
    double periodic_noise_hz = 1.67;
    // E1 uses a channel-skewed distortion; E2/E4 keep the [1,1,1] default.
    std::array<double, 3> noise_channel_gain = {0.3, 0.2, 1.0};

    // E2 settings.
    std::vector<double> phase_degrees = {0, 30, 60, 90, 120, 150, 180};
    double transit_delay_s = 0.25;
    bool label_bandpass = true;

    // E3 settings.
    std::vector<std::size_t> resolutions = {1, 4, 8, 20, 30, 40, 50, 64};

    nn::NetworkConfig make_net_config(std::size_t channels) const {
        nn::NetworkConfig c = net_preset == "paper"
                                  ? nn::NetworkConfig::paper_preset(channels)
                                  : nn::NetworkConfig::tiny_preset(channels);
        c.dropout_rate = dropout_rate;
        return c;
    }

    void validate() const {
        if (folds < 2) throw std::invalid_argument("config: folds >= 2");
        const std::size_t n =
            dataset_dirs.empty() ? subjects : dataset_dirs.size();
        if (n < folds)
            throw std::invalid_argument("config: need at least `folds` subjects");
        if (net_preset != "tiny" && net_preset != "paper")
            throw std::invalid_argument("config: net_preset must be tiny|paper");
        if (train_stride < 1)
            throw std::invalid_argument("config: train_stride >= 1");
        if (duration_s * fps < 257.0 + 1.0)
            throw std::invalid_argument(
                "config: clips must yield >= 257 difference frames for the "
                "256-sample rate window");
    }
};

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    c.experiment = experiment_from_string(j.at("experiment").get<std::string>());
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("folds")) c.folds = j["folds"].get<std::size_t>();
    if (j.contains("shuffle_folds"))
        c.shuffle_folds = j["shuffle_folds"].get<bool>();
    if (j.contains("net_preset")) c.net_preset = j["net_preset"];
    if (j.contains("epochs")) c.epochs = j["epochs"].get<std::size_t>();
    if (j.contains("batch_size"))
        c.batch_size = j["batch_size"].get<std::size_t>();
    if (j.contains("train_stride"))
        c.train_stride = j["train_stride"].get<std::size_t>();
    if (j.contains("dropout_rate"))
        c.dropout_rate = j["dropout_rate"].get<double>();
    if (j.contains("threads")) c.threads = j["threads"].get<std::size_t>();
    if (j.contains("subjects")) c.subjects = j["subjects"].get<std::size_t>();
    if (j.contains("duration_s")) c.duration_s = j["duration_s"].get<double>();
    if (j.contains("fps")) c.fps = j["fps"].get<double>();
    if (j.contains("ac_strength"))
        c.ac_strength = j["ac_strength"].get<double>();
    if (j.contains("hr_start_bpm"))
        c.hr_start_bpm = j["hr_start_bpm"].get<double>();
    if (j.contains("hr_step_bpm"))
        c.hr_step_bpm = j["hr_step_bpm"].get<double>();
    if (j.contains("hr_drift_bpm"))
        c.hr_drift_bpm = j["hr_drift_bpm"].get<double>();
    if (j.contains("dataset_dirs"))
        c.dataset_dirs = j["dataset_dirs"].get<std::vector<std::string>>();
    if (j.contains("train_noise_gain"))
        c.train_noise_gain = j["train_noise_gain"].get<double>();
    if (j.contains("test_noise_gain"))
        c.test_noise_gain = j["test_noise_gain"].get<double>();
    if (j.contains("periodic_noise_hz"))
        c.periodic_noise_hz = j["periodic_noise_hz"].get<double>();
    if (j.contains("noise_channel_gain")) {
        auto v = j["noise_channel_gain"].get<std::vector<double>>();
        if (v.size() != 3)
            throw std::invalid_argument("config: noise_channel_gain needs 3 "
                                        "entries");
        c.noise_channel_gain = {v[0], v[1], v[2]};
    }
    if (j.contains("phase_degrees"))
        c.phase_degrees = j["phase_degrees"].get<std::vector<double>>();
    if (j.contains("transit_delay_s"))
        c.transit_delay_s = j["transit_delay_s"].get<double>();
    if (j.contains("label_bandpass"))
        c.label_bandpass = j["label_bandpass"].get<bool>();
    if (j.contains("resolutions"))
        c.resolutions = j["resolutions"].get<std::vector<std::size_t>>();
    c.validate();
    return c;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error("config parse error in " + path + ": " +
                                 e.what());
    }
    return config_from_json(j);
}

} // namespace rppg::harness
