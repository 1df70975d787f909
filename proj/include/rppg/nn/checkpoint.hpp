#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rppg/nn/network.hpp"

namespace rppg::nn {

constexpr int kCheckpointFormatVersion = 1;

/// Serialized trained network: a UTF-8 JSON header line describing the
/// architecture and parameter layout, followed by raw little-endian
/// 32-bit float blobs in the declared order.
struct Checkpoint {
    NetworkConfig config;
    std::vector<Param> params;
    std::uint64_t rng_seed = 0;
    int format_version = kCheckpointFormatVersion;

    static Checkpoint from_network(const Network& net, std::uint64_t seed) {
        return Checkpoint{net.config(), net.params(), seed,
                          kCheckpointFormatVersion};
    }

    Network to_network() const {
        Network net(config);
        if (net.params().size() != params.size())
            throw std::runtime_error("checkpoint: parameter count does not "
                                     "match config");
        for (std::size_t i = 0; i < params.size(); ++i) {
            if (net.params()[i].value.shape() != params[i].value.shape())
                throw std::runtime_error("checkpoint: shape mismatch on " +
                                         params[i].name);
            net.params()[i].value = params[i].value;
        }
        return net;
    }
};

namespace detail {

inline nlohmann::json config_to_json(const NetworkConfig& c) {
    return {{"conv_channels", c.conv_channels},
            {"kernel_size", c.kernel_size},
            {"dropout_rate", c.dropout_rate},
            {"fc_hidden", c.fc_hidden},
            {"input_side", c.input_side},
            {"input_channels", c.input_channels}};
}

inline NetworkConfig config_from_json(const nlohmann::json& j) {
    NetworkConfig c;
    c.conv_channels = j.at("conv_channels").get<std::vector<std::size_t>>();
    c.kernel_size = j.at("kernel_size").get<std::size_t>();
    c.dropout_rate = j.at("dropout_rate").get<double>();
    c.fc_hidden = j.at("fc_hidden").get<std::size_t>();
    c.input_side = j.at("input_side").get<std::size_t>();
    c.input_channels = j.at("input_channels").get<std::size_t>();
    return c;
}

} // namespace detail

inline void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
    nlohmann::json header;
    header["format_version"] = ckpt.format_version;
    header["config"] = detail::config_to_json(ckpt.config);
    header["seed"] = ckpt.rng_seed;
    nlohmann::json plist = nlohmann::json::array();
    for (const Param& p : ckpt.params)
        plist.push_back({{"name", p.name}, {"shape", p.value.shape()}});
    header["params"] = plist;

    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open for write: " + tmp);
        out << header.dump() << '\n';
        for (const Param& p : ckpt.params) {
            std::vector<float> buf(p.value.size());
            for (std::size_t i = 0; i < buf.size(); ++i)
                buf[i] = static_cast<float>(p.value[i]);
            out.write(reinterpret_cast<const char*>(buf.data()),
                      static_cast<std::streamsize>(buf.size() * sizeof(float)));
        }
        if (!out) throw std::runtime_error("write failed: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

inline Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("checkpoint header missing: " + path);
    nlohmann::json header = nlohmann::json::parse(line);

    Checkpoint ckpt;
    ckpt.format_version = header.at("format_version").get<int>();
    if (ckpt.format_version != kCheckpointFormatVersion)
        throw std::runtime_error("unsupported checkpoint format version " +
                                 std::to_string(ckpt.format_version));
    ckpt.config = detail::config_from_json(header.at("config"));
    ckpt.rng_seed = header.at("seed").get<std::uint64_t>();
    for (const auto& pj : header.at("params")) {
        Param p;
        p.name = pj.at("name").get<std::string>();
        auto shape = pj.at("shape").get<std::vector<std::size_t>>();
        p.value = Tensor(shape);
        std::vector<float> buf(p.value.size());
        in.read(reinterpret_cast<char*>(buf.data()),
                static_cast<std::streamsize>(buf.size() * sizeof(float)));
        if (!in)
            throw std::runtime_error("checkpoint truncated at " + p.name);
        for (std::size_t i = 0; i < buf.size(); ++i)
            p.value[i] = static_cast<double>(buf[i]);
        ckpt.params.push_back(std::move(p));
    }
    return ckpt;
}

} // namespace rppg::nn
