#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rppg/sigproc.hpp"

namespace rppg::csv {

/// Writes content atomically: temp file in the same directory + rename,
/// so interrupted runs never leave partial files.
inline void write_file_atomic(const std::string& path,
                              const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    const fs::path tmp = target.parent_path() /
                         (target.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for write: " +
                                           tmp.string());
        out << content;
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, target);
}

inline std::string format_double(double v) {
    std::ostringstream ss;
    ss << std::setprecision(17) << v;
    return ss.str();
}

inline void write_signal(const sigproc::Signal& x, const std::string& path) {
    std::ostringstream ss;
    ss << "t_seconds,value\n";
    for (std::size_t i = 0; i < x.size(); ++i)
        ss << format_double(static_cast<double>(i) / x.fs) << ','
           << format_double(x.samples[i]) << '\n';
    write_file_atomic(path, ss.str());
}

inline sigproc::Signal read_signal(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("t_seconds,", 0) != 0)
        throw std::runtime_error("bad signal CSV header in: " + path);
    std::vector<double> t, v;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("bad signal CSV row in: " + path);
        t.push_back(std::stod(line.substr(0, comma)));
        v.push_back(std::stod(line.substr(comma + 1)));
    }
    if (v.size() < 2) throw std::runtime_error("signal CSV too short: " + path);
    const double fs = 1.0 / (t[1] - t[0]);
    return sigproc::Signal{std::move(v), fs};
}

inline void write_rate_trace(const sigproc::RateTrace& t,
                             const std::string& path) {
    std::ostringstream ss;
    ss << "window_start_index,rate_bpm,confidence\n";
    for (std::size_t i = 0; i < t.rates.size(); ++i)
        ss << (t.start_offset + i) << ',' << format_double(t.rates[i]) << ','
           << format_double(t.confidence[i]) << '\n';
    write_file_atomic(path, ss.str());
}

} // namespace rppg::csv
