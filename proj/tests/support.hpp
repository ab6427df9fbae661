#pragma once

#include "evsizer/cycle.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace testing {

inline std::filesystem::path data_path(const std::string& name) {
    return std::filesystem::path(EVSIZER_DATA_DIR) / name;
}

inline const evsizer::DriveCycle& wltc() {
    static const evsizer::DriveCycle cycle =
        evsizer::load_cycle(data_path("wltc_class3b.csv"), evsizer::SpeedUnit::KilometersPerHour);
    return cycle;
}

// Fresh scratch directory under the build tree, removed first if present.
inline std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::path(EVSIZER_SCRATCH_DIR) / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

inline bool rel_close(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

} // namespace testing
