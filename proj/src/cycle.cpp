#include "evsizer/cycle.hpp"

#include "evsizer/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace evsizer {

namespace {

constexpr double kKmhToMs = 1.0 / 3.6;

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

// Comma-delimited when the line has a comma, whitespace-delimited otherwise.
std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    if (line.find(',') != std::string::npos) {
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) out.push_back(trim(field));
        if (line.back() == ',') out.emplace_back();
        return out;
    }
    std::istringstream ss(line);
    std::string field;
    while (ss >> field) out.push_back(field);
    return out;
}

bool parse_number(const std::string& field, double& out) {
    if (field.empty()) return false;
    const char* begin = field.data();
    const char* end = begin + field.size();
    if (*begin == '+') ++begin;
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc{} && ptr == end && std::isfinite(out);
}

} // namespace

DriveCycle::DriveCycle(std::string name, const std::vector<double>& t, const std::vector<double>& v)
    : name_(std::move(name)) {
    if (t.size() != v.size()) throw ValidationError("time and speed columns differ in length");
    if (t.size() < 2) throw ValidationError("a drive cycle needs at least 2 samples");
    points_.reserve(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(v[i] >= 0.0)) {
            throw ValidationError("negative speed at t=" + std::to_string(t[i]) + " s");
        }
        if (i > 0 && !(t[i] > t[i - 1])) {
            throw ValidationError("time not strictly increasing at t=" + std::to_string(t[i]) + " s");
        }
        points_.push_back({t[i], v[i], 0.0});
    }
    for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
        points_[i].a = (points_[i + 1].v - points_[i].v) / (points_[i + 1].t - points_[i].t);
    }
    points_.back().a = 0.0;
}

double DriveCycle::distance() const noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
        s += 0.5 * (points_[i].v + points_[i + 1].v) * (points_[i + 1].t - points_[i].t);
    }
    return s;
}

double DriveCycle::uniform_step() const noexcept {
    const double dt = points_[1].t - points_[0].t;
    for (std::size_t i = 1; i + 1 < points_.size(); ++i) {
        if (std::abs((points_[i + 1].t - points_[i].t) - dt) > 1e-9) return 0.0;
    }
    return dt;
}

DriveCycle parse_cycle(std::istream& in, SpeedUnit unit, std::string name) {
    std::vector<double> t;
    std::vector<double> v;
    std::string raw;
    int line_no = 0;
    bool header_allowed = true;
    while (std::getline(in, raw)) {
        ++line_no;
        if (line_no == 1 && raw.size() >= 3 && static_cast<unsigned char>(raw[0]) == 0xEF &&
            static_cast<unsigned char>(raw[1]) == 0xBB && static_cast<unsigned char>(raw[2]) == 0xBF) {
            raw.erase(0, 3);
        }
        const std::string line = trim(raw);
        if (line.empty() || line.front() == '#') continue;

        const auto fields = split_fields(line);
        double time = 0.0;
        double speed = 0.0;
        const bool numeric = fields.size() == 2 && parse_number(fields[0], time) && parse_number(fields[1], speed);
        if (!numeric) {
            const bool looks_like_header =
                header_allowed && !fields.empty() && !fields[0].empty() &&
                !(std::isdigit(static_cast<unsigned char>(fields[0][0])) || fields[0][0] == '-' ||
                  fields[0][0] == '+' || fields[0][0] == '.');
            if (looks_like_header) {
                header_allowed = false;
                continue;
            }
            throw ParseError("expected two numeric fields (time, speed), got '" + line + "'", line_no);
        }
        header_allowed = false;
        if (speed < 0.0) {
            throw ValidationError("negative speed on line " + std::to_string(line_no));
        }
        if (!t.empty() && !(time > t.back())) {
            throw ValidationError("time not strictly increasing on line " + std::to_string(line_no));
        }
        t.push_back(time);
        v.push_back(unit == SpeedUnit::KilometersPerHour ? speed * kKmhToMs : speed);
    }
    return DriveCycle(std::move(name), t, v);
}

DriveCycle load_cycle(const std::filesystem::path& path, SpeedUnit unit) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open cycle file " + path.string());
    return parse_cycle(in, unit, path.stem().string());
}

DriveCycle resample(const DriveCycle& cycle, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ArgumentError("resample step must be positive");
    const auto& pts = cycle.points();
    const double t0 = pts.front().t;
    const auto steps = static_cast<std::size_t>(std::floor(cycle.duration() / dt + 1e-9));
    if (steps < 1) throw ArgumentError("resample step exceeds the cycle duration");

    std::vector<double> t(steps + 1);
    std::vector<double> v(steps + 1);
    std::size_t j = 0;
    for (std::size_t k = 0; k <= steps; ++k) {
        const double tk = t0 + static_cast<double>(k) * dt;
        while (j + 2 < pts.size() && pts[j + 1].t <= tk) ++j;
        const auto& lo = pts[j];
        const auto& hi = pts[j + 1];
        double vk;
        if (tk <= lo.t) {
            vk = lo.v;
        } else if (tk >= hi.t) {
            vk = hi.v;
        } else {
            vk = lo.v + (hi.v - lo.v) * ((tk - lo.t) / (hi.t - lo.t));
        }
        t[k] = tk;
        v[k] = std::max(vk, 0.0);
    }
    return DriveCycle(cycle.name(), t, v);
}

} // namespace evsizer
