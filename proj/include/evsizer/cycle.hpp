#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

namespace evsizer {

enum class SpeedUnit { MetersPerSecond, KilometersPerHour };

/// One sample of a speed trace. `a` is the forward difference to the next sample.
struct CyclePoint {
    double t = 0.0; // s
    double v = 0.0; // m/s
    double a = 0.0; // m/s^2
};

/// Immutable speed trace with derived acceleration.
///
/// Invariants: at least two points, strictly increasing time, non-negative speed,
/// `a[i] = (v[i+1] - v[i]) / (t[i+1] - t[i])` and `a` of the last sample is 0.
class DriveCycle {
public:
    /// Builds a cycle from (t, v) samples in SI units. Throws ValidationError.
    DriveCycle(std::string name, const std::vector<double>& t, const std::vector<double>& v);

    const std::string& name() const noexcept { return name_; }
    const std::vector<CyclePoint>& points() const noexcept { return points_; }
    std::size_t size() const noexcept { return points_.size(); }
    double duration() const noexcept { return points_.back().t - points_.front().t; }

    /// Trapezoidal integral of speed over time, in meters.
    double distance() const noexcept;
    /// Step size when the grid is uniform (within 1e-9 s), 0 otherwise.
    double uniform_step() const noexcept;

private:
    std::string name_;
    std::vector<CyclePoint> points_;
};

/// Parses two-column `time,speed` text. Comma or whitespace delimited, `#` lines
/// ignored, one optional header line before the first record.
DriveCycle parse_cycle(std::istream& in, SpeedUnit unit, std::string name = "cycle");

/// Reads a cycle file; throws IoError if it cannot be opened.
DriveCycle load_cycle(const std::filesystem::path& path, SpeedUnit unit);

/// Linear interpolation of speed onto t0, t0 + dt, ... <= t_end.
DriveCycle resample(const DriveCycle& cycle, double dt);

} // namespace evsizer
