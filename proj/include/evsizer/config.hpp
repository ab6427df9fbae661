#pragma once

#include "evsizer/bayesopt.hpp"
#include "evsizer/cycle.hpp"
#include "evsizer/design.hpp"
#include "evsizer/motor.hpp"
#include "evsizer/sim.hpp"
#include "evsizer/vehicle.hpp"

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace evsizer {

/// Where an effective config value came from.
enum class ValueSource { Paper, Default, User };
std::string_view to_string(ValueSource source);

enum class StudyMode { Proportional, Combined, Both };

/// Everything a study needs. Text form is flat `section.key = value` lines.
struct RunConfig {
    VehicleParams vehicle;
    ReferenceMachine reference;
    PerformanceSpec spec;
    DesignBounds bounds;

    StudyMode mode = StudyMode::Both;
    std::size_t iterations = 50;
    std::vector<std::uint64_t> seeds{1, 2, 3};
    std::string cycle_path = "data/wltc_class3b.csv";
    SpeedUnit speed_unit = SpeedUnit::KilometersPerHour;
    double dt = 1.0;
    std::string output_dir = "runs";
    bool trace = false;
    bool concurrent_seeds = false;

    BoOptions solver;

    /// Effective source of every known key, in registry order.
    std::map<std::string, ValueSource> sources;

    std::vector<ScalingMode> modes() const;
    /// Throws ConfigError on values that are well-formed but unusable.
    void validate() const;
};

struct ConfigReport {
    std::vector<std::string> unknown_keys;
    std::vector<std::string> missing_keys; // filled with defaults
    std::vector<std::string> warnings;     // e.g. bounds wider than the published ones
    std::vector<std::string> errors;       // "field: message"
    bool clean() const noexcept { return unknown_keys.empty() && warnings.empty() && errors.empty(); }
    std::string to_text() const;
};

/// All keys the config understands, in snapshot order.
const std::vector<std::string>& config_keys();

/// Built-in config: published values where they exist, documented defaults elsewhere.
RunConfig default_config();

/// Applies one `key = value` assignment; marks the key's source. Throws ConfigError.
void set_config_value(RunConfig& config, std::string_view key, std::string_view value);
std::string get_config_value(const RunConfig& config, std::string_view key);

/// Parses config text on top of the defaults and records problems in `report`
/// instead of throwing.
RunConfig parse_config(std::istream& in, ConfigReport& report);

/// Parses a config file; throws IoError when unreadable and ConfigError on the
/// first schema violation or unknown key.
RunConfig load_config(const std::filesystem::path& path);

/// Lists unknown/missing keys and bound warnings; throws IoError when unreadable.
ConfigReport validate_config(const std::filesystem::path& path);

/// Full effective config with a source tag per value.
std::string config_snapshot(const RunConfig& config);

} // namespace evsizer
