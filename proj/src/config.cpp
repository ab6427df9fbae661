#include "evsizer/config.hpp"

#include "evsizer/errors.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace evsizer {

using detail::format_number;
using detail::trim_view;

std::string_view to_string(ValueSource source) {
    switch (source) {
    case ValueSource::Paper: return "paper";
    case ValueSource::Default: return "default";
    case ValueSource::User: return "user";
    }
    return "default";
}

namespace {

struct KeySpec {
    std::string key;
    bool published = false; // value comes from the reference study's parameter table
    std::function<void(RunConfig&, std::string_view)> set;
    std::function<std::string(const RunConfig&)> get;
};

double to_number(std::string_view key, std::string_view text) {
    auto v = detail::parse_double(text);
    if (!v) throw ConfigError(std::string(key), "expected a number, got '" + std::string(trim_view(text)) + "'");
    return *v;
}

bool to_bool(std::string_view key, std::string_view text) {
    const auto t = trim_view(text);
    if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
    if (t == "false" || t == "0" || t == "no" || t == "off") return false;
    throw ConfigError(std::string(key), "expected true/false, got '" + std::string(t) + "'");
}

std::size_t to_count(std::string_view key, std::string_view text) {
    auto v = detail::parse_unsigned(text);
    if (!v) throw ConfigError(std::string(key), "expected a non-negative integer, got '" + std::string(trim_view(text)) + "'");
    return static_cast<std::size_t>(*v);
}

Interval to_interval(std::string_view key, std::string_view text) {
    const auto comma = text.find(',');
    if (comma == std::string_view::npos) throw ConfigError(std::string(key), "expected 'lo, hi'");
    Interval out{to_number(key, text.substr(0, comma)), to_number(key, text.substr(comma + 1))};
    if (!(out.lo <= out.hi)) throw ConfigError(std::string(key), "lower bound exceeds upper bound");
    return out;
}

std::string from_interval(const Interval& i) { return format_number(i.lo) + ", " + format_number(i.hi); }

std::string_view study_mode_name(StudyMode m) {
    switch (m) {
    case StudyMode::Proportional: return "proportional";
    case StudyMode::Combined: return "combined";
    case StudyMode::Both: return "both";
    }
    return "both";
}

#define EVS_NUM(KEY, PUB, FIELD)                                                                     \
    KeySpec {                                                                                         \
        KEY, PUB, [](RunConfig& c, std::string_view v) { c.FIELD = to_number(KEY, v); },              \
            [](const RunConfig& c) { return format_number(c.FIELD); }                                 \
    }

#define EVS_KMH(KEY, PUB, FIELD)                                                                     \
    KeySpec {                                                                                         \
        KEY, PUB, [](RunConfig& c, std::string_view v) { c.FIELD = to_number(KEY, v) / 3.6; },        \
            [](const RunConfig& c) { return format_number(c.FIELD * 3.6); }                           \
    }

#define EVS_BOUND(KEY, FIELD)                                                                        \
    KeySpec {                                                                                         \
        KEY, true, [](RunConfig& c, std::string_view v) { c.bounds.FIELD = to_interval(KEY, v); },    \
            [](const RunConfig& c) { return from_interval(c.bounds.FIELD); }                          \
    }

const std::vector<KeySpec>& registry() {
    static const std::vector<KeySpec> keys = {
        EVS_NUM("vehicle.m_v", true, vehicle.m_v),
        EVS_NUM("vehicle.r_w", true, vehicle.r_w),
        EVS_NUM("vehicle.rho_a", true, vehicle.rho_a),
        EVS_NUM("vehicle.c_d", true, vehicle.c_d),
        EVS_NUM("vehicle.A_f", true, vehicle.A_f),
        EVS_NUM("vehicle.c_r", false, vehicle.c_r),
        EVS_NUM("vehicle.g", true, vehicle.g),
        EVS_NUM("vehicle.eta_g", true, vehicle.eta_g),
        KeySpec{"vehicle.regen_enabled", false,
                [](RunConfig& c, std::string_view v) { c.vehicle.regen_enabled = to_bool("vehicle.regen_enabled", v); },
                [](const RunConfig& c) { return std::string(c.vehicle.regen_enabled ? "true" : "false"); }},

        EVS_NUM("reference.d_mw0", false, reference.d_mw0),
        EVS_NUM("reference.d_ml0", false, reference.d_ml0),
        EVS_NUM("reference.d_sd0", false, reference.d_sd0),
        EVS_NUM("reference.d_tw0", false, reference.d_tw0),
        EVS_NUM("reference.T_max0", false, reference.T_max0),
        EVS_NUM("reference.w_base0", false, reference.w_base0),
        EVS_NUM("reference.w_max0", false, reference.w_max0),
        EVS_NUM("reference.c_cu", false, reference.c_cu),
        EVS_NUM("reference.c_hys", false, reference.c_hys),
        EVS_NUM("reference.c_eddy", false, reference.c_eddy),
        EVS_NUM("reference.c_mech", false, reference.c_mech),
        EVS_NUM("reference.c_g", false, reference.c_g),
        EVS_NUM("reference.f_t", false, reference.f_t),
        EVS_NUM("reference.b_sat", false, reference.b_sat),
        EVS_NUM("reference.c_ew", false, reference.c_ew),

        EVS_KMH("spec.v_max_kmh", true, spec.v_max),
        EVS_KMH("spec.v_acc_kmh", true, spec.v_acc),
        EVS_NUM("spec.t_acc", true, spec.t_acc),
        EVS_NUM("spec.alpha_max", true, spec.alpha_max),
        EVS_KMH("spec.v_grade_kmh", false, spec.v_grade),
        EVS_NUM("spec.dt_acc", false, spec.dt_acc),
        EVS_NUM("spec.t_acc_cap", false, spec.t_acc_cap),

        EVS_BOUND("bounds.k_ax", k_ax),
        EVS_BOUND("bounds.k_rad", k_rad),
        EVS_BOUND("bounds.k_mw", k_mw),
        EVS_BOUND("bounds.k_ml", k_ml),
        EVS_BOUND("bounds.k_sd", k_sd),
        EVS_BOUND("bounds.k_tw", k_tw),
        EVS_BOUND("bounds.gamma", gamma),

        KeySpec{"run.mode", false,
                [](RunConfig& c, std::string_view v) {
                    const auto t = trim_view(v);
                    if (t == "proportional") c.mode = StudyMode::Proportional;
                    else if (t == "combined") c.mode = StudyMode::Combined;
                    else if (t == "both") c.mode = StudyMode::Both;
                    else throw ConfigError("run.mode", "expected proportional, combined or both");
                },
                [](const RunConfig& c) { return std::string(study_mode_name(c.mode)); }},
        KeySpec{"run.iterations", true,
                [](RunConfig& c, std::string_view v) { c.iterations = to_count("run.iterations", v); },
                [](const RunConfig& c) { return std::to_string(c.iterations); }},
        KeySpec{"run.seeds", false,
                [](RunConfig& c, std::string_view v) {
                    std::vector<std::uint64_t> seeds;
                    std::string text(v);
                    std::stringstream ss(text);
                    std::string item;
                    while (std::getline(ss, item, ',')) {
                        auto s = detail::parse_unsigned(item);
                        if (!s) throw ConfigError("run.seeds", "expected comma-separated non-negative integers");
                        seeds.push_back(*s);
                    }
                    if (seeds.empty()) throw ConfigError("run.seeds", "at least one seed required");
                    c.seeds = std::move(seeds);
                },
                [](const RunConfig& c) {
                    std::string out;
                    for (std::size_t i = 0; i < c.seeds.size(); ++i) {
                        if (i) out += ",";
                        out += std::to_string(c.seeds[i]);
                    }
                    return out;
                }},
        KeySpec{"run.cycle", false, [](RunConfig& c, std::string_view v) { c.cycle_path = std::string(trim_view(v)); },
                [](const RunConfig& c) { return c.cycle_path; }},
        KeySpec{"run.speed_unit", false,
                [](RunConfig& c, std::string_view v) {
                    const auto t = trim_view(v);
                    if (t == "kmh") c.speed_unit = SpeedUnit::KilometersPerHour;
                    else if (t == "ms") c.speed_unit = SpeedUnit::MetersPerSecond;
                    else throw ConfigError("run.speed_unit", "expected kmh or ms");
                },
                [](const RunConfig& c) {
                    return std::string(c.speed_unit == SpeedUnit::KilometersPerHour ? "kmh" : "ms");
                }},
        EVS_NUM("run.dt", false, dt),
        KeySpec{"run.output", false, [](RunConfig& c, std::string_view v) { c.output_dir = std::string(trim_view(v)); },
                [](const RunConfig& c) { return c.output_dir; }},
        KeySpec{"run.trace", false, [](RunConfig& c, std::string_view v) { c.trace = to_bool("run.trace", v); },
                [](const RunConfig& c) { return std::string(c.trace ? "true" : "false"); }},
        KeySpec{"run.concurrent_seeds", false,
                [](RunConfig& c, std::string_view v) { c.concurrent_seeds = to_bool("run.concurrent_seeds", v); },
                [](const RunConfig& c) { return std::string(c.concurrent_seeds ? "true" : "false"); }},

        KeySpec{"solver.n_init", false,
                [](RunConfig& c, std::string_view v) { c.solver.n_init = to_count("solver.n_init", v); },
                [](const RunConfig& c) { return std::to_string(c.solver.n_init); }},
        KeySpec{"solver.candidates", false,
                [](RunConfig& c, std::string_view v) { c.solver.candidates = to_count("solver.candidates", v); },
                [](const RunConfig& c) { return std::to_string(c.solver.candidates); }},
        KeySpec{"solver.local_candidates", false,
                [](RunConfig& c, std::string_view v) {
                    c.solver.local_candidates = to_count("solver.local_candidates", v);
                },
                [](const RunConfig& c) { return std::to_string(c.solver.local_candidates); }},
        KeySpec{"solver.refine_starts", false,
                [](RunConfig& c, std::string_view v) { c.solver.refine_starts = to_count("solver.refine_starts", v); },
                [](const RunConfig& c) { return std::to_string(c.solver.refine_starts); }},
        EVS_NUM("solver.penalty_fallback", false, solver.penalty_fallback),
        KeySpec{"solver.threads", false,
                [](RunConfig& c, std::string_view v) {
                    c.solver.threads = static_cast<unsigned>(std::max<std::size_t>(1, to_count("solver.threads", v)));
                },
                [](const RunConfig& c) { return std::to_string(c.solver.threads); }},
    };
    return keys;
}

#undef EVS_NUM
#undef EVS_KMH
#undef EVS_BOUND

const KeySpec* find_key(std::string_view key) {
    for (const auto& k : registry()) {
        if (k.key == key) return &k;
    }
    return nullptr;
}

void bound_warnings(const RunConfig& c, std::vector<std::string>& out) {
    const DesignBounds published;
    const auto names = DesignVector::coordinate_names(ScalingMode::Combined);
    const auto have = c.bounds.as_array();
    const auto ref = published.as_array();
    for (std::size_t i = 0; i < have.size(); ++i) {
        if (have[i].lo < ref[i].lo) {
            out.push_back("bounds." + names[i] + ": lower bound " + format_number(have[i].lo) +
                          " exceeds paper bound " + format_number(ref[i].lo));
        }
        if (have[i].hi > ref[i].hi) {
            out.push_back("bounds." + names[i] + ": upper bound " + format_number(have[i].hi) +
                          " exceeds paper bound " + format_number(ref[i].hi));
        }
    }
}

} // namespace

std::vector<ScalingMode> RunConfig::modes() const {
    switch (mode) {
    case StudyMode::Proportional: return {ScalingMode::Proportional};
    case StudyMode::Combined: return {ScalingMode::Combined};
    case StudyMode::Both: return {ScalingMode::Proportional, ScalingMode::Combined};
    }
    return {};
}

void RunConfig::validate() const {
    auto wrap = [](const std::function<void()>& f) {
        try {
            f();
        } catch (const ValidationError& e) {
            const std::string what = e.what();
            throw ConfigError(what.substr(0, what.find(' ')), what);
        }
    };
    wrap([&] { vehicle.validate(); });
    wrap([&] { reference.validate(); });
    wrap([&] { spec.validate(); });
    if (iterations < 1) throw ConfigError("run.iterations", "must be >= 1");
    if (!(dt > 0.0)) throw ConfigError("run.dt", "must be > 0");
    if (seeds.empty()) throw ConfigError("run.seeds", "at least one seed required");
    if (solver.candidates < 1) throw ConfigError("solver.candidates", "must be >= 1");
    if (!(bounds.k_ax.lo > 0.0) || !(bounds.k_rad.lo > 0.0) || !(bounds.k_mw.lo > 0.0) || !(bounds.k_ml.lo > 0.0) ||
        !(bounds.k_sd.lo > 0.0) || !(bounds.k_tw.lo > 0.0)) {
        throw ConfigError("bounds", "scaling factors must stay positive");
    }
    if (!(bounds.gamma.lo > 0.0)) throw ConfigError("bounds.gamma", "gear ratio must stay positive");
    if (!(reference.f_t * bounds.k_tw.hi < 1.0)) {
        throw ConfigError("bounds.k_tw", "upper bound leaves no slot width (f_t * k_tw >= 1)");
    }
}

std::string ConfigReport::to_text() const {
    std::ostringstream out;
    for (const auto& k : unknown_keys) out << "unknown key: " << k << '\n';
    for (const auto& k : missing_keys) out << "missing key (default used): " << k << '\n';
    for (const auto& w : warnings) out << "warning: " << w << '\n';
    for (const auto& e : errors) out << "error: " << e << '\n';
    out << (clean() ? "config clean" : "config has problems") << '\n';
    return out.str();
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> out;
        for (const auto& k : registry()) out.push_back(k.key);
        return out;
    }();
    return keys;
}

RunConfig default_config() {
    RunConfig c;
    for (const auto& k : registry()) c.sources[k.key] = k.published ? ValueSource::Paper : ValueSource::Default;
    return c;
}

void set_config_value(RunConfig& config, std::string_view key, std::string_view value) {
    const KeySpec* spec = find_key(key);
    if (!spec) throw ConfigError(std::string(key), "unknown key");
    const RunConfig builtin = default_config();
    spec->set(config, value);
    const bool unchanged = spec->get(config) == spec->get(builtin);
    config.sources[spec->key] =
        unchanged ? (spec->published ? ValueSource::Paper : ValueSource::Default) : ValueSource::User;
}

std::string get_config_value(const RunConfig& config, std::string_view key) {
    const KeySpec* spec = find_key(key);
    if (!spec) throw ConfigError(std::string(key), "unknown key");
    return spec->get(config);
}

RunConfig parse_config(std::istream& in, ConfigReport& report) {
    RunConfig config = default_config();
    std::set<std::string> seen;
    std::string section;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        auto line = trim_view(raw);
        if (line.empty() || line.front() == '#' || line.front() == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                report.errors.push_back("line " + std::to_string(line_no) + ": unterminated section header");
                continue;
            }
            section = std::string(trim_view(line.substr(1, line.size() - 2)));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            report.errors.push_back("line " + std::to_string(line_no) + ": expected 'key = value'");
            continue;
        }
        std::string key(trim_view(line.substr(0, eq)));
        auto value = trim_view(line.substr(eq + 1));
        if (const auto hash = value.find(" #"); hash != std::string_view::npos) value = trim_view(value.substr(0, hash));
        if (!section.empty() && key.find('.') == std::string::npos) key = section + "." + key;
        if (!find_key(key)) {
            report.unknown_keys.push_back(key);
            continue;
        }
        try {
            set_config_value(config, key, value);
            seen.insert(key);
        } catch (const ConfigError& e) {
            report.errors.push_back(e.what());
        }
    }
    for (const auto& k : registry()) {
        if (!seen.count(k.key)) report.missing_keys.push_back(k.key);
    }
    bound_warnings(config, report.warnings);
    try {
        config.validate();
    } catch (const ConfigError& e) {
        report.errors.push_back(e.what());
    }
    return config;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path.string());
    ConfigReport report;
    RunConfig config = parse_config(in, report);
    if (!report.unknown_keys.empty()) throw ConfigError(report.unknown_keys.front(), "unknown key");
    if (!report.errors.empty()) {
        const auto& first = report.errors.front();
        const auto colon = first.find(':');
        throw ConfigError(first.substr(0, colon), colon == std::string::npos ? first : first.substr(colon + 2));
    }
    return config;
}

ConfigReport validate_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path.string());
    ConfigReport report;
    parse_config(in, report);
    return report;
}

std::string config_snapshot(const RunConfig& config) {
    std::ostringstream out;
    std::string section;
    for (const auto& k : registry()) {
        const auto dot = k.key.find('.');
        const auto sec = k.key.substr(0, dot);
        if (sec != section) {
            if (!section.empty()) out << '\n';
            section = sec;
        }
        const auto it = config.sources.find(k.key);
        const ValueSource src = it != config.sources.end() ? it->second
                                                            : (k.published ? ValueSource::Paper : ValueSource::Default);
        out << k.key << " = " << k.get(config) << "  # source: " << to_string(src) << '\n';
    }
    return out.str();
}

} // namespace evsizer
