#include "evsizer/config.hpp"
#include "evsizer/errors.hpp"
#include "support.hpp"

#include <algorithm>
#include <sstream>

using namespace evsizer;

namespace {
bool contains(const std::vector<std::string>& v, const std::string& s) { return std::find(v.begin(), v.end(), s) != v.end(); }

bool any_contains(const std::vector<std::string>& v, const std::string& s) {
    return std::any_of(v.begin(), v.end(), [&](const std::string& x) { return x.find(s) != std::string::npos; });
}
} // namespace

TEST_CASE("shipped default config validates clean") {
    const auto report = validate_config(std::filesystem::path(EVSIZER_SOURCE_DIR) / "configs/default.cfg");
    CHECK(report.clean());
    CHECK(report.missing_keys.empty());
    CHECK(report.to_text().find("config clean") != std::string::npos);
}

TEST_CASE("built-in defaults carry published values and source tags") {
    const auto c = default_config();
    CHECK(c.vehicle.m_v == 1085.0);
    CHECK(c.spec.v_max == doctest::Approx(50.0));
    CHECK(c.iterations == 50);
    CHECK(c.sources.at("vehicle.m_v") == ValueSource::Paper);
    CHECK(c.sources.at("vehicle.c_r") == ValueSource::Default);
    CHECK(c.sources.at("reference.T_max0") == ValueSource::Default);
    CHECK(c.sources.at("bounds.k_ax") == ValueSource::Paper);
    CHECK(c.sources.size() == config_keys().size());
}

TEST_CASE("widened bound warns against the published one") {
    const auto dir = testing::scratch("config_bound");
    testing::write_file(dir / "wide.cfg", "bounds.k_ax = 0.8, 1.5\n");
    const auto report = validate_config(dir / "wide.cfg");
    CHECK_FALSE(report.clean());
    REQUIRE(report.warnings.size() == 1);
    CHECK(report.warnings[0].find("k_ax") != std::string::npos);
    CHECK(report.warnings[0].find("exceeds paper bound 1.2") != std::string::npos);
}

TEST_CASE("missing c_r falls back to the documented default") {
    std::istringstream in("[vehicle]\nm_v = 1085\n");
    ConfigReport report;
    const auto c = parse_config(in, report);
    CHECK(contains(report.missing_keys, "vehicle.c_r"));
    CHECK(c.vehicle.c_r == 0.01);
    CHECK(c.sources.at("vehicle.c_r") == ValueSource::Default);
    CHECK(config_snapshot(c).find("vehicle.c_r = 0.01  # source: default") != std::string::npos);
}

TEST_CASE("user values are tagged as such") {
    auto c = default_config();
    set_config_value(c, "vehicle.c_r", "0.012");
    CHECK(c.sources.at("vehicle.c_r") == ValueSource::User);
    CHECK(get_config_value(c, "vehicle.c_r") == "0.012");
    set_config_value(c, "vehicle.m_v", "1085");
    CHECK(c.sources.at("vehicle.m_v") == ValueSource::Paper);
}

TEST_CASE("unknown keys and bad values") {
    std::istringstream in("vehicle.mass = 3\nvehicle.m_v = heavy\nrun.mode = sideways\n");
    ConfigReport report;
    parse_config(in, report);
    CHECK(contains(report.unknown_keys, "vehicle.mass"));
    CHECK(any_contains(report.errors, "vehicle.m_v"));
    CHECK(any_contains(report.errors, "run.mode"));

    const auto dir = testing::scratch("config_bad");
    testing::write_file(dir / "bad.cfg", "vehicle.mass = 3\n");
    CHECK_THROWS_AS(load_config(dir / "bad.cfg"), ConfigError);
    CHECK_THROWS_AS(load_config(dir / "absent.cfg"), IoError);
    CHECK_THROWS_AS(validate_config(dir / "absent.cfg"), IoError);
}

TEST_CASE("key parsing details") {
    std::istringstream in("; comment\n[run]\nmode = combined   # inline\nseeds = 4, 5\niterations = 7\n"
                          "[spec]\nv_max_kmh = 160\n[bounds]\ngamma = 2, 8\n");
    ConfigReport report;
    const auto c = parse_config(in, report);
    CHECK(report.errors.empty());
    CHECK(report.unknown_keys.empty());
    CHECK(c.mode == StudyMode::Combined);
    CHECK(c.seeds == std::vector<std::uint64_t>{4, 5});
    CHECK(c.iterations == 7);
    CHECK(c.spec.v_max == doctest::Approx(160.0 / 3.6));
    CHECK(c.bounds.gamma.lo == 2.0);
    CHECK(c.bounds.gamma.hi == 8.0);
}

TEST_CASE("invalid combinations are config errors") {
    auto c = default_config();
    CHECK_THROWS_AS(set_config_value(c, "bounds.k_ax", "1.2, 0.8"), ConfigError);
    CHECK_THROWS_AS(set_config_value(c, "run.seeds", ""), ConfigError);
    CHECK_THROWS_AS(set_config_value(c, "nope.key", "1"), ConfigError);
    CHECK_NOTHROW(c.validate());
    set_config_value(c, "run.iterations", "0");
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("snapshot round-trips") {
    auto c = default_config();
    set_config_value(c, "vehicle.c_d", "0.31");
    set_config_value(c, "run.seeds", "8,9");
    std::istringstream in(config_snapshot(c));
    ConfigReport report;
    const auto back = parse_config(in, report);
    CHECK(report.clean());
    CHECK(config_snapshot(back) == config_snapshot(c));
}
