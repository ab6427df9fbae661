#include "evsizer/cycle.hpp"
#include "evsizer/errors.hpp"
#include "support.hpp"

#include <sstream>

using namespace evsizer;

namespace {
DriveCycle parse(const std::string& text, SpeedUnit unit = SpeedUnit::KilometersPerHour) {
    std::istringstream in(text);
    return parse_cycle(in, unit);
}
} // namespace

TEST_CASE("two-point km/h file converts speed and derives forward-difference acceleration") {
    const auto c = parse("0,0\n10,36\n");
    REQUIRE(c.size() == 2);
    CHECK(c.points()[0].t == 0.0);
    CHECK(c.points()[0].v == 0.0);
    CHECK(c.points()[0].a == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c.points()[1].t == 10.0);
    CHECK(c.points()[1].v == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(c.points()[1].a == 0.0);
}

TEST_CASE("all-zero cycle in m/s") {
    const auto c = parse("0 0\n1 0\n", SpeedUnit::MetersPerSecond);
    CHECK(c.duration() == 1.0);
    for (const auto& p : c.points()) {
        CHECK(p.v == 0.0);
        CHECK(p.a == 0.0);
    }
}

TEST_CASE("header, comments, BOM and whitespace are tolerated") {
    const auto c = parse("\xEF\xBB\xBF# trace\ntime_s,speed_kmh\n0, 0\n\n1 ,3.6\n# end\n2,7.2\n");
    REQUIRE(c.size() == 3);
    CHECK(c.points()[2].v == doctest::Approx(2.0));
}

TEST_CASE("malformed rows name the line") {
    try {
        parse("t,v\n0,0\n1,abc\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    CHECK_THROWS_AS(parse("0,0\n1\n"), ParseError);
    CHECK_THROWS_AS(parse("0,0\n1,2,3\n"), ParseError);
}

TEST_CASE("negative speed and non-monotone time are rejected") {
    CHECK_THROWS_AS(parse("0,0\n1,-1\n"), ValidationError);
    CHECK_THROWS_AS(parse("0,0\n1,1\n1,2\n"), ValidationError);
    CHECK_THROWS_AS(parse("0,0\n2,1\n1,2\n"), ValidationError);
    CHECK_THROWS_AS(parse("0,0\n"), ValidationError);
}

TEST_CASE("missing file is an IO error") {
    CHECK_THROWS_AS(load_cycle("/nonexistent/cycle.csv", SpeedUnit::KilometersPerHour), IoError);
}

TEST_CASE("shipped WLTC class 3b trace") {
    const auto& c = testing::wltc();
    CHECK(c.size() == 1801);
    CHECK(c.duration() == 1800.0);
    CHECK(c.uniform_step() == 1.0);
    CHECK(c.distance() == doctest::Approx(23266).epsilon(0.002));
    double vmax = 0.0;
    for (const auto& p : c.points()) vmax = std::max(vmax, p.v);
    CHECK(vmax * 3.6 == doctest::Approx(131.3).epsilon(1e-9));
}

TEST_CASE("resample interpolates linearly") {
    const DriveCycle ramp("ramp", {0.0, 2.0}, {0.0, 2.0});
    const auto r = resample(ramp, 1.0);
    REQUIRE(r.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(r.points()[i].t == static_cast<double>(i));
        CHECK(r.points()[i].v == doctest::Approx(static_cast<double>(i)));
    }

    const DriveCycle ten("ten", {0.0, 10.0}, {0.0, 10.0});
    const auto r5 = resample(ten, 5.0);
    REQUIRE(r5.size() == 3);
    CHECK(r5.points()[1].v == doctest::Approx(5.0));

    CHECK_THROWS_AS(resample(ten, 0.0), ArgumentError);
    CHECK_THROWS_AS(resample(ten, -1.0), ArgumentError);
}

TEST_CASE("resampling the WLTC at half a second keeps the endpoints") {
    const auto r = resample(testing::wltc(), 0.5);
    CHECK(r.size() == 3601);
    CHECK(r.duration() == 1800.0);
    CHECK(r.distance() == doctest::Approx(testing::wltc().distance()).epsilon(1e-12));
}
