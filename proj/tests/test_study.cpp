#include "evsizer/study.hpp"
#include "support.hpp"

#include <json.hpp>

#include <regex>
#include <sstream>

using namespace evsizer;
namespace fs = std::filesystem;

namespace {

RunConfig study_config(const fs::path& out, StudyMode mode, std::size_t iters, std::vector<std::uint64_t> seeds) {
    auto c = default_config();
    c.cycle_path = testing::data_path("wltc_class3b.csv").string();
    c.output_dir = out.string();
    c.mode = mode;
    c.iterations = iters;
    c.seeds = std::move(seeds);
    return c;
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

std::string without_wall_time(const std::string& text) {
    std::string out;
    for (const auto& l : lines(text)) {
        if (l.find("wall_time") == std::string::npos) out += l + '\n';
    }
    return out;
}

} // namespace

TEST_CASE("proportional run: table blanks the internal factors, plot files are consistent") {
    const auto dir = testing::scratch("study_prop");
    const auto outcome = run_study(study_config(dir, StudyMode::Proportional, 50, {1}));
    REQUIRE(outcome.runs.size() == 1);
    const auto& run = outcome.runs[0];
    CHECK_FALSE(outcome.any_infeasible());

    const auto table = lines(testing::slurp(dir / "solutions.csv"));
    REQUIRE(table.size() == 9);
    CHECK(table[0] == "solution,proportional seed 1");
    for (int r = 4; r <= 7; ++r) CHECK(table[static_cast<std::size_t>(r)].ends_with(",-"));
    CHECK(table[8].starts_with("E_ac(T) [MJ],"));

    const auto run_dir = dir / "proportional-seed1";
    for (const char* f : {"config.snapshot", "result.json", "iterations.csv", "summary.txt", "convergence.csv",
                          "scatter.csv", "trace.csv"}) {
        CHECK(fs::exists(run_dir / f));
    }
    const auto scatter = lines(testing::slurp(run_dir / "scatter.csv"));
    CHECK(scatter.size() == 1 + run.n_init + 50);
    const auto iters = lines(testing::slurp(run_dir / "iterations.csv"));
    CHECK(iters.size() == 1 + run.n_init + 50);
    CHECK(iters[0].starts_with("iter,phase,k_ax,k_rad,k_mw,k_ml,k_sd,k_tw,gamma,E_ac_J,feasible"));

    const auto conv = lines(testing::slurp(run_dir / "convergence.csv"));
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < conv.size(); ++i) {
        const auto comma = conv[i].find(',');
        const auto value = conv[i].substr(comma + 1);
        if (value.empty()) continue;
        const double v = std::stod(value);
        CHECK(v <= prev);
        prev = v;
    }
    CHECK(prev == *run.best()->energy);

    const auto trace = lines(testing::slurp(run_dir / "trace.csv"));
    CHECK(trace.size() > 1000);

    const auto json = nlohmann::json::parse(testing::slurp(run_dir / "result.json"));
    CHECK(json["mode"] == "proportional");
    CHECK(json["seed"] == 1);
    CHECK(json["best"]["E_ac_J"].get<double>() == *run.best()->energy);
    CHECK(json["version"].get<std::string>().starts_with("v"));

    const auto snapshot = testing::slurp(run_dir / "config.snapshot");
    CHECK(snapshot.find("run.mode = proportional") != std::string::npos);
    CHECK(snapshot.find("vehicle.m_v = 1085  # source: paper") != std::string::npos);

    const auto meta = nlohmann::json::parse(testing::slurp(dir / "metadata.json"));
    CHECK(meta["sources"]["vehicle.c_r"] == "default");
    CHECK(meta["cycle"]["points"] == 1801);
}

TEST_CASE("combined run with one iteration evaluates n_init + 1 designs") {
    const auto dir = testing::scratch("study_comb1");
    const auto outcome = run_study(study_config(dir, StudyMode::Combined, 1, {1}));
    REQUIRE(outcome.runs.size() == 1);
    CHECK(outcome.runs[0].history.size() == outcome.runs[0].n_init + 1);
    CHECK(outcome.runs[0].n_init == 14);
}

TEST_CASE("paired study writes a per-seed comparison next to the published delta") {
    const auto dir = testing::scratch("study_pair");
    const auto outcome = run_study(study_config(dir, StudyMode::Both, 3, {1, 2}));
    CHECK(outcome.runs.size() == 4);
    const auto cmp = lines(testing::slurp(dir / "comparison.csv"));
    REQUIRE(cmp.size() == 3);
    CHECK(cmp[0] == "seed,proportional_E_ac_J,combined_E_ac_J,delta_percent,published_delta_percent");
    CHECK(cmp[1].starts_with("1,"));
    CHECK(cmp[1].ends_with(",-0.13"));
    const auto summary = testing::slurp(dir / "summary.txt");
    CHECK(summary.find("published reference delta: -0.13 %") != std::string::npos);
}

TEST_CASE("infeasible run: diagnostic header and no trace rows") {
    const auto dir = testing::scratch("study_infeasible");
    auto c = study_config(dir, StudyMode::Proportional, 2, {1});
    c.spec.t_acc = 0.5;
    const auto outcome = run_study(c);
    CHECK(outcome.any_infeasible());
    CHECK(outcome.runs[0].infeasible_run());
    const auto trace = lines(testing::slurp(dir / "proportional-seed1" / "trace.csv"));
    REQUIRE(trace.size() == 2); // diagnostic and column header, no rows
    CHECK(trace[0].starts_with("# infeasible run"));
    CHECK(trace[1].starts_with("t_s,"));
    const auto json = nlohmann::json::parse(testing::slurp(dir / "proportional-seed1" / "result.json"));
    CHECK(json["infeasible_run"] == true);
    CHECK(json["best"].is_null());
}

TEST_CASE("reruns are byte-identical apart from wall time") {
    const auto a = testing::scratch("study_rerun_a");
    const auto b = testing::scratch("study_rerun_b");
    auto ca = study_config(a, StudyMode::Combined, 4, {3});
    auto cb = study_config(b, StudyMode::Combined, 4, {3});
    cb.output_dir = b.string();
    ca.trace = cb.trace = true;
    run_study(ca);
    run_study(cb);
    std::size_t compared = 0;
    for (const auto& entry : fs::recursive_directory_iterator(a)) {
        if (!entry.is_regular_file()) continue;
        const auto rel = fs::relative(entry.path(), a);
        REQUIRE(fs::exists(b / rel));
        auto ta = testing::slurp(entry.path());
        auto tb = testing::slurp(b / rel);
        // the snapshot records the output directory itself
        if (rel.filename() == "config.snapshot" || rel.filename() == "metadata.json") {
            ta = std::regex_replace(ta, std::regex("study_rerun_a"), "X");
            tb = std::regex_replace(tb, std::regex("study_rerun_b"), "X");
        }
        CHECK_MESSAGE(without_wall_time(ta) == without_wall_time(tb), rel.string());
        ++compared;
    }
    CHECK(compared > 10);
    CHECK(fs::exists(a / "combined-seed3" / "traces"));
}
