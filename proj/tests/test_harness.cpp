#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "colmaps/harness.hpp"

using namespace colmaps;
namespace fs = std::filesystem;

namespace {
std::string slurp(const std::string& path) {
    std::ifstream f(path);
    REQUIRE(f.good());
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

Scenario small_scenario() {
    Scenario sc = Scenario::preset("d1N2_period2");
    sc.eps = 0.05;             // fast decay keeps the test cheap
    sc.trajectories = 30000;
    sc.qk_samples = 20000;
    sc.bins = 64;
    sc.hitting_samples = 5000;
    sc.seed = 2024;
    return sc;
}
}  // namespace

TEST_CASE("run_scenario writes a complete, reloadable output directory") {
    fs::path dir = fs::temp_directory_path() / "cml_harness_test";
    fs::remove_all(dir);
    Scenario sc = small_scenario();
    RunResult rr = run_scenario(sc, dir.string());

    CHECK(rr.fit.has_value());
    CHECK(rr.spectral.has_value());
    CHECK(rr.qk.has_value());
    CHECK(rr.ks_stat.has_value());
    CHECK(fs::exists(dir / "manifest.txt"));
    CHECK(fs::exists(dir / "summary.txt"));
    CHECK(fs::exists(dir / "survival.csv"));
    CHECK(fs::exists(dir / "hitting.csv"));
    CHECK(fs::exists(dir / "operator.txt"));

    // the manifest body is itself a loadable config reproducing the run
    std::string manifest = slurp((dir / "manifest.txt").string());
    Scenario re = Scenario::from_string(manifest);
    CHECK(re.serialize() == sc.serialize());

    fs::path dir2 = fs::temp_directory_path() / "cml_harness_test2";
    fs::remove_all(dir2);
    run_scenario(re, dir2.string());
    CHECK(slurp((dir / "survival.csv").string()) == slurp((dir2 / "survival.csv").string()));
    CHECK(slurp((dir / "hitting.csv").string()) == slurp((dir2 / "hitting.csv").string()));
    fs::remove_all(dir);
    fs::remove_all(dir2);
}

TEST_CASE("outputs are identical across thread counts") {
    fs::path d1 = fs::temp_directory_path() / "cml_thr1";
    fs::path d4 = fs::temp_directory_path() / "cml_thr4";
    fs::remove_all(d1);
    fs::remove_all(d4);
    Scenario sc = small_scenario();
    sc.bins = 0;
    sc.threads = 1;
    run_scenario(sc, d1.string());
    sc.threads = 4;
    run_scenario(sc, d4.string());
    CHECK(slurp((d1 / "survival.csv").string()) == slurp((d4 / "survival.csv").string()));
    CHECK(slurp((d1 / "hitting.csv").string()) == slurp((d4 / "hitting.csv").string()));
    fs::remove_all(d1);
    fs::remove_all(d4);
}

TEST_CASE("eps = 0 run reports no decay and a unit eigenvalue") {
    Scenario sc = Scenario::preset("d1N2_period2");
    sc.eps = 0.0;
    sc.trajectories = 2000;
    sc.n_max = 60;
    sc.bins = 64;
    sc.qk_samples = 0;
    RunResult rr = run_scenario(sc, "");
    CHECK(rr.fit->rate == 0.0);
    CHECK(rr.spectral->lambda == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(rr.report.rate_pred == 0.0);
}

TEST_CASE("sweeps produce one CSV row per point and derived sub-seeds") {
    fs::path dir = fs::temp_directory_path() / "cml_sweep_test";
    fs::remove_all(dir);
    fs::create_directories(dir);
    Scenario base = Scenario::preset("d1N2_period2");
    base.trajectories = 20000;
    base.qk_samples = 0;
    base.bins = 0;
    base.hitting_samples = 0;
    base.eps = 0.05;

    std::string csv = (dir / "eps_sweep.csv").string();
    SweepResult res = sweep_eps(base, {0.02, 0.04, 0.08}, csv);
    REQUIRE(res.rows.size() == 3);
    for (size_t i = 0; i < res.rows.size(); ++i) {
        CHECK(res.rows[i].error.empty());
        CHECK(res.rows[i].seed == sweep_subseed(base.seed, i));
        CHECK(res.rows[i].rate_mc > 0.0);
    }
    std::string text = slurp(csv);
    CHECK(text.find("L,d,N,eps,") == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 4);  // header + 3 rows

    // deleting and re-running one row reproduces it from (seed, index)
    Scenario one = base;
    one.eps = 0.04;
    one.seed = sweep_subseed(base.seed, 1);
    RunResult rr = run_scenario(one, "");
    CHECK(rr.fit->rate == res.rows[1].rate_mc);

    SweepResult byn = sweep_N(base, {2, 4}, "");
    REQUIRE(byn.rows.size() == 2);
    CHECK(byn.rows[1].L == 4);

    CHECK_THROWS_AS(sweep_eps(base, {}, ""), ValidationError);
    fs::remove_all(dir);
}

TEST_CASE("failed sweep rows are recorded, not fatal") {
    Scenario base = Scenario::preset("d1N2_period2");
    base.trajectories = 1000;
    base.bins = 0;
    base.qk_samples = 0;
    base.hitting_samples = 0;
    SweepResult res = sweep_eps(base, {0.01, 0.4}, "");  // 0.4 fails validation
    REQUIRE(res.rows.size() == 2);
    CHECK(res.rows[0].error.empty());
    CHECK(!res.rows[1].error.empty());
}

TEST_CASE("plots: structure and schema checks") {
    fs::path dir = fs::temp_directory_path() / "cml_plot_test";
    fs::remove_all(dir);
    Scenario sc = small_scenario();
    sc.bins = 0;
    sc.qk_samples = 0;
    run_scenario(sc, dir.string());

    std::string svg = (dir / "survival.svg").string();
    emit_plot((dir / "survival.csv").string(), "survival", svg);
    std::string body = slurp(svg);
    CHECK(body.find("<svg") == 0);
    CHECK(body.find("</svg>") != std::string::npos);
    // one empirical polyline, one fitted line, plus axes
    size_t plcount = 0, pos = 0;
    while ((pos = body.find("<polyline", pos)) != std::string::npos) { ++plcount; ++pos; }
    CHECK(plcount == 2);
    CHECK(body.find("class=\"axes\"") != std::string::npos);

    emit_plot((dir / "hitting.csv").string(), "hitting_law", (dir / "law.svg").string());
    std::string law = slurp((dir / "law.svg").string());
    CHECK(law.find("exp(-t)") != std::string::npos);

    // sweep-based plots
    Scenario base = sc;
    base.hitting_samples = 0;
    std::string sweep_csv = (dir / "n_sweep.csv").string();
    sweep_N(base, {2, 4, 8}, sweep_csv);
    emit_plot(sweep_csv, "rate_vs_L", (dir / "rate_L.svg").string());
    CHECK(slurp((dir / "rate_L.svg").string()).find("circle") != std::string::npos);
    std::string eps_csv = (dir / "e_sweep.csv").string();
    sweep_eps(base, {0.02, 0.05}, eps_csv);
    emit_plot(eps_csv, "rate_vs_eps2", (dir / "rate_e.svg").string());

    // schema mismatch: wrong CSV for the kind
    CHECK_THROWS_AS(emit_plot(sweep_csv, "survival", (dir / "x.svg").string()),
                    SchemaMismatchError);
    CHECK_THROWS_AS(emit_plot(sweep_csv, "nope", (dir / "x.svg").string()),
                    SchemaMismatchError);
    fs::remove_all(dir);
}
