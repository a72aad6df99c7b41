// End-to-end checks of the cml binary: subcommands, exit codes, determinism.
// argv[1] is the path to the built CLI.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int failures = 0;

void check(bool ok, const std::string& what) {
    if (!ok) {
        ++failures;
        std::cerr << "FAILED: " << what << "\n";
    }
}

struct RunOut {
    int exit_code;
    std::string out;
};

RunOut run(const std::string& cmd) {
    std::string full = cmd + " > cli_test_out.txt 2>&1";
    int rc = std::system(full.c_str());
    std::ifstream f("cli_test_out.txt");
    std::stringstream ss;
    ss << f.rdbuf();
    return RunOut{WEXITSTATUS(rc), ss.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: cli_tests <path-to-cml>\n";
        return 2;
    }
    std::string cml = argv[1];
    fs::path work = fs::temp_directory_path() / "cml_cli_tests";
    fs::remove_all(work);
    fs::create_directories(work);

    auto r = run(cml + " presets");
    check(r.exit_code == 0, "presets exits 0");
    check(r.out.find("d1N2_period2") != std::string::npos, "presets lists d1N2_period2");

    r = run(cml + " --config preset:d1N2_period2 theta");
    check(r.exit_code == 0, "theta exits 0");
    check(r.out.find("theta              = 0.9375") != std::string::npos,
          "theta prints 15/16");
    check(r.out.find("periodic, k = 1") != std::string::npos, "theta prints the period");

    r = run(cml + " --config preset:d1N2_period2 measure");
    check(r.exit_code == 0, "measure exits 0");
    check(r.out.find("mu0_H") != std::string::npos, "measure prints mu0_H");

    // validation failure -> exit code 2 and a named field
    fs::path bad = work / "bad.cfg";
    std::ofstream(bad) << "[collision]\neps = 0.5\n";
    r = run(cml + " --config " + bad.string() + " theta");
    check(r.exit_code == 2, "invalid config exits 2");
    check(r.out.find("collision.centers_1") != std::string::npos,
          "validation error names the field");

    // simulate with explicit output dir; determinism across --threads
    fs::path o1 = work / "run1", o2 = work / "run2";
    std::string base = cml + " --config preset:d1N2_period2 --seed 5 "
                             "--set collision.eps=0.05 --set run.trajectories=20000 ";
    r = run(base + "--threads 1 --out " + o1.string() + " simulate");
    check(r.exit_code == 0, "simulate exits 0");
    check(r.out.find("rate_mc") != std::string::npos, "simulate prints a rate");
    r = run(base + "--threads 3 --out " + o2.string() + " simulate");
    check(r.exit_code == 0, "simulate (threads=3) exits 0");
    check(slurp(o1 / "survival.csv") == slurp(o2 / "survival.csv"),
          "survival.csv identical across --threads");
    check(!slurp(o1 / "manifest.txt").empty(), "manifest written");

    r = run(cml + " --config preset:d1N2_period2 --set collision.eps=0.05 ulam --bins 64");
    check(r.exit_code == 0, "ulam exits 0");
    check(r.out.find("lambda_ulam") != std::string::npos, "ulam prints lambda");

    r = run(cml + " --config preset:d1N2_period2 --set collision.eps=0.05 qk --samples 20000");
    check(r.exit_code == 0, "qk exits 0");
    check(r.out.find("theta_emp") != std::string::npos, "qk prints theta_emp");

    fs::path oh = work / "hit";
    r = run(cml + " --config preset:d1N2_period2 --set collision.eps=0.05 --out " +
            oh.string() + " hitting --samples 4000");
    check(r.exit_code == 0, "hitting exits 0");
    check(r.out.find("ks_stat") != std::string::npos, "hitting prints a KS statistic");

    // sweep then plot from its CSV
    fs::path osw = work / "sw";
    r = run(cml + " --config preset:d1N2_period2 --set run.trajectories=15000 "
                  "--set collision.eps=0.05 --out " + osw.string() + " sweep --axis N "
                  "--values 2,4");
    check(r.exit_code == 0, "sweep exits 0");
    check(fs::exists(osw / "sweep.csv"), "sweep CSV written");
    r = run(cml + " plot --csv " + (osw / "sweep.csv").string() + " --kind rate_vs_L --svg " +
            (osw / "rates.svg").string());
    check(r.exit_code == 0, "plot exits 0");
    check(fs::exists(osw / "rates.svg"), "SVG written");
    r = run(cml + " plot --csv " + (osw / "sweep.csv").string() + " --kind survival --svg " +
            (osw / "x.svg").string());
    check(r.exit_code == 1, "schema mismatch exits 1");

    std::remove("cli_test_out.txt");
    fs::remove_all(work);
    if (failures) {
        std::cerr << failures << " CLI check(s) failed\n";
        return 1;
    }
    std::printf("all CLI checks passed\n");
    return 0;
}
