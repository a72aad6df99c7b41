// Command-line front end; talks to the library exclusively through the C API.
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "colmaps.h"

namespace {

int exit_code(int rc) {
    if (rc == CML_OK) return 0;
    if (rc == CML_ERR_VALIDATION) return 2;
    if (rc == CML_ERR_NUMERIC) return 3;
    return 1;
}

int bail(int rc) {
    std::fprintf(stderr, "error: %s\n", cml_last_error());
    return exit_code(rc);
}

struct Common {
    std::string config;
    std::string out;
    long seed = -1;
    int threads = -1;
    std::vector<std::string> sets;
};

cml_scenario* open_scenario(const Common& c) {
    if (c.config.empty()) {
        std::fprintf(stderr, "error: --config is required (file path or preset:NAME)\n");
        return nullptr;
    }
    cml_scenario* sc = cml_scenario_open(c.config.c_str());
    if (!sc) return nullptr;
    for (const auto& kv : c.sets) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) {
            std::fprintf(stderr, "error: --set expects key=value, got '%s'\n", kv.c_str());
            cml_scenario_close(sc);
            return nullptr;
        }
        if (cml_scenario_set(sc, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()) != CML_OK) {
            std::fprintf(stderr, "error: %s\n", cml_last_error());
            cml_scenario_close(sc);
            return nullptr;
        }
    }
    if (c.seed >= 0)
        cml_scenario_set(sc, "run.seed", std::to_string(c.seed).c_str());
    if (c.threads >= 0)
        cml_scenario_set(sc, "run.threads", std::to_string(c.threads).c_str());
    return sc;
}

void print_report(const cml_rate_report& r) {
    std::printf("xi_eps             = %.12g\n", r.xi_eps);
    std::printf("mu0_H              = %.12g (%s)\n", r.mu0_h,
                r.mu0_exact ? "exact inclusion-exclusion" : "bracket midpoint");
    if (!r.mu0_exact)
        std::printf("mu0_bracket        = [%.12g, %.12g]\n", r.mu0_lower, r.mu0_upper);
    std::printf("theta              = %.12g\n", r.theta);
    std::printf("lambda_pred        = %.12g\n", r.lambda_pred);
    std::printf("rate_pred          = %.12g\n", r.rate_pred);
    std::printf("rate_per_unit_pred = %.12g\n", r.rate_per_unit_pred);
    for (int v = 0; v < r.n_directions; ++v) {
        if (r.periodic[v])
            std::printf("direction %d        : periodic, k = %d\n", v + 1, r.k_value[v]);
        else
            std::printf("direction %d        : non-periodic\n", v + 1);
    }
    if (!r.small_coupling_ok)
        std::printf("warning            : L*d*eps^2 > 0.01, asymptotics degrade\n");
}

// disable every sampling stage except `keep`; subcommands re-enable what they need
int isolate(cml_scenario* sc, const std::string& keep = "") {
    const char* zero_keys[] = {"run.trajectories", "run.qk_samples", "run.hitting_samples",
                               "run.bins"};
    for (const char* k : zero_keys) {
        if (keep == k) continue;
        int rc = cml_scenario_set(sc, k, "0");
        if (rc != CML_OK) return rc;
    }
    return CML_OK;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"collision-coupled map lattice laboratory"};
    app.require_subcommand(1);

    Common common;
    app.add_option("--config", common.config, "config file or preset:NAME")->force_callback();
    app.add_option("--out", common.out, "output directory");
    app.add_option("--seed", common.seed, "override run.seed");
    app.add_option("--threads", common.threads,
                   "worker threads (wall time only; results never change)");
    app.add_option("--set", common.sets, "override any config key, e.g. collision.eps=0.02");

    auto* cmd_theta = app.add_subcommand("theta", "closed-form extremal index and periods");
    auto* cmd_measure = app.add_subcommand("measure", "collision-set measure and Xi_eps");
    auto* cmd_sim = app.add_subcommand("simulate", "survival curve and fitted rate");
    long sim_traj = 0;
    cmd_sim->add_option("--trajectories", sim_traj, "override run.trajectories");
    auto* cmd_hit = app.add_subcommand("hitting", "hitting-time law against Exp(1)");
    long hit_samples = 0;
    cmd_hit->add_option("--samples", hit_samples, "override run.hitting_samples");
    auto* cmd_ulam = app.add_subcommand("ulam", "spectral approximation of the conditioned operator");
    int ulam_bins = 0;
    cmd_ulam->add_option("--bins", ulam_bins, "bins per axis (default from config or 128)");
    auto* cmd_qk = app.add_subcommand("qk", "conditional return probabilities q_k");
    long qk_samples = 0;
    cmd_qk->add_option("--samples", qk_samples, "override run.qk_samples");
    auto* cmd_sweep = app.add_subcommand("sweep", "run a parameter sweep, one CSV row per point");
    std::string sweep_axis = "eps", sweep_values;
    cmd_sweep->add_option("--axis", sweep_axis, "eps or N")->required();
    cmd_sweep->add_option("--values", sweep_values, "comma list")->required();
    auto* cmd_plot = app.add_subcommand("plot", "render a CSV into a standalone SVG");
    std::string plot_csv, plot_kind, plot_svg;
    cmd_plot->add_option("--csv", plot_csv, "input CSV")->required();
    cmd_plot->add_option("--kind", plot_kind, "survival | rate_vs_L | rate_vs_eps2 | hitting_law")
        ->required();
    cmd_plot->add_option("--svg", plot_svg, "output SVG")->required();
    auto* cmd_presets = app.add_subcommand("presets", "list built-in scenarios");

    CLI11_PARSE(app, argc, argv);

    if (cmd_presets->parsed()) {
        char buf[4096];
        if (cml_preset_names(buf, sizeof buf) != CML_OK) return bail(CML_ERR_INVALID);
        std::printf("%s", buf);
        return 0;
    }
    if (cmd_plot->parsed()) {
        int rc = cml_emit_plot(plot_csv.c_str(), plot_kind.c_str(), plot_svg.c_str());
        if (rc != CML_OK) return bail(rc);
        std::printf("wrote %s\n", plot_svg.c_str());
        return 0;
    }

    cml_scenario* sc = open_scenario(common);
    if (!sc) return 2;
    const char* out_dir = common.out.empty() ? nullptr : common.out.c_str();

    cml_rate_report report;
    cml_fit_result fit;
    cml_spectral_result spectral;
    cml_qk_result qk;
    cml_hitting_result hitting;
    int rc = CML_OK;

    if (cmd_theta->parsed() || cmd_measure->parsed()) {
        rc = cml_predict(sc, &report);
        if (rc == CML_OK) print_report(report);
    } else if (cmd_sim->parsed()) {
        rc = isolate(sc, "run.trajectories");
        if (rc == CML_OK && sim_traj > 0)
            rc = cml_scenario_set(sc, "run.trajectories", std::to_string(sim_traj).c_str());
        rc = rc == CML_OK ? cml_run(sc, out_dir, &report, &fit, nullptr, nullptr, nullptr) : rc;
        if (rc == CML_OK) {
            print_report(report);
            std::printf("rate_mc            = %.12g +- %.12g\n", fit.rate, fit.stderr_rate);
            std::printf("fit_window         = [%ld, %ld]\n", fit.window_lo, fit.window_hi);
        }
    } else if (cmd_hit->parsed()) {
        rc = isolate(sc);
        if (rc == CML_OK)
            rc = cml_scenario_set(sc, "run.hitting_samples",
                                  std::to_string(hit_samples > 0 ? hit_samples : 100000).c_str());
        rc = rc == CML_OK ? cml_run(sc, out_dir, &report, nullptr, nullptr, nullptr, &hitting) : rc;
        if (rc == CML_OK) {
            print_report(report);
            std::printf("ks_stat            = %.12g\n", hitting.ks_stat);
            std::printf("ks_weighted_sup    = %.12g\n", hitting.ks_weighted_sup);
            std::printf("censored           = %ld / %ld\n", hitting.censored, hitting.samples);
        }
    } else if (cmd_ulam->parsed()) {
        rc = isolate(sc);
        if (rc == CML_OK)
            rc = cml_scenario_set(sc, "run.bins",
                                  std::to_string(ulam_bins > 0 ? ulam_bins : 128).c_str());
        rc = rc == CML_OK ? cml_run(sc, out_dir, &report, nullptr, &spectral, nullptr, nullptr) : rc;
        if (rc == CML_OK) {
            print_report(report);
            std::printf("lambda_ulam        = %.12g\n", spectral.lambda);
            std::printf("one_minus_lambda   = %.12g\n", 1.0 - spectral.lambda);
            std::printf("gap_proxy          = %.12g\n", spectral.gap_proxy);
            std::printf("iterations         = %ld (residual %.3g)\n", spectral.iterations,
                        spectral.residual);
        }
    } else if (cmd_qk->parsed()) {
        rc = isolate(sc);
        if (rc == CML_OK)
            rc = cml_scenario_set(sc, "run.qk_samples",
                                  std::to_string(qk_samples > 0 ? qk_samples : 1000000).c_str());
        rc = rc == CML_OK ? cml_run(sc, out_dir, &report, nullptr, nullptr, &qk, nullptr) : rc;
        if (rc == CML_OK) {
            print_report(report);
            std::printf("theta_emp          = %.12g  (n = %ld)\n", qk.theta_emp, qk.n_samples);
            std::printf("theta_windowed     = %.12g\n", qk.theta_windowed);
        }
    } else if (cmd_sweep->parsed()) {
        std::string csv = common.out.empty() ? "sweep.csv" : common.out + "/sweep.csv";
        rc = cml_sweep(sc, sweep_axis.c_str(), sweep_values.c_str(), csv.c_str());
        if (rc == CML_OK) std::printf("wrote %s\n", csv.c_str());
    }

    cml_scenario_close(sc);
    if (rc != CML_OK) return bail(rc);
    return 0;
}
