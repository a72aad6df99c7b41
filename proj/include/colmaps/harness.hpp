#pragma once

#include <optional>
#include <string>
#include <vector>

#include "colmaps/monte_carlo.hpp"
#include "colmaps/rate_theory.hpp"
#include "colmaps/scenario.hpp"
#include "colmaps/ulam.hpp"

namespace colmaps {

struct RunResult {
    RateReport report;
    std::optional<SurvivalCurve> curve;
    std::optional<FitResult> fit;
    std::optional<SpectralResult> spectral;
    std::optional<QkResult> qk;
    double qk_theta_windowed = 0.0;  // 1 - sum lambda^{-k} q_k
    std::optional<double> ks_stat;
    std::optional<double> ks_weighted;
    long hitting_censored = 0;

    std::string summary_text() const;
};

// Executes the stages a scenario asks for (prediction always; simulation,
// spectral, q_k, hitting law when their sample counts/bins are set) and, if
// out_dir is non-empty, writes manifest, CSVs and a summary there.
RunResult run_scenario(const Scenario& sc, const std::string& out_dir);

struct SweepRow {
    long L = 0;
    int d = 0, N = 0;
    double eps = 0.0;
    double xi_eps = 0.0, mu0_H = 0.0, theta = 0.0, rate_pred = 0.0;
    double rate_mc = 0.0, rate_mc_stderr = 0.0;
    std::optional<double> lambda_ulam;
    std::optional<double> ks_stat;
    uint64_t seed = 0;
    std::string error;  // non-empty when the row failed
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::string axis;  // "eps" or "N"
};

// Derived sub-seed per row: pure function of (master seed, row index).
uint64_t sweep_subseed(uint64_t master, size_t row);

SweepResult sweep_eps(const Scenario& base, const std::vector<double>& eps_values,
                      const std::string& out_csv);
SweepResult sweep_N(const Scenario& base, const std::vector<int>& n_values,
                    const std::string& out_csv);

void write_survival_csv(const SurvivalCurve& c, const std::string& path);
void write_hitting_csv(const HittingSample& s, const std::string& path);
void write_sweep_csv(const SweepResult& s, const std::string& path);

// Self-contained SVG renderings of the standard claims. kind is one of
// survival | rate_vs_L | rate_vs_eps2 | hitting_law; the CSV schema must
// match (SchemaMismatchError otherwise).
void emit_plot(const std::string& csv_path, const std::string& kind,
               const std::string& svg_path);

}  // namespace colmaps
