#include "colmaps/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "colmaps/rng.hpp"

namespace colmaps {

namespace fs = std::filesystem;

namespace {

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << text;
}

}  // namespace

std::string RunResult::summary_text() const {
    std::ostringstream os;
    os.precision(12);
    os << report.to_text();
    if (fit) {
        os << "rate_mc = " << fit->rate << "\n";
        os << "rate_mc_stderr = " << fit->stderr_rate << "\n";
        os << "fit_window = [" << fit->window_lo << ", " << fit->window_hi << "]\n";
    }
    if (spectral) {
        os << "lambda_ulam = " << spectral->lambda << "\n";
        os << "one_minus_lambda_ulam = " << 1.0 - spectral->lambda << "\n";
        os << "gap_proxy = " << spectral->gap_proxy << "\n";
        os << "power_iterations = " << spectral->iterations << "\n";
        os << "power_residual = " << spectral->residual << "\n";
    }
    if (qk) {
        os << "qk = ";
        for (size_t i = 0; i < qk->q.size(); ++i) os << (i ? "," : "") << qk->q[i];
        os << "\ntheta_emp = " << qk->theta_emp << "\n";
        os << "theta_windowed = " << qk_theta_windowed << "\n";
    }
    if (ks_stat) {
        os << "ks_stat = " << *ks_stat << "\n";
        os << "ks_weighted_sup = " << *ks_weighted << "\n";
        os << "hitting_censored = " << hitting_censored << "\n";
    }
    return os.str();
}

RunResult run_scenario(const Scenario& sc, const std::string& out_dir) {
    sc.validate();
    RunResult rr;
    SiteMap map = sc.make_map();
    LatticeSpec lat = sc.make_lattice();
    CollisionSpec col = sc.make_collision();
    InvariantDensity h = sc.make_density();

    rr.report = predict(map, col, lat, h, sc.k_max);

    RunOptions opt;
    opt.seed = sc.seed;
    opt.threads = sc.threads;

    std::string survival_path, hitting_path;
    if (!out_dir.empty()) fs::create_directories(out_dir);

    if (sc.trajectories > 0) {
        long n_max = sc.n_max;
        if (n_max <= 0) {
            // cover the fit window: survivors drop below 100 around ln(n/100)/rate
            double rate = std::max(rr.report.rate_pred, 1e-12);
            n_max = std::min<long>(default_horizon(rate),
                                   static_cast<long>(std::ceil(12.0 / rate)));
        }
        MeasureKind kind =
            sc.measure == "mu0" ? MeasureKind::Mu0 : MeasureKind::Lebesgue;
        rr.curve = survival_curve(map, col, lat, h, sc.trajectories, n_max, kind,
                                  /*condition_on_x0=*/true, opt);
        try {
            rr.fit = fit_rate(*rr.curve, sc.burn_in);
        } catch (const InsufficientDataError&) {
            if (sc.eps > 0) throw;
            // eps = 0 never decays; report a zero rate
            rr.fit = FitResult{0.0, 0.0, sc.burn_in, n_max};
        }
        if (!out_dir.empty()) {
            survival_path = out_dir + "/survival.csv";
            write_survival_csv(*rr.curve, survival_path);
        }
    }

    if (sc.bins > 0 && lat.L <= 3) {
        GridSpec grid = build_grid(map, col, lat, sc.bins);
        SparseOperator op = assemble(grid, map, col, lat);
        rr.spectral = leading_eigen(op);
        if (!out_dir.empty()) op.export_triplets(out_dir + "/operator.txt");
    }

    if (sc.qk_samples > 0) {
        rr.qk = estimate_qk(map, col, lat, h, sc.qk_kmax, sc.qk_samples, opt);
        double lam = rr.report.lambda_pred;
        double s = 0.0, lk = 1.0;
        for (size_t k = 0; k < rr.qk->q.size(); ++k) {
            s += rr.qk->q[k] / lk;
            lk *= lam;
        }
        rr.qk_theta_windowed = 1.0 - s;
    }

    if (sc.hitting_samples > 0) {
        double rate = std::max(rr.report.rate_pred, 1e-12);
        long horizon = sc.n_max > 0 ? sc.n_max : default_horizon(rate);
        HittingSample hs =
            sample_hitting_times(map, col, lat, h, sc.hitting_samples, horizon, opt);
        hs.rescale = rr.report.theta * rr.report.mu0_H;
        rr.ks_stat = hitting_law_ks(hs);
        rr.ks_weighted = hitting_law_weighted_sup(hs);
        for (auto cns : hs.censored) rr.hitting_censored += cns;
        if (!out_dir.empty()) {
            hitting_path = out_dir + "/hitting.csv";
            write_hitting_csv(hs, hitting_path);
        }
    }

    if (!out_dir.empty()) {
        std::ostringstream manifest;
        manifest << "# resolved scenario (re-runnable as a config file)\n"
                 << sc.serialize();
        if (!rr.report.small_coupling_ok)
            manifest << "\n# warning: L*d*eps^2 exceeds 0.01; asymptotic formulas degrade\n";
        write_text(out_dir + "/manifest.txt", manifest.str());
        write_text(out_dir + "/summary.txt", rr.summary_text());
    }
    return rr;
}

uint64_t sweep_subseed(uint64_t master, size_t row) {
    return SubstreamRng::derive_key(master, 0xC0FFEEull + row);
}

namespace {

SweepRow run_row(Scenario sc, size_t idx) {
    SweepRow row;
    row.d = sc.d;
    row.N = sc.N;
    row.eps = sc.eps;
    row.seed = sweep_subseed(sc.seed, idx);
    sc.seed = row.seed;
    try {
        LatticeSpec lat = sc.make_lattice();
        row.L = lat.L;
        RunResult rr = run_scenario(sc, "");
        row.xi_eps = rr.report.xi_eps;
        row.mu0_H = rr.report.mu0_H;
        row.theta = rr.report.theta;
        row.rate_pred = rr.report.rate_pred;
        if (rr.fit) {
            row.rate_mc = rr.fit->rate;
            row.rate_mc_stderr = rr.fit->stderr_rate;
        }
        if (rr.spectral) row.lambda_ulam = rr.spectral->lambda;
        if (rr.ks_stat) row.ks_stat = *rr.ks_stat;
    } catch (const std::exception& e) {
        row.error = e.what();
    }
    return row;
}

}  // namespace

SweepResult sweep_eps(const Scenario& base, const std::vector<double>& eps_values,
                      const std::string& out_csv) {
    if (eps_values.empty()) throw ValidationError("sweep.eps", "empty axis");
    SweepResult res;
    res.axis = "eps";
    for (size_t i = 0; i < eps_values.size(); ++i) {
        Scenario sc = base;
        sc.eps = eps_values[i];
        res.rows.push_back(run_row(sc, i));
    }
    if (!out_csv.empty()) write_sweep_csv(res, out_csv);
    return res;
}

SweepResult sweep_N(const Scenario& base, const std::vector<int>& n_values,
                    const std::string& out_csv) {
    if (n_values.empty()) throw ValidationError("sweep.N", "empty axis");
    SweepResult res;
    res.axis = "N";
    for (size_t i = 0; i < n_values.size(); ++i) {
        Scenario sc = base;
        sc.N = n_values[i];
        res.rows.push_back(run_row(sc, i));
    }
    if (!out_csv.empty()) write_sweep_csv(res, out_csv);
    return res;
}

void write_survival_csv(const SurvivalCurve& c, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << "n,survivors,total\n";
    for (long n = 0; n <= c.n_max; ++n)
        f << n << ',' << c.survivors[static_cast<size_t>(n)] << ',' << c.total << '\n';
}

void write_hitting_csv(const HittingSample& s, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f.precision(17);
    f << "trajectory_id,t_eps,censored\n";
    for (size_t i = 0; i < s.times.size(); ++i)
        f << i << ',' << s.times[i] << ',' << static_cast<int>(s.censored[i]) << '\n';
}

void write_sweep_csv(const SweepResult& s, const std::string& path) {
    fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f.precision(17);
    f << "L,d,N,eps,xi_eps,mu0_H,theta,rate_pred,rate_mc,rate_mc_stderr,lambda_ulam,ks_stat,"
         "seed,error\n";
    for (const auto& r : s.rows) {
        f << r.L << ',' << r.d << ',' << r.N << ',' << r.eps << ',' << r.xi_eps << ','
          << r.mu0_H << ',' << r.theta << ',' << r.rate_pred << ',' << r.rate_mc << ','
          << r.rate_mc_stderr << ',';
        if (r.lambda_ulam) f << *r.lambda_ulam;
        f << ',';
        if (r.ks_stat) f << *r.ks_stat;
        f << ',' << r.seed << ',' << r.error << '\n';
    }
}

}  // namespace colmaps
