#include "colmaps.h"

#include <cstring>
#include <sstream>

#include "colmaps/harness.hpp"
#include "colmaps/scenario.hpp"

using namespace colmaps;

struct cml_scenario {
    Scenario sc;
};

namespace {

thread_local std::string g_last_error = "";

int fail(int code, const std::string& msg) {
    g_last_error = msg;
    return code;
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        fn();
        return CML_OK;
    } catch (const ValidationError& e) {
        return fail(CML_ERR_VALIDATION, e.what());
    } catch (const SchemaMismatchError& e) {
        return fail(CML_ERR_INVALID, e.what());
    } catch (const NumericError& e) {
        return fail(CML_ERR_NUMERIC, e.what());
    } catch (const std::exception& e) {
        return fail(CML_ERR_IO, e.what());
    }
}

void copy_str(const std::string& s, char* buf, size_t buflen) {
    if (!buf || buflen == 0) return;
    size_t n = std::min(s.size(), buflen - 1);
    std::memcpy(buf, s.data(), n);
    buf[n] = '\0';
}

void fill_report(const RateReport& r, cml_rate_report* out) {
    if (!out) return;
    std::memset(out, 0, sizeof(*out));
    out->xi_eps = r.xi_eps;
    out->mu0_h = r.mu0_H;
    out->mu0_lower = r.mu0_lower;
    out->mu0_upper = r.mu0_upper;
    out->mu0_exact = r.mu0_exact ? 1 : 0;
    out->theta = r.theta;
    out->lambda_pred = r.lambda_pred;
    out->rate_pred = r.rate_pred;
    out->rate_per_unit_pred = r.rate_per_unit_pred;
    out->n_directions = static_cast<int>(r.periods.per_direction.size());
    for (int v = 0; v < out->n_directions && v < 8; ++v) {
        out->periodic[v] = r.periods.per_direction[static_cast<size_t>(v)].periodic ? 1 : 0;
        out->k_value[v] = r.periods.per_direction[static_cast<size_t>(v)].k;
    }
    out->small_coupling_ok = r.small_coupling_ok ? 1 : 0;
}

std::vector<double> parse_doubles(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
}

}  // namespace

extern "C" {

const char* cml_last_error(void) { return g_last_error.c_str(); }

const char* cml_version(void) { return "0.1.0"; }

cml_scenario* cml_scenario_open(const char* path_or_preset) {
    if (!path_or_preset) { fail(CML_ERR_INVALID, "null path"); return nullptr; }
    cml_scenario* h = nullptr;
    int rc = guarded([&] {
        std::string p = path_or_preset;
        Scenario sc = p.rfind("preset:", 0) == 0 ? Scenario::preset(p.substr(7))
                                                 : Scenario::from_file(p);
        h = new cml_scenario{std::move(sc)};
    });
    return rc == CML_OK ? h : nullptr;
}

cml_scenario* cml_scenario_parse(const char* text) {
    if (!text) { fail(CML_ERR_INVALID, "null text"); return nullptr; }
    cml_scenario* h = nullptr;
    int rc = guarded([&] { h = new cml_scenario{Scenario::from_string(text)}; });
    return rc == CML_OK ? h : nullptr;
}

void cml_scenario_close(cml_scenario* sc) { delete sc; }

int cml_scenario_set(cml_scenario* sc, const char* dotted_key, const char* value) {
    if (!sc || !dotted_key || !value) return fail(CML_ERR_INVALID, "null argument");
    return guarded([&] { sc->sc.set_key(dotted_key, value); });
}

int cml_scenario_validate(const cml_scenario* sc) {
    if (!sc) return fail(CML_ERR_INVALID, "null scenario");
    return guarded([&] { sc->sc.validate(); });
}

int cml_scenario_text(const cml_scenario* sc, char* buf, size_t buflen) {
    if (!sc) return fail(CML_ERR_INVALID, "null scenario");
    return guarded([&] { copy_str(sc->sc.serialize(), buf, buflen); });
}

int cml_preset_names(char* buf, size_t buflen) {
    return guarded([&] {
        std::string all;
        for (const auto& n : Scenario::preset_names()) {
            all += n;
            all += '\n';
        }
        copy_str(all, buf, buflen);
    });
}

int cml_predict(const cml_scenario* sc, cml_rate_report* out) {
    if (!sc || !out) return fail(CML_ERR_INVALID, "null argument");
    return guarded([&] {
        sc->sc.validate();
        RateReport r = predict(sc->sc.make_map(), sc->sc.make_collision(),
                               sc->sc.make_lattice(), sc->sc.make_density(), sc->sc.k_max);
        fill_report(r, out);
    });
}

int cml_run(const cml_scenario* sc, const char* out_dir, cml_rate_report* report,
            cml_fit_result* fit, cml_spectral_result* spectral, cml_qk_result* qk,
            cml_hitting_result* hitting) {
    if (!sc) return fail(CML_ERR_INVALID, "null scenario");
    if (fit) std::memset(fit, 0, sizeof(*fit));
    if (spectral) std::memset(spectral, 0, sizeof(*spectral));
    if (qk) std::memset(qk, 0, sizeof(*qk));
    if (hitting) std::memset(hitting, 0, sizeof(*hitting));
    return guarded([&] {
        RunResult rr = run_scenario(sc->sc, out_dir ? out_dir : "");
        fill_report(rr.report, report);
        if (fit && rr.fit) {
            fit->rate = rr.fit->rate;
            fit->stderr_rate = rr.fit->stderr_rate;
            fit->window_lo = rr.fit->window_lo;
            fit->window_hi = rr.fit->window_hi;
        }
        if (spectral && rr.spectral) {
            spectral->lambda = rr.spectral->lambda;
            spectral->gap_proxy = rr.spectral->gap_proxy;
            spectral->residual = rr.spectral->residual;
            spectral->iterations = rr.spectral->iterations;
        }
        if (qk && rr.qk) {
            qk->theta_emp = rr.qk->theta_emp;
            qk->theta_windowed = rr.qk_theta_windowed;
            qk->n_samples = rr.qk->n_samples;
        }
        if (hitting && rr.ks_stat) {
            hitting->ks_stat = *rr.ks_stat;
            hitting->ks_weighted_sup = *rr.ks_weighted;
            hitting->censored = rr.hitting_censored;
            hitting->samples = sc->sc.hitting_samples;
        }
    });
}

int cml_sweep(const cml_scenario* sc, const char* axis, const char* comma_values,
              const char* out_csv) {
    if (!sc || !axis || !comma_values || !out_csv)
        return fail(CML_ERR_INVALID, "null argument");
    return guarded([&] {
        std::string ax = axis;
        if (ax == "eps") {
            sweep_eps(sc->sc, parse_doubles(comma_values), out_csv);
        } else if (ax == "N") {
            std::vector<int> ns;
            for (double v : parse_doubles(comma_values)) ns.push_back(static_cast<int>(v));
            sweep_N(sc->sc, ns, out_csv);
        } else {
            throw ValidationError("sweep.axis", "axis must be 'eps' or 'N'");
        }
    });
}

int cml_emit_plot(const char* csv_path, const char* kind, const char* svg_path) {
    if (!csv_path || !kind || !svg_path) return fail(CML_ERR_INVALID, "null argument");
    return guarded([&] { emit_plot(csv_path, kind, svg_path); });
}

}  // extern "C"
