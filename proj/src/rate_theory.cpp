#include "colmaps/rate_theory.hpp"

#include <cmath>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace colmaps {

namespace {

using RatPair = std::pair<Rational, Rational>;

DirectionPeriod classify_rational(const SiteMap& map, const std::vector<RatPair>& S,
                                  int dir, int k_max) {
    DirectionPeriod out;
    const RatPair start = S[dir];
    RatPair cur = start;
    std::unordered_set<std::pair<Rational, Rational>, RationalPairHash> seen;
    seen.insert(cur);
    int first_s_hit = -1, first_s_dir = -1;
    bool returns_to_self = false;
    for (int step = 1; step <= k_max; ++step) {
        cur = {map.eval_exact(cur.first), map.eval_exact(cur.second)};
        if (first_s_hit < 0) {
            for (size_t j = 0; j < S.size(); ++j)
                if (cur == S[j]) { first_s_hit = step; first_s_dir = static_cast<int>(j); break; }
        }
        if (cur == start) { returns_to_self = true; break; }
        if (!seen.insert(cur).second) break;  // entered a cycle not through the start
    }
    if (returns_to_self) {
        out.periodic = true;
        out.k = first_s_hit - 1;
        out.return_dir = first_s_dir;
    }
    return out;
}

DirectionPeriod classify_float(const SiteMap& map, const std::vector<std::pair<double, double>>& S,
                               int dir, int k_max) {
    constexpr double tol = 1e-9;
    DirectionPeriod out;
    const auto start = S[dir];
    auto cur = start;
    auto near = [&](const std::pair<double, double>& a, const std::pair<double, double>& b) {
        return std::fabs(a.first - b.first) <= tol && std::fabs(a.second - b.second) <= tol;
    };
    int first_s_hit = -1, first_s_dir = -1;
    bool returns_to_self = false;
    for (int step = 1; step <= k_max; ++step) {
        if (map.double_is_endpoint(cur.first) || map.double_is_endpoint(cur.second))
            throw BranchBoundaryError("center orbit hit a branch endpoint");
        cur = {map.eval(cur.first), map.eval(cur.second)};
        if (first_s_hit < 0) {
            for (size_t j = 0; j < S.size(); ++j)
                if (near(cur, S[j])) { first_s_hit = step; first_s_dir = static_cast<int>(j); break; }
        }
        if (near(cur, start)) { returns_to_self = true; break; }
    }
    if (returns_to_self) {
        out.periodic = true;
        out.k = first_s_hit - 1;
        out.return_dir = first_s_dir;
    }
    return out;
}

}  // namespace

PeriodStructure period_structure(const SiteMap& map, const CollisionSpec& c, int k_max) {
    if (k_max < 1) throw ValidationError("run.k_max", "k_max must be >= 1");
    PeriodStructure ps;
    ps.k_max = k_max;
    ps.rational_mode = map.rational_mode();
    if (ps.rational_mode) {
        std::vector<RatPair> S;
        for (int v = 0; v < c.directions(); ++v) S.push_back(c.center(v));
        for (int v = 0; v < c.directions(); ++v)
            ps.per_direction.push_back(classify_rational(map, S, v, k_max));
    } else {
        std::vector<std::pair<double, double>> S;
        for (int v = 0; v < c.directions(); ++v)
            S.emplace_back(c.center_plus(v), c.center_minus(v));
        for (int v = 0; v < c.directions(); ++v)
            ps.per_direction.push_back(classify_float(map, S, v, k_max));
    }
    return ps;
}

double theta(const SiteMap& map, const CollisionSpec& c, const PeriodStructure& ps,
             const InvariantDensity& h) {
    if (!ps.any_periodic()) return 1.0;
    try {
        if (auto ex = theta_exact(map, c, ps, h)) return ex->to_double();
    } catch (const OverflowError&) {
        // fall through to floating point
    }
    double denom = 0.0;
    for (int v = 0; v < c.directions(); ++v)
        denom += h.value_at(c.center_plus(v)) * h.value_at(c.center_minus(v));
    double sum = 0.0;
    for (int v = 0; v < c.directions(); ++v) {
        const auto& dp = ps.per_direction[v];
        if (!dp.periodic) continue;
        double hw = h.value_at(c.center_plus(v)) * h.value_at(c.center_minus(v));
        double dv = map.orbit_derivative(c.center_plus(v), dp.k + 1) *
                    map.orbit_derivative(c.center_minus(v), dp.k + 1);
        sum += hw / std::fabs(dv);
    }
    return 1.0 - sum / denom;
}

std::optional<Rational> theta_exact(const SiteMap& map, const CollisionSpec& c,
                                    const PeriodStructure& ps, const InvariantDensity& h) {
    if (!map.rational_mode() || h.kind != InvariantDensity::Kind::Uniform)
        return std::nullopt;
    if (!ps.any_periodic()) return Rational(1);
    Rational denom(static_cast<long long>(c.directions()));
    Rational sum(0);
    for (int v = 0; v < c.directions(); ++v) {
        const auto& dp = ps.per_direction[v];
        if (!dp.periodic) continue;
        Rational dv = map.orbit_derivative_exact(c.center(v).first, dp.k + 1) *
                      map.orbit_derivative_exact(c.center(v).second, dp.k + 1);
        sum = sum + Rational(1) / dv.abs();
    }
    return Rational(1) - sum / denom;
}

double theta_d1(const SiteMap& map, const CollisionSpec& c, const PeriodStructure& ps) {
    if (c.directions() != 1) throw ValidationError("collision.centers", "d=1 form needs d=1");
    const auto& dp = ps.per_direction[0];
    if (!dp.periodic) return 1.0;
    double dv = map.orbit_derivative(c.center_plus(0), dp.k + 1) *
                map.orbit_derivative(c.center_minus(0), dp.k + 1);
    return 1.0 - 1.0 / std::fabs(dv);
}

RateReport predict(const SiteMap& map, const CollisionSpec& c, const LatticeSpec& l,
                   const InvariantDensity& h, int k_max) {
    RateReport r;
    r.periods = period_structure(map, c, k_max);
    r.xi_eps = xi_eps(c, h);
    try {
        r.mu0_H = measure_H(c, l, h);
        r.mu0_exact = true;
        r.mu0_lower = r.mu0_upper = r.mu0_H;
    } catch (const OverflowError&) {
        auto br = measure_H_bracket(c, l, h);
        r.mu0_H = br.mid();
        r.mu0_exact = false;
        r.mu0_lower = br.lower;
        r.mu0_upper = br.upper;
    }
    r.theta = theta(map, c, r.periods, h);
    r.lambda_pred = 1.0 - r.theta * r.mu0_H;
    r.rate_pred = r.theta * r.mu0_H;
    r.rate_per_unit_pred = r.xi_eps * r.theta;
    r.small_coupling_ok =
        static_cast<double>(l.L) * l.d * c.eps() * c.eps() <= 0.01;
    return r;
}

std::string RateReport::to_text() const {
    std::ostringstream os;
    os.precision(17);
    os << "xi_eps = " << xi_eps << "\n";
    os << "mu0_H = " << mu0_H << "\n";
    os << "mu0_mode = " << (mu0_exact ? "exact" : "bracket") << "\n";
    if (!mu0_exact)
        os << "mu0_bracket = [" << mu0_lower << ", " << mu0_upper << "]\n";
    os << "theta = " << theta << "\n";
    os << "lambda_pred = " << lambda_pred << "\n";
    os << "rate_pred = " << rate_pred << "\n";
    os << "rate_per_unit_pred = " << rate_per_unit_pred << "\n";
    for (size_t v = 0; v < periods.per_direction.size(); ++v) {
        const auto& dp = periods.per_direction[v];
        os << "period_v" << (v + 1) << " = ";
        if (dp.periodic)
            os << "periodic k=" << dp.k << " return_dir=" << (dp.return_dir + 1);
        else
            os << "nonperiodic (k_max=" << periods.k_max << ")";
        os << "\n";
    }
    if (!small_coupling_ok)
        os << "warning = L*d*eps^2 above 0.01; asymptotic predictions degrade\n";
    return os.str();
}

std::string RateReport::csv_header() const {
    return "xi_eps,mu0_H,mu0_exact,theta,lambda_pred,rate_pred,rate_per_unit_pred";
}

std::string RateReport::csv_row() const {
    std::ostringstream os;
    os.precision(17);
    os << xi_eps << ',' << mu0_H << ',' << (mu0_exact ? 1 : 0) << ',' << theta << ','
       << lambda_pred << ',' << rate_pred << ',' << rate_per_unit_pred;
    return os.str();
}

}  // namespace colmaps
