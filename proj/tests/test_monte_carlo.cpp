#include "doctest.h"

#include <cmath>
#include <numeric>

#include "colmaps/monte_carlo.hpp"

using namespace colmaps;

namespace {
CollisionSpec c_period2(double eps) {
    return CollisionSpec(eps, {{Rational(1, 3), Rational(2, 3)}});
}
RunOptions opts(uint64_t seed, int threads = 1) {
    RunOptions o;
    o.seed = seed;
    o.threads = threads;
    return o;
}
}  // namespace

TEST_CASE("initial sampling: uniform moments and determinism") {
    LatticeSpec l(1, 4);
    SiteMap map = SiteMap::doubling();
    InvariantDensity h = InvariantDensity::uniform();
    SubstreamRng rng(42, 0);
    double sum = 0.0;
    const long n = 250000;
    for (long i = 0; i < n; ++i) {
        auto s = sample_initial(MeasureKind::Lebesgue, map, h, l, rng);
        sum += std::accumulate(s.x.begin(), s.x.end(), 0.0);
    }
    double mean = sum / (n * 4);
    double se = std::sqrt(1.0 / 12.0 / (n * 4));
    CHECK(std::fabs(mean - 0.5) <= 4 * se);

    SubstreamRng r1(42, 7), r2(42, 7);
    auto a = sample_initial(MeasureKind::Lebesgue, map, h, l, r1);
    auto b = sample_initial(MeasureKind::Lebesgue, map, h, l, r2);
    CHECK(a.x == b.x);  // bit-identical
}

TEST_CASE("initial sampling follows a tabulated density") {
    SiteMap m = SiteMap::perturbed_doubling(0.05);
    auto h = m.invariant_density(512);
    SubstreamRng rng(9, 0);
    const int bins = 32;
    const long n = 1000000;
    std::vector<long> counts(bins, 0);
    for (long i = 0; i < n; ++i) {
        double x = h.quantile(rng.next_unit());
        ++counts[std::min(bins - 1, static_cast<int>(x * bins))];
    }
    for (int b = 0; b < bins; ++b) {
        double p = h.integral(static_cast<double>(b) / bins, static_cast<double>(b + 1) / bins);
        double se = std::sqrt(p * (1 - p) * n);
        CHECK(std::fabs(static_cast<double>(counts[b]) - p * n) <= 5 * se);
    }
}

TEST_CASE("first hitting time") {
    SiteMap map = SiteMap::doubling();
    LatticeSpec l(1, 2);
    CollisionSpec c = c_period2(0.01);

    CHECK(first_hitting_time(LatticeState{{1.0 / 3, 2.0 / 3}}, map, c, l, 100) == 0);
    CHECK(first_hitting_time(LatticeState{{1.0 / 6, 5.0 / 6}}, map, c, l, 100) == 1);
    // the origin is a fixed point; with zones away from 0 it never hits
    CHECK(first_hitting_time(LatticeState{{0.0, 0.0}}, map, c, l, 20000) == -1);
}

TEST_CASE("survival curve basics") {
    SiteMap map = SiteMap::doubling();
    LatticeSpec l(1, 2);
    InvariantDensity h = InvariantDensity::uniform();

    // eps = 0: nothing ever collides
    auto c0 = survival_curve(map, c_period2(0.0), l, h, 2000, 50, MeasureKind::Lebesgue,
                             true, opts(1));
    for (long n = 0; n <= 50; ++n) CHECK(c0.survivors[n] == 2000);

    // unconditioned: survivors[1]/total estimates 1 - mu(H)
    double eps = 0.1;
    auto c1 = survival_curve(map, c_period2(eps), l, h, 200000, 10, MeasureKind::Lebesgue,
                             false, opts(2));
    double muH = 2 * eps * eps;
    double p = static_cast<double>(c1.survivors[1]) / c1.total;
    double se = std::sqrt(muH * (1 - muH) / c1.total);
    CHECK(std::fabs(p - (1 - muH)) <= 4 * se);
    // conditioned: survivors[1] = total by construction
    auto c2 = survival_curve(map, c_period2(eps), l, h, 5000, 10, MeasureKind::Lebesgue,
                             true, opts(2));
    CHECK(c2.survivors[1] == c2.total);

    // monotone nonincreasing
    for (long n = 1; n <= c1.n_max; ++n) CHECK(c1.survivors[n] <= c1.survivors[n - 1]);

    // nested zones with common random numbers: pointwise dominance
    auto cs = survival_curve(map, c_period2(0.02), l, h, 20000, 200, MeasureKind::Lebesgue,
                             false, opts(3));
    auto cb = survival_curve(map, c_period2(0.04), l, h, 20000, 200, MeasureKind::Lebesgue,
                             false, opts(3));
    for (long n = 0; n <= 200; ++n) CHECK(cs.survivors[n] >= cb.survivors[n]);
}

TEST_CASE("survival curve is identical across thread counts") {
    SiteMap map = SiteMap::doubling();
    LatticeSpec l(1, 4);
    InvariantDensity h = InvariantDensity::uniform();
    auto a = survival_curve(map, c_period2(0.03), l, h, 30000, 500, MeasureKind::Lebesgue,
                            true, opts(77, 1));
    auto b = survival_curve(map, c_period2(0.03), l, h, 30000, 500, MeasureKind::Lebesgue,
                            true, opts(77, 3));
    CHECK(a.survivors == b.survivors);
}

TEST_CASE("fit_rate on a synthetic exponential") {
    SurvivalCurve c;
    c.total = 1000000;
    c.n_max = 6000;
    c.survivors.resize(c.n_max + 1);
    for (long n = 0; n <= c.n_max; ++n)
        c.survivors[n] = static_cast<long>(std::llround(c.total * std::exp(-0.001 * n)));
    auto fit = fit_rate(c, 5);
    CHECK(std::fabs(fit.rate - 0.001) <= 1e-5);
    CHECK(fit.stderr_rate < 1e-5);
}

TEST_CASE("fit_rate recovers a known geometric hole model") {
    // two-state chain: survive with probability 1-p each step
    const double pesc = 0.002;
    SurvivalCurve c;
    c.total = 400000;
    c.n_max = 4000;
    c.survivors.assign(c.n_max + 1, 0);
    SubstreamRng rng(4, 0);
    std::vector<long> hist(c.n_max + 2, 0);
    for (long t = 0; t < c.total; ++t) {
        long n = 0;
        while (n <= c.n_max && rng.next_unit() >= pesc) ++n;
        ++hist[std::min(n, c.n_max + 1)];
    }
    long acc = 0;
    for (long n = c.n_max + 1; n >= 0; --n) {
        acc += hist[n];
        if (n <= c.n_max) c.survivors[n] = acc;
    }
    // survivors[n] = #{T >= n} where T ~ Geom; decay rate -ln(1-p)
    auto fit = fit_rate(c, 5);
    double target = -std::log(1.0 - pesc);
    CHECK(std::fabs(fit.rate - target) <= 3 * fit.stderr_rate + 1e-6);
}

TEST_CASE("fit_rate wants enough data") {
    SurvivalCurve c;
    c.total = 50;
    c.n_max = 30;
    c.survivors.assign(31, 50);
    CHECK_THROWS_AS(fit_rate(c, 5), InsufficientDataError);
}

TEST_CASE("q_k estimation: nonperiodic centers") {
    SiteMap map = SiteMap::doubling();
    LatticeSpec l(1, 4);
    CollisionSpec c(0.005, {{Rational(1, 10), Rational(9, 10)}});
    InvariantDensity h = InvariantDensity::uniform();
    auto r = estimate_qk(map, c, l, h, 8, 200000, opts(6));
    double sum = 0.0;
    for (double q : r.q) {
        CHECK(q >= 0.0);
        CHECK(q <= 1.0);
        sum += q;
    }
    CHECK(sum <= 1.0);
    CHECK(r.theta_emp >= 0.98);  // only O(eps) neighbor effects survive
}

TEST_CASE("q_k estimation: periodic centers at N=4") {
    SiteMap map = SiteMap::doubling();
    LatticeSpec l(1, 4);
    InvariantDensity h = InvariantDensity::uniform();
    auto r = estimate_qk(map, c_period2(0.01), l, h, 8, 200000, opts(8));
    // frozen from an independent fixed-point-arithmetic simulation at 2e6
    // samples: q_0 = 0.0101(2), q_1 = 0.0612(2), theta_emp = 0.9260(5);
    // q_0 ~ eps comes from a neighbor site wandering into a zone, and q_1 is
    // 1/16 with an O(eps) depletion
    CHECK(std::fabs(r.q[0] - 0.0101) <= 0.002);
    CHECK(std::fabs(r.q[1] - 0.0612) <= 0.003);
    for (size_t k = 2; k < r.q.size(); ++k) CHECK(r.q[k] <= 0.004);
    CHECK(std::fabs(r.theta_emp - 0.9260) <= 0.006);

    // the estimate approaches the asymptotic value 15/16 as eps shrinks
    double prev = 1.0;
    for (double eps : {0.04, 0.01, 0.0025}) {
        auto re = estimate_qk(map, c_period2(eps), l, h, 6, 150000, opts(9));
        double gap = std::fabs(re.theta_emp - 0.9375);
        CHECK(gap <= prev + 0.004);
        prev = gap;
    }
}

TEST_CASE("q_k estimation: N=2 sees the wrapped return") {
    // with two sites both orientations of the pair are collision states, so
    // the orbit of (1/3,2/3) re-enters after a single step: q_0 -> 1/4
    SiteMap map = SiteMap::doubling();
    LatticeSpec l(1, 2);
    InvariantDensity h = InvariantDensity::uniform();
    auto r = estimate_qk(map, c_period2(0.01), l, h, 8, 200000, opts(10));
    CHECK(std::fabs(r.q[0] - 0.25) <= 0.004);
    for (size_t k = 1; k < r.q.size(); ++k) CHECK(r.q[k] <= 0.003);
    CHECK(std::fabs(r.theta_emp - 0.75) <= 0.005);
}

TEST_CASE("q_k determinism across thread counts") {
    SiteMap map = SiteMap::doubling();
    LatticeSpec l(1, 4);
    InvariantDensity h = InvariantDensity::uniform();
    auto a = estimate_qk(map, c_period2(0.01), l, h, 6, 50000, opts(5, 1));
    auto b = estimate_qk(map, c_period2(0.01), l, h, 6, 50000, opts(5, 4));
    CHECK(a.q == b.q);
}

TEST_CASE("KS statistic calibration") {
    SubstreamRng rng(12, 0);
    std::vector<double> exp1;
    const long n = 10000;
    for (long i = 0; i < n; ++i) exp1.push_back(-std::log(1.0 - rng.next_unit()));
    CHECK(ks_exp1(exp1) <= 1.36 / std::sqrt(static_cast<double>(n)) * 1.3);

    // Uniform(0,1) against Exp(1): sup |t - (1 - e^-t)| on [0,1] is attained
    // at t = 1 with value e^-1
    std::vector<double> unif;
    for (long i = 0; i < n; ++i) unif.push_back(rng.next_unit());
    CHECK(ks_exp1(unif) == doctest::Approx(std::exp(-1.0)).epsilon(0.05));
}

TEST_CASE("hitting-time sample and censoring") {
    SiteMap map = SiteMap::doubling();
    LatticeSpec l(1, 2);
    InvariantDensity h = InvariantDensity::uniform();
    CollisionSpec c = c_period2(0.05);
    auto s = sample_hitting_times(map, c, l, h, 20000, 200000, opts(13));
    long cens = 0;
    for (auto x : s.censored) cens += x;
    CHECK(cens * 100 <= static_cast<long>(s.times.size()));
    // t = 0 happens with probability mu(H) = 2*eps^2 = 0.005
    long zeros = 0;
    for (size_t i = 0; i < s.times.size(); ++i)
        if (!s.censored[i] && s.times[i] == 0) ++zeros;
    double p0 = static_cast<double>(zeros) / 20000.0;
    CHECK(std::fabs(p0 - 0.005) <= 4 * std::sqrt(0.005 / 20000.0));

    s.rescale = 1.0;
    CHECK_NOTHROW(hitting_law_ks(s));
    CHECK(hitting_law_weighted_sup(s) >= 0.0);

    HittingSample all_censored;
    all_censored.times = {5, 5, 5};
    all_censored.censored = {1, 1, 1};
    CHECK_THROWS_AS(hitting_law_ks(all_censored), TooCensoredError);
}

TEST_CASE("default horizon") {
    CHECK(default_horizon(1e-3) == 20000);
    CHECK(default_horizon(0.0) == 10000000L);
    CHECK(default_horizon(1e-9) == 10000000L);
}
