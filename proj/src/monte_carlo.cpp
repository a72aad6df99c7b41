#include "colmaps/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace colmaps {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Flattened map/zone/pair tables for the hot trajectory loop.
struct Kernel {
    // branches: y = x*coef[j] + base[j] on [lo[j], hi[j])
    int nb = 0;
    double lo[16], hi[16], coef[16], base[16];
    bool perturbed = false;
    double pc = 0.0;
    double jitter = 0.0;
    // collision pairs: site a in zone (v,+), site b in zone (v,-)
    struct Pair { int a, b; double zplo, zphi, zmlo, zmhi; };
    std::vector<Pair> pairs;
    int L = 0;
    bool fast_d1 = false;
    double z1lo = 0, z1hi = 0, z2lo = 0, z2hi = 0;
    uint64_t lmask = 0;

    Kernel(const SiteMap& map, const CollisionSpec& c, const LatticeSpec& l, double jit)
        : jitter(jit), L(static_cast<int>(l.L)) {
        perturbed = !map.is_affine();
        pc = map.perturbation();
        nb = map.branch_count();
        const auto& e = map.endpoints();
        for (int j = 0; j < nb; ++j) {
            lo[j] = e[j];
            hi[j] = e[j + 1];
            double w = hi[j] - lo[j];
            double mid = (lo[j] + hi[j]) / 2;
            bool inc = map.eval(mid + w / 4) > map.eval(mid - w / 4);
            if (inc) { coef[j] = 1.0 / w; base[j] = -lo[j] / w; }
            else     { coef[j] = -1.0 / w; base[j] = hi[j] / w; }
        }
        if (c.eps() > 0.0)
            for (long p = 0; p < l.L; ++p)
                for (int v = 0; v < l.d; ++v)
                    pairs.push_back(Pair{static_cast<int>(p),
                                         static_cast<int>(l.neighbor(p, v, +1)),
                                         c.zone(v, +1).lo, c.zone(v, +1).hi,
                                         c.zone(v, -1).lo, c.zone(v, -1).hi});
        if (l.d == 1 && l.L >= 2 && l.L <= 64 && c.eps() > 0.0 && jitter > 0.0) {
            fast_d1 = true;
            z1lo = c.zone(0, +1).lo;
            z1hi = c.zone(0, +1).hi;
            z2lo = c.zone(0, -1).lo;
            z2hi = c.zone(0, -1).hi;
            lmask = L == 64 ? ~0ull : ((1ull << L) - 1);
        }
    }

    double eval1(double x) const {
        if (perturbed) {
            double y = 2.0 * x + pc * std::sin(kTwoPi * x);
            y -= std::floor(y);
            return y < 1.0 ? y : 0.0;
        }
        int j = 0;
        while (j + 1 < nb && x >= hi[j]) ++j;
        double y = x * coef[j] + base[j];
        return y < 0.0 ? 0.0 : (y > 1.0 ? 1.0 : y);
    }

    void step(double* x, SubstreamRng& rng) const {
        if (jitter > 0.0) {
            for (int i = 0; i < L; ++i) {
                double y = eval1(x[i]) + jitter * (rng.next_unit() - 0.5);
                if (y < 0.0) y += 1.0;
                if (y >= 1.0) y -= 1.0;
                x[i] = y;
            }
        } else {
            for (int i = 0; i < L; ++i) x[i] = eval1(x[i]);
        }
    }

    // one step plus the membership test, fused; the d=1 path tracks zone
    // membership in two bitmasks and resolves all neighbor pairs with one
    // rotate-and-mask
    bool advance(double* x, SubstreamRng& rng) const {
        if (fast_d1) {
            uint64_t mp = 0, mm = 0;
            for (int i = 0; i < L; ++i) {
                double y = eval1(x[i]) + jitter * (rng.next_unit() - 0.5);
                if (y < 0.0) y += 1.0;
                if (y >= 1.0) y -= 1.0;
                x[i] = y;
                mp |= static_cast<uint64_t>(y > z1lo && y < z1hi) << i;
                mm |= static_cast<uint64_t>(y > z2lo && y < z2hi) << i;
            }
            uint64_t rot = ((mm >> 1) | (mm << (L - 1))) & lmask;
            return (mp & rot) != 0;
        }
        step(x, rng);
        return in_H(x);
    }

    bool in_H(const double* x) const {
        for (const auto& pr : pairs) {
            double a = x[pr.a], b = x[pr.b];
            if (a > pr.zplo && a < pr.zphi && b > pr.zmlo && b < pr.zmhi) return true;
        }
        return false;
    }

    int multiplicity(const double* x) const {
        int m = 0;
        for (const auto& pr : pairs) {
            double a = x[pr.a], b = x[pr.b];
            if (a > pr.zplo && a < pr.zphi && b > pr.zmlo && b < pr.zmhi) ++m;
        }
        return m;
    }
};

int resolve_threads(int threads) {
    if (threads > 0) return threads;
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

template <typename Fn>
void parallel_ranges(long n, int threads, Fn fn) {
    threads = static_cast<int>(std::max<long>(1, std::min<long>(threads, n)));
    if (threads == 1) { fn(0, 0L, n); return; }
    std::vector<std::thread> pool;
    long chunk = (n + threads - 1) / threads;
    for (int w = 0; w < threads; ++w) {
        long b = w * chunk, e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([=, &fn] { fn(w, b, e); });
    }
    for (auto& t : pool) t.join();
}

void draw_initial(double* x, int L, MeasureKind kind, const InvariantDensity& h,
                  SubstreamRng& rng) {
    if (kind == MeasureKind::Lebesgue || h.kind == InvariantDensity::Kind::Uniform) {
        for (int i = 0; i < L; ++i) x[i] = rng.next_unit();
    } else {
        for (int i = 0; i < L; ++i) x[i] = h.quantile(rng.next_unit());
    }
}

}  // namespace

LatticeState sample_initial(MeasureKind kind, const SiteMap& map, const InvariantDensity& h,
                            const LatticeSpec& l, SubstreamRng& rng) {
    (void)map;
    LatticeState s;
    s.x.resize(static_cast<size_t>(l.L));
    draw_initial(s.x.data(), static_cast<int>(l.L), kind, h, rng);
    return s;
}

long first_hitting_time(const LatticeState& state, const SiteMap& map, const CollisionSpec& c,
                        const LatticeSpec& l, long n_max) {
    if (n_max < 1) throw ValidationError("run.n_max", "n_max must be >= 1");
    Kernel k(map, c, l, 0.0);
    std::vector<double> x = state.x;
    if (k.in_H(x.data())) return 0;
    SubstreamRng rng(0, 0);  // unused at jitter 0
    for (long n = 1; n <= n_max; ++n) {
        k.step(x.data(), rng);
        if (k.in_H(x.data())) return n;
    }
    return -1;
}

SurvivalCurve survival_curve(const SiteMap& map, const CollisionSpec& c, const LatticeSpec& l,
                             const InvariantDensity& h, long n_traj, long n_max,
                             MeasureKind kind, bool condition_on_x0, const RunOptions& opt) {
    if (n_traj < 1) throw ValidationError("run.trajectories", "need at least one trajectory");
    if (n_max < 1) throw ValidationError("run.n_max", "n_max must be >= 1");
    Kernel kern(map, c, l, opt.jitter);
    const int L = static_cast<int>(l.L);
    int threads = resolve_threads(opt.threads);

    // hit-time histogram per worker; merged after the join
    std::vector<std::vector<long>> hist(
        static_cast<size_t>(std::max<long>(1, std::min<long>(threads, n_traj))),
        std::vector<long>(static_cast<size_t>(n_max) + 2, 0));
    parallel_ranges(n_traj, threads, [&](int w, long b, long e) {
        std::vector<double> x(static_cast<size_t>(L));
        auto& hw = hist[static_cast<size_t>(w)];
        for (long t = b; t < e; ++t) {
            SubstreamRng rng(opt.seed, static_cast<uint64_t>(t));
            do {
                draw_initial(x.data(), L, kind, h, rng);
            } while (condition_on_x0 && kern.in_H(x.data()));
            long hit = -1;
            if (!condition_on_x0 && kern.in_H(x.data())) hit = 0;
            if (hit < 0) {
                for (long n = 1; n <= n_max; ++n)
                    if (kern.advance(x.data(), rng)) { hit = n; break; }
            }
            ++hw[static_cast<size_t>(hit < 0 ? n_max + 1 : hit)];
        }
    });

    SurvivalCurve curve;
    curve.n_max = n_max;
    curve.total = n_traj;
    curve.seed = opt.seed;
    curve.measure_kind = kind;
    curve.survivors.assign(static_cast<size_t>(n_max) + 1, 0);
    std::vector<long> merged(static_cast<size_t>(n_max) + 2, 0);
    for (const auto& hw : hist)
        for (size_t i = 0; i < hw.size(); ++i) merged[i] += hw[i];
    // survivors[n] = #{t >= n}: suffix sums of the hit-time histogram
    long acc = merged[static_cast<size_t>(n_max) + 1];  // censored survive everything
    for (long n = n_max; n >= 0; --n) {
        acc += merged[static_cast<size_t>(n)];
        // survivors[n] counts t >= n, so hits exactly at n still count here
        curve.survivors[static_cast<size_t>(n)] = acc;
    }
    return curve;
}

FitResult fit_rate(const SurvivalCurve& curve, long burn_in) {
    long last = -1;
    for (long n = 0; n <= curve.n_max; ++n)
        if (curve.survivors[static_cast<size_t>(n)] >= 100) last = n;
    long lo = std::max<long>(burn_in, 1);
    if (last - lo + 1 < 10)
        throw InsufficientDataError("fewer than 10 usable steps above 100 survivors");

    // Weighted least squares on the per-step increments of -ln(survivors).
    // Successive curve points share trajectories, so the increments are the
    // independent quantities; under a constant hazard their variance is
    // proportional to 1/S_n, which makes the exposure S_n the right weight.
    // The stderr propagates the binomial variance of S_{n+1} | S_n,
    // var(y_{n+1} - y_n) = 1/S_{n+1} - 1/S_n.
    double exposure = 0.0, swy = 0.0, var_acc = 0.0;
    for (long n = lo; n < last; ++n) {
        double s0 = static_cast<double>(curve.survivors[static_cast<size_t>(n)]);
        double s1 = static_cast<double>(curve.survivors[static_cast<size_t>(n) + 1]);
        if (s1 <= 0 || s0 < s1) continue;
        exposure += s0;
        swy += s0 * (std::log(s0) - std::log(s1));
        var_acc += s0 * s0 * (1.0 / s1 - 1.0 / s0);
    }
    if (exposure <= 0) throw InsufficientDataError("degenerate fit window");
    FitResult fr;
    fr.rate = swy / exposure;
    fr.stderr_rate = std::sqrt(std::max(var_acc, 1.0)) / exposure;
    fr.window_lo = lo;
    fr.window_hi = last;
    return fr;
}

QkResult estimate_qk(const SiteMap& map, const CollisionSpec& c, const LatticeSpec& l,
                     const InvariantDensity& h, int k_max, long n_samples,
                     const RunOptions& opt) {
    if (k_max < 1) throw ValidationError("run.qk_kmax", "k_max must be >= 1");
    if (n_samples < 1) throw ValidationError("run.qk_samples", "need samples");
    if (c.eps() <= 0.0) throw ValidationError("collision.eps", "q_k needs eps > 0");
    Kernel kern(map, c, l, opt.jitter);
    const int L = static_cast<int>(l.L);
    const auto all_pairs = l.collision_pairs();

    // box weights: h-mass of A_{+v} times h-mass of A_{-v}, same for every site
    std::vector<double> wdir, cum;
    double wtot = 0.0;
    for (int v = 0; v < l.d; ++v) {
        double m = h.integral(c.zone(v, +1).lo, c.zone(v, +1).hi) *
                   h.integral(c.zone(v, -1).lo, c.zone(v, -1).hi);
        wdir.push_back(m);
    }
    for (size_t i = 0; i < all_pairs.size(); ++i) {
        wtot += wdir[static_cast<size_t>(all_pairs[i].second)];
        cum.push_back(wtot);
    }

    int threads = resolve_threads(opt.threads);
    long nw = std::max<long>(1, std::min<long>(threads, n_samples));
    std::vector<std::vector<long>> counts(static_cast<size_t>(nw),
                                          std::vector<long>(static_cast<size_t>(k_max), 0));
    parallel_ranges(n_samples, threads, [&](int w, long b, long e) {
        std::vector<double> x(static_cast<size_t>(L));
        auto& cw = counts[static_cast<size_t>(w)];
        for (long t = b; t < e; ++t) {
            SubstreamRng rng(opt.seed ^ 0x9e3779b9ull, static_cast<uint64_t>(t));
            // rejection until accepted against multiplicity
            for (;;) {
                double u = rng.next_unit() * wtot;
                size_t i = static_cast<size_t>(
                    std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
                if (i >= all_pairs.size()) i = all_pairs.size() - 1;
                auto [p, v] = all_pairs[i];
                long q = l.neighbor(p, v, +1);
                draw_initial(x.data(), L, MeasureKind::Mu0, h, rng);
                x[static_cast<size_t>(p)] =
                    h.quantile_in(c.zone(v, +1).lo, c.zone(v, +1).hi, rng.next_unit());
                x[static_cast<size_t>(q)] =
                    h.quantile_in(c.zone(v, -1).lo, c.zone(v, -1).hi, rng.next_unit());
                int mult = kern.multiplicity(x.data());
                if (mult < 1) mult = 1;
                if (mult == 1 || rng.next_unit() * mult < 1.0) break;
            }
            for (int k = 0; k < k_max; ++k)
                if (kern.advance(x.data(), rng)) { ++cw[static_cast<size_t>(k)]; break; }
        }
    });

    QkResult r;
    r.n_samples = n_samples;
    r.q.assign(static_cast<size_t>(k_max), 0.0);
    r.stderr_q.assign(static_cast<size_t>(k_max), 0.0);
    double sum = 0.0;
    for (int k = 0; k < k_max; ++k) {
        long ck = 0;
        for (const auto& cw : counts) ck += cw[static_cast<size_t>(k)];
        double qk = static_cast<double>(ck) / static_cast<double>(n_samples);
        r.q[static_cast<size_t>(k)] = qk;
        r.stderr_q[static_cast<size_t>(k)] =
            std::sqrt(std::max(qk * (1.0 - qk), 1e-300) / static_cast<double>(n_samples));
        sum += qk;
    }
    r.theta_emp = 1.0 - sum;
    return r;
}

HittingSample sample_hitting_times(const SiteMap& map, const CollisionSpec& c,
                                   const LatticeSpec& l, const InvariantDensity& h,
                                   long n_samples, long n_max, const RunOptions& opt) {
    if (n_samples < 1) throw ValidationError("run.hitting_samples", "need samples");
    Kernel kern(map, c, l, opt.jitter);
    const int L = static_cast<int>(l.L);
    HittingSample out;
    out.seed = opt.seed;
    out.times.assign(static_cast<size_t>(n_samples), 0);
    out.censored.assign(static_cast<size_t>(n_samples), 0);
    int threads = resolve_threads(opt.threads);
    parallel_ranges(n_samples, threads, [&](int, long b, long e) {
        std::vector<double> x(static_cast<size_t>(L));
        for (long t = b; t < e; ++t) {
            SubstreamRng rng(opt.seed ^ 0x5bf0365ull, static_cast<uint64_t>(t));
            draw_initial(x.data(), L, MeasureKind::Mu0, h, rng);
            long hit = kern.in_H(x.data()) ? 0 : -1;
            if (hit < 0) {
                for (long n = 1; n <= n_max; ++n)
                    if (kern.advance(x.data(), rng)) { hit = n; break; }
            }
            if (hit < 0) {
                out.times[static_cast<size_t>(t)] = n_max;
                out.censored[static_cast<size_t>(t)] = 1;
            } else {
                out.times[static_cast<size_t>(t)] = hit;
            }
        }
    });
    return out;
}

double ks_exp1(std::vector<double> rescaled) {
    if (rescaled.empty()) throw InsufficientDataError("empty sample");
    std::sort(rescaled.begin(), rescaled.end());
    const double n = static_cast<double>(rescaled.size());
    double d = 0.0;
    for (size_t i = 0; i < rescaled.size(); ++i) {
        double f = 1.0 - std::exp(-rescaled[i]);
        double d1 = std::fabs(static_cast<double>(i + 1) / n - f);
        double d2 = std::fabs(static_cast<double>(i) / n - f);
        d = std::max(d, std::max(d1, d2));
    }
    return d;
}

namespace {
std::vector<double> rescaled_uncensored(const HittingSample& s) {
    long cens = 0;
    for (auto c : s.censored) cens += c;
    if (100 * cens > static_cast<long>(s.times.size()))
        throw TooCensoredError("more than 1% of hitting times censored");
    std::vector<double> r;
    r.reserve(s.times.size());
    for (size_t i = 0; i < s.times.size(); ++i)
        if (!s.censored[i]) r.push_back(static_cast<double>(s.times[i]) * s.rescale);
    return r;
}
}  // namespace

double hitting_law_ks(const HittingSample& sample) {
    return ks_exp1(rescaled_uncensored(sample));
}

double hitting_law_weighted_sup(const HittingSample& sample) {
    auto r = rescaled_uncensored(sample);
    std::sort(r.begin(), r.end());
    const double n = static_cast<double>(r.size());
    double m = 0.0;
    for (size_t i = 0; i < r.size(); ++i) {
        double t = r[i];
        double f = 1.0 - std::exp(-t);
        double diff = std::max(std::fabs(static_cast<double>(i + 1) / n - f),
                               std::fabs(static_cast<double>(i) / n - f));
        m = std::max(m, diff * std::exp(t) / std::max(t, 1.0));
    }
    return m;
}

long default_horizon(double expected_rate) {
    if (expected_rate <= 0.0) return 10000000L;
    double h = std::ceil(20.0 / expected_rate);
    return static_cast<long>(std::min(h, 1e7));
}

}  // namespace colmaps
