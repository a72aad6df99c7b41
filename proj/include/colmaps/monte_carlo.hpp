#pragma once

#include <cstdint>
#include <vector>

#include "colmaps/collision.hpp"
#include "colmaps/lattice.hpp"
#include "colmaps/rng.hpp"
#include "colmaps/site_map.hpp"

namespace colmaps {

enum class MeasureKind { Lebesgue, Mu0 };

// Per-step counts of trajectories that have seen no collision through step
// n-1 (survivors[n] = #{t >= n}).
struct SurvivalCurve {
    long n_max = 0;
    std::vector<long> survivors;
    long total = 0;
    uint64_t seed = 0;
    MeasureKind measure_kind = MeasureKind::Lebesgue;
};

struct HittingSample {
    std::vector<long> times;        // first hitting times; censored entries hold n_max
    std::vector<uint8_t> censored;  // 1 where the horizon was reached
    double rescale = 1.0;           // factor applied before the law comparison
    uint64_t seed = 0;
};

struct FitResult {
    double rate = 0.0;
    double stderr_rate = 0.0;
    long window_lo = 0, window_hi = 0;
};

struct QkResult {
    std::vector<double> q;       // q_0 .. q_{k_max-1}
    std::vector<double> stderr_q;
    double theta_emp = 1.0;      // 1 - sum q_k
    long n_samples = 0;
};

// Shared knobs of every trajectory experiment. `jitter` feeds uniform noise
// of that amplitude into each coordinate per step (mod 1): binary expanding
// maps exhaust the 52-bit mantissa after ~52 iterates and collapse onto a
// fixed point, so long trajectories need fresh low-order randomness. At
// 2^-48 the perturbation of any zone-membership probability is ~1e-12.
// Set jitter = 0 for strictly deterministic stepping.
struct RunOptions {
    uint64_t seed = 1;
    int threads = 1;  // 0 = hardware concurrency; never changes results
    double jitter = 0x1.0p-48;
};

LatticeState sample_initial(MeasureKind kind, const SiteMap& map, const InvariantDensity& h,
                            const LatticeSpec& l, SubstreamRng& rng);

// inf{n >= 0 : T0^n(state) in H_eps}; -1 when censored at n_max. Strictly
// deterministic (no jitter), intended for single-state queries.
long first_hitting_time(const LatticeState& state, const SiteMap& map, const CollisionSpec& c,
                        const LatticeSpec& l, long n_max);

// n_traj independent trajectories; initial states conditioned on no collision
// at time 0 when condition_on_x0 is set (rejection).
SurvivalCurve survival_curve(const SiteMap& map, const CollisionSpec& c, const LatticeSpec& l,
                             const InvariantDensity& h, long n_traj, long n_max,
                             MeasureKind kind, bool condition_on_x0, const RunOptions& opt);

// Weighted least-squares slope of -ln(survivors/total) over
// [burn_in, last n with survivors >= 100]; throws InsufficientDataError when
// fewer than 10 usable steps remain.
FitResult fit_rate(const SurvivalCurve& curve, long burn_in = 5);

// q_k estimation: draw from mu_0 conditioned on the collision set (box choice
// proportional to box measure, acceptance 1/multiplicity), follow T0 for
// k_max steps, record the first return.
QkResult estimate_qk(const SiteMap& map, const CollisionSpec& c, const LatticeSpec& l,
                     const InvariantDensity& h, int k_max, long n_samples,
                     const RunOptions& opt);

// First hitting times of n_samples mu_0-distributed (unconditioned) states.
HittingSample sample_hitting_times(const SiteMap& map, const CollisionSpec& c,
                                   const LatticeSpec& l, const InvariantDensity& h,
                                   long n_samples, long n_max, const RunOptions& opt);

// sup_t |empirical survival - e^-t| over the jump points of the rescaled
// sample. Throws TooCensoredError above 1% censoring.
double hitting_law_ks(const HittingSample& sample);
// diagnostic companion: max |difference| * e^t / max(t,1)
double hitting_law_weighted_sup(const HittingSample& sample);

// KS distance of an already-rescaled sample against Exp(1).
double ks_exp1(std::vector<double> rescaled);

// default censoring horizon: ceil(20 / expected_rate), capped at 1e7
long default_horizon(double expected_rate);

}  // namespace colmaps
