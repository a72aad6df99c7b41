#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "colmaps/collision.hpp"
#include "colmaps/lattice.hpp"
#include "colmaps/site_map.hpp"

namespace colmaps {

// Return structure of one collision center under the two-site product map
// tau x tau: either the pair (a_v, a_{-v}) is not periodic, or k is the
// smallest integer whose (k+1)-st iterate lands back in the center set S;
// return_dir identifies which element of S is hit.
struct DirectionPeriod {
    bool periodic = false;
    int k = -1;
    int return_dir = -1;
};

struct PeriodStructure {
    std::vector<DirectionPeriod> per_direction;
    int k_max = 64;
    bool rational_mode = true;

    bool any_periodic() const {
        for (const auto& dp : per_direction)
            if (dp.periodic) return true;
        return false;
    }
    // k -> directions with that return time
    std::map<int, std::vector<int>> V_k_plus() const {
        std::map<int, std::vector<int>> m;
        for (size_t v = 0; v < per_direction.size(); ++v)
            if (per_direction[v].periodic) m[per_direction[v].k].push_back(static_cast<int>(v));
        return m;
    }
};

// Iterates tau x tau on every center pair, exactly when the map and centers
// are rational (with cycle detection, so eventually-periodic points are never
// misclassified), otherwise in floats with absolute tolerance 1e-9 per
// coordinate. Throws BranchBoundaryError if an orbit point hits an endpoint.
PeriodStructure period_structure(const SiteMap& map, const CollisionSpec& c, int k_max);

// The rare-collision correction factor: 1 when no center is periodic,
// otherwise
//   1 - (sum_{k} sum_{v: k(v)=k} h(a_v) h(a_{-v}) / |(tau^{k+1})'(a_v) (tau^{k+1})'(a_{-v})|)
//       / (sum_v h(a_v) h(a_{-v})).
double theta(const SiteMap& map, const CollisionSpec& c, const PeriodStructure& ps,
             const InvariantDensity& h);

// Exact rational evaluation; available for affine maps with rational centers
// and uniform h.
std::optional<Rational> theta_exact(const SiteMap& map, const CollisionSpec& c,
                                    const PeriodStructure& ps, const InvariantDensity& h);

// d=1 reduction: 1 - 1/|(tau^{k+1})'(a_1) (tau^{k+1})'(a_{-1})|, independent
// of h.
double theta_d1(const SiteMap& map, const CollisionSpec& c, const PeriodStructure& ps);

struct RateReport {
    double xi_eps = 0.0;
    double mu0_H = 0.0;
    bool mu0_exact = true;
    double mu0_lower = 0.0, mu0_upper = 0.0;  // bracket when not exact
    double theta = 1.0;
    double lambda_pred = 1.0;      // 1 - theta * mu0_H
    double rate_pred = 0.0;        // theta * mu0_H
    double rate_per_unit_pred = 0.0;  // xi_eps * theta
    PeriodStructure periods;
    bool small_coupling_ok = true;  // L*d*eps^2 <= 0.01

    std::string to_text() const;   // flat key-value block
    std::string csv_header() const;
    std::string csv_row() const;
};

RateReport predict(const SiteMap& map, const CollisionSpec& c, const LatticeSpec& l,
                   const InvariantDensity& h, int k_max = 64);

}  // namespace colmaps
