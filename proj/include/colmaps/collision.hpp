#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "colmaps/lattice.hpp"
#include "colmaps/rational.hpp"
#include "colmaps/site_map.hpp"

namespace colmaps {

// Open interval; empty when eps = 0.
struct Zone {
    double lo = 0.0, hi = 0.0;
    bool contains(double x) const { return x > lo && x < hi; }
    double width() const { return hi - lo; }
};

// Collision zones: per direction v in V+ the centers (a_v, a_{-v}); the zones
// A_{eps,w} are centered open intervals of width eps, for all 2d signed
// directions. Zones must be pairwise disjoint and stay inside (0,1).
class CollisionSpec {
  public:
    CollisionSpec(double eps, std::vector<std::pair<Rational, Rational>> centers);

    double eps() const { return eps_; }
    int directions() const { return static_cast<int>(centers_.size()); }
    bool rational_centers() const { return true; }

    const std::pair<Rational, Rational>& center(int dir) const { return centers_[dir]; }
    double center_plus(int dir) const { return centers_d_[dir].first; }
    double center_minus(int dir) const { return centers_d_[dir].second; }

    // sign: +1 for A_{eps,v}, -1 for A_{eps,-v}
    const Zone& zone(int dir, int sign) const {
        return sign > 0 ? zones_plus_[dir] : zones_minus_[dir];
    }
    bool in_zone(double x, int dir, int sign) const { return zone(dir, sign).contains(x); }

    // shrink/grow the zones around the same centers
    CollisionSpec with_eps(double eps) const { return CollisionSpec(eps, centers_); }

    void validate_against(const SiteMap& map, const LatticeSpec& lattice) const;

  private:
    double eps_;
    std::vector<std::pair<Rational, Rational>> centers_;
    std::vector<std::pair<double, double>> centers_d_;
    std::vector<Zone> zones_plus_, zones_minus_;
};

// One point of [0,1]^L, one coordinate per site.
struct LatticeState {
    std::vector<double> x;
    long size() const { return static_cast<long>(x.size()); }
};

// All (p, v in V+) with x_p in A_{eps,v} and x_{p+v} in A_{eps,-v}; the state
// is a collision state iff the result is non-empty.
std::vector<std::pair<long, int>> collision_pairs_of(const LatticeState& s,
                                                     const CollisionSpec& c,
                                                     const LatticeSpec& l);

bool in_collision_set(const LatticeState& s, const CollisionSpec& c, const LatticeSpec& l);

// The collision coupling: colliding partners swap values, everything else is
// unchanged. The output is a coordinate permutation of the input.
LatticeState apply_phi(const LatticeState& s, const CollisionSpec& c, const LatticeSpec& l);

LatticeState step_T0(const LatticeState& s, const SiteMap& map);
LatticeState step_Teps(const LatticeState& s, const SiteMap& map, const CollisionSpec& c,
                       const LatticeSpec& l);

// mu_0 of the intersection of collision boxes: zero when two pairs pin a
// shared site to different zones, otherwise the product over constrained
// sites of the zone h-integral.
double measure_box_intersection(const std::vector<std::pair<long, int>>& pairs,
                                const CollisionSpec& c, const LatticeSpec& l,
                                const InvariantDensity& h);

// Exact mu_0(H_eps) by inclusion-exclusion over compatible box families
// (branch-and-prune over the fixed pair order). Throws OverflowError past
// 1e8 surviving families.
double measure_H(const CollisionSpec& c, const LatticeSpec& l, const InvariantDensity& h);

struct MeasureBracket {
    double lower = 0.0, upper = 0.0;
    double mid() const { return 0.5 * (lower + upper); }
};

// Bracket [L*Xi*(1 - sum_k C(L,k) (d Cbar^2 eps^2)^k), L*Xi] for lattices too
// large to enumerate.
MeasureBracket measure_H_bracket(const CollisionSpec& c, const LatticeSpec& l,
                                 const InvariantDensity& h);

// Xi_eps = sum_v (int_{A_v} h)(int_{A_{-v}} h); d*eps^2 for uniform h.
double xi_eps(const CollisionSpec& c, const InvariantDensity& h);

}  // namespace colmaps
