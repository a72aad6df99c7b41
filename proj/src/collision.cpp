#include "colmaps/collision.hpp"

#include <algorithm>
#include <cmath>

namespace colmaps {

CollisionSpec::CollisionSpec(double eps, std::vector<std::pair<Rational, Rational>> centers)
    : eps_(eps), centers_(std::move(centers)) {
    if (eps < 0.0) throw ValidationError("collision.eps", "eps must be >= 0");
    if (centers_.empty()) throw ValidationError("collision.centers", "no directions given");
    for (const auto& [av, amv] : centers_) {
        centers_d_.emplace_back(av.to_double(), amv.to_double());
        double a = av.to_double(), b = amv.to_double();
        zones_plus_.push_back(eps > 0 ? Zone{a - eps / 2, a + eps / 2} : Zone{a, a});
        zones_minus_.push_back(eps > 0 ? Zone{b - eps / 2, b + eps / 2} : Zone{b, b});
    }
}

void CollisionSpec::validate_against(const SiteMap& map, const LatticeSpec& lattice) const {
    if (static_cast<int>(centers_.size()) != lattice.d)
        throw ValidationError("collision.centers",
                              "need one (a_v, a_-v) pair per lattice direction");
    std::vector<std::pair<Zone, std::string>> zs;
    for (int v = 0; v < directions(); ++v) {
        zs.push_back({zone(v, +1), "collision.centers_" + std::to_string(v + 1) + "[a_v]"});
        zs.push_back({zone(v, -1), "collision.centers_" + std::to_string(v + 1) + "[a_-v]"});
    }
    for (const auto& [z, name] : zs) {
        if (eps_ > 0 && (z.lo <= 0.0 || z.hi >= 1.0))
            throw ValidationError(name, "zone leaves (0,1)");
        for (double e : map.endpoints()) {
            double c = 0.5 * (z.lo + z.hi);
            if (c == e)
                throw ValidationError(name, "collision center sits on a branch endpoint");
            if (eps_ > 0 && e > z.lo && e < z.hi)
                throw ValidationError(name, "zone straddles a branch endpoint");
        }
    }
    for (size_t i = 0; i < zs.size(); ++i)
        for (size_t j = i + 1; j < zs.size(); ++j) {
            const Zone& a = zs[i].first;
            const Zone& b = zs[j].first;
            bool disjoint = eps_ == 0.0 ? (a.lo != b.lo) : (a.hi <= b.lo || b.hi <= a.lo);
            if (!disjoint)
                throw ValidationError(zs[i].second,
                                      "zone overlaps " + zs[j].second);
        }
}

std::vector<std::pair<long, int>> collision_pairs_of(const LatticeState& s,
                                                     const CollisionSpec& c,
                                                     const LatticeSpec& l) {
    std::vector<std::pair<long, int>> out;
    if (c.eps() == 0.0) return out;
    for (long p = 0; p < l.L; ++p)
        for (int v = 0; v < l.d; ++v)
            if (c.in_zone(s.x[p], v, +1) && c.in_zone(s.x[l.neighbor(p, v, +1)], v, -1))
                out.emplace_back(p, v);
    return out;
}

bool in_collision_set(const LatticeState& s, const CollisionSpec& c, const LatticeSpec& l) {
    if (c.eps() == 0.0) return false;
    for (long p = 0; p < l.L; ++p)
        for (int v = 0; v < l.d; ++v)
            if (c.in_zone(s.x[p], v, +1) && c.in_zone(s.x[l.neighbor(p, v, +1)], v, -1))
                return true;
    return false;
}

LatticeState apply_phi(const LatticeState& s, const CollisionSpec& c, const LatticeSpec& l) {
    LatticeState out = s;
    if (c.eps() == 0.0) return out;
    for (long p = 0; p < l.L; ++p) {
        // x_p lies in at most one zone (zones are disjoint); check both
        // orientations of every direction
        for (int v = 0; v < l.d; ++v) {
            if (c.in_zone(s.x[p], v, +1)) {
                long q = l.neighbor(p, v, +1);
                if (c.in_zone(s.x[q], v, -1)) out.x[p] = s.x[q];
            } else if (c.in_zone(s.x[p], v, -1)) {
                long q = l.neighbor(p, v, -1);
                if (c.in_zone(s.x[q], v, +1)) out.x[p] = s.x[q];
            }
        }
    }
    return out;
}

LatticeState step_T0(const LatticeState& s, const SiteMap& map) {
    LatticeState out = s;
    for (auto& xi : out.x) xi = map.eval(xi);
    return out;
}

LatticeState step_Teps(const LatticeState& s, const SiteMap& map, const CollisionSpec& c,
                       const LatticeSpec& l) {
    return apply_phi(step_T0(s, map), c, l);
}

namespace {

// per-direction h-mass of the two zones
struct ZoneMass {
    std::vector<double> plus, minus;
};

ZoneMass zone_masses(const CollisionSpec& c, const InvariantDensity& h) {
    ZoneMass m;
    for (int v = 0; v < c.directions(); ++v) {
        m.plus.push_back(h.integral(c.zone(v, +1).lo, c.zone(v, +1).hi));
        m.minus.push_back(h.integral(c.zone(v, -1).lo, c.zone(v, -1).hi));
    }
    return m;
}

// zone label: dir*2 for A_{+v}, dir*2+1 for A_{-v}; -1 unconstrained
constexpr int kFree = -1;

struct IeContext {
    const LatticeSpec* l;
    std::vector<std::pair<long, int>> pairs;
    ZoneMass mass;
    std::vector<int> constraint;  // per site
    double total = 0.0;
    long families = 0;
    long limit = 100000000;
};

// Depth-first over increasing pair indices; sign alternates with family size.
// A family dies as soon as one site would carry two different zone labels,
// and every extension of a dead family is dead too, so the subtree is pruned.
void ie_recurse(IeContext& ctx, size_t start, int depth, double product) {
    const int sign = (depth % 2 == 0) ? +1 : -1;  // depth = current family size - 1
    for (size_t i = start; i < ctx.pairs.size(); ++i) {
        auto [p, v] = ctx.pairs[i];
        long q = ctx.l->neighbor(p, v, +1);
        int lab_p = v * 2, lab_q = v * 2 + 1;
        int old_p = ctx.constraint[p], old_q = ctx.constraint[q];
        if ((old_p != kFree && old_p != lab_p) || (old_q != kFree && old_q != lab_q))
            continue;
        double delta = 1.0;
        if (old_p == kFree) delta *= ctx.mass.plus[v];
        if (old_q == kFree) delta *= ctx.mass.minus[v];
        ctx.constraint[p] = lab_p;
        ctx.constraint[q] = lab_q;
        if (++ctx.families > ctx.limit)
            throw OverflowError("inclusion-exclusion family count exceeded 1e8");
        ctx.total += sign * product * delta;
        ie_recurse(ctx, i + 1, depth + 1, product * delta);
        ctx.constraint[p] = old_p;
        ctx.constraint[q] = old_q;
    }
}

}  // namespace

double measure_box_intersection(const std::vector<std::pair<long, int>>& pairs,
                                const CollisionSpec& c, const LatticeSpec& l,
                                const InvariantDensity& h) {
    if (pairs.empty()) throw ValidationError("pairs", "empty box family");
    auto mass = zone_masses(c, h);
    std::vector<int> constraint(static_cast<size_t>(l.L), kFree);
    double product = 1.0;
    for (auto [p, v] : pairs) {
        long q = l.neighbor(p, v, +1);
        int lab_p = v * 2, lab_q = v * 2 + 1;
        if (constraint[p] != kFree && constraint[p] != lab_p) return 0.0;
        if (constraint[q] != kFree && constraint[q] != lab_q) return 0.0;
        if (constraint[p] == kFree) product *= mass.plus[v];
        if (constraint[q] == kFree) product *= mass.minus[v];
        constraint[p] = lab_p;
        constraint[q] = lab_q;
    }
    return product;
}

double measure_H(const CollisionSpec& c, const LatticeSpec& l, const InvariantDensity& h) {
    if (c.eps() == 0.0) return 0.0;
    IeContext ctx;
    ctx.l = &l;
    ctx.pairs = l.collision_pairs();
    ctx.mass = zone_masses(c, h);
    ctx.constraint.assign(static_cast<size_t>(l.L), kFree);
    ie_recurse(ctx, 0, 0, 1.0);
    return ctx.total;
}

MeasureBracket measure_H_bracket(const CollisionSpec& c, const LatticeSpec& l,
                                 const InvariantDensity& h) {
    double xi = xi_eps(c, h);
    double upper = static_cast<double>(l.L) * xi;
    double x = static_cast<double>(l.d) * h.upper_bound * h.upper_bound * c.eps() * c.eps();
    // sum_{k=2}^{floor(L/2)} C(L,k-1) x^(k-1); empty for L <= 3, where the
    // boxes are pairwise disjoint and the measure equals L*Xi exactly
    double defect = 0.0, term = 1.0;
    for (long j = 1; j <= l.L / 2 - 1; ++j) {
        term *= x * static_cast<double>(l.L - j + 1) / static_cast<double>(j);
        defect += term;
        if (term < 1e-18 * (1.0 + defect)) break;
    }
    double lower = upper * std::max(0.0, 1.0 - defect);
    return MeasureBracket{lower, upper};
}

double xi_eps(const CollisionSpec& c, const InvariantDensity& h) {
    auto mass = zone_masses(c, h);
    double xi = 0.0;
    for (int v = 0; v < c.directions(); ++v) xi += mass.plus[v] * mass.minus[v];
    return xi;
}

}  // namespace colmaps
