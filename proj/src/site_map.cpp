#include "colmaps/site_map.hpp"

#include <algorithm>
#include <cmath>

namespace colmaps {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

// ---------------------------------------------------------------- density --

InvariantDensity InvariantDensity::tabulated(std::vector<double> values) {
    InvariantDensity d;
    d.kind = Kind::Tabulated;
    d.table = std::move(values);
    if (d.table.empty()) throw ValidationError("density.table", "empty table");
    double mass = 0.0;
    for (double v : d.table) {
        if (!(v > 0.0)) throw NumericError("tabulated density not strictly positive");
        mass += v;
    }
    mass /= static_cast<double>(d.table.size());
    for (double& v : d.table) v /= mass;  // renormalize to integral 1
    d.lower_bound = *std::min_element(d.table.begin(), d.table.end());
    d.upper_bound = *std::max_element(d.table.begin(), d.table.end());
    return d;
}

double InvariantDensity::value_at(double x) const {
    if (kind == Kind::Uniform) return 1.0;
    auto n = table.size();
    auto i = static_cast<size_t>(std::min(std::max(x, 0.0), 1.0 - 1e-15) * static_cast<double>(n));
    return table[std::min(i, n - 1)];
}

double InvariantDensity::integral(double lo, double hi) const {
    if (hi <= lo) return 0.0;
    lo = std::max(lo, 0.0);
    hi = std::min(hi, 1.0);
    if (kind == Kind::Uniform) return hi - lo;
    const auto n = static_cast<double>(table.size());
    double acc = 0.0;
    size_t i0 = static_cast<size_t>(lo * n);
    size_t i1 = std::min(static_cast<size_t>(hi * n), table.size() - 1);
    for (size_t i = i0; i <= i1; ++i) {
        double a = std::max(lo, static_cast<double>(i) / n);
        double b = std::min(hi, static_cast<double>(i + 1) / n);
        if (b > a) acc += table[i] * (b - a);
    }
    return acc;
}

double InvariantDensity::quantile(double u) const {
    return quantile_in(0.0, 1.0, u);
}

double InvariantDensity::quantile_in(double lo, double hi, double u) const {
    if (kind == Kind::Uniform) return lo + u * (hi - lo);
    double total = integral(lo, hi);
    double target = u * total;
    // walk the bins covering (lo,hi); invert linearly inside the last one
    const auto n = static_cast<double>(table.size());
    size_t i0 = static_cast<size_t>(std::max(lo, 0.0) * n);
    size_t i1 = std::min(static_cast<size_t>(std::min(hi, 1.0) * n), table.size() - 1);
    double acc = 0.0;
    for (size_t i = i0; i <= i1; ++i) {
        double a = std::max(lo, static_cast<double>(i) / n);
        double b = std::min(hi, static_cast<double>(i + 1) / n);
        if (b <= a) continue;
        double m = table[i] * (b - a);
        if (acc + m >= target || i == i1) {
            double frac = m > 0 ? (target - acc) / m : 0.0;
            return a + std::min(std::max(frac, 0.0), 1.0) * (b - a);
        }
        acc += m;
    }
    return hi;
}

// ---------------------------------------------------------------- site map --

SiteMap SiteMap::doubling() {
    SiteMap m = affine({Rational(0), Rational(1, 2), Rational(1)}, {true, true});
    m.family_ = "doubling";
    return m;
}

SiteMap SiteMap::tent() {
    SiteMap m = affine({Rational(0), Rational(1, 2), Rational(1)}, {true, false});
    m.family_ = "tent";
    return m;
}

SiteMap SiteMap::affine(std::vector<Rational> endpoints, std::vector<bool> increasing) {
    if (endpoints.size() < 3)
        throw ValidationError("map.endpoints", "need at least two branches");
    if (increasing.size() != endpoints.size() - 1)
        throw ValidationError("map.orientation",
                              "expected one orientation per branch");
    if (endpoints.front() != Rational(0) || endpoints.back() != Rational(1))
        throw ValidationError("map.endpoints", "must start at 0 and end at 1");
    for (size_t i = 0; i + 1 < endpoints.size(); ++i)
        if (!(endpoints[i] < endpoints[i + 1]))
            throw ValidationError("map.endpoints", "endpoints must strictly increase");

    SiteMap m;
    m.family_ = "affine";
    m.endp_ = std::move(endpoints);
    m.increasing_ = std::move(increasing);
    m.min_expansion_ = 1e300;
    for (size_t j = 0; j + 1 < m.endp_.size(); ++j) {
        Rational w = m.endp_[j + 1] - m.endp_[j];
        Rational s = Rational(1) / w;  // full branch onto (0,1)
        if (!m.increasing_[j]) s = -s;
        m.slopes_.push_back(s);
        m.min_expansion_ = std::min(m.min_expansion_, s.abs().to_double());
    }
    if (!(m.min_expansion_ > 1.0))
        throw ValidationError("map.endpoints", "every branch must expand (width < 1)");
    for (const auto& e : m.endp_) m.endp_d_.push_back(e.to_double());
    return m;
}

SiteMap SiteMap::perturbed_doubling(double c) {
    if (!(std::fabs(c) < 1.0 / kTwoPi))
        throw ValidationError("map.c", "|c| must be below 1/(2*pi) to keep expansion");
    SiteMap m;
    m.family_ = "perturbed_doubling";
    m.perturbed_ = true;
    m.pert_c_ = c;
    m.endp_ = {Rational(0), Rational(1, 2), Rational(1)};
    m.endp_d_ = {0.0, 0.5, 1.0};
    m.increasing_ = {true, true};
    m.min_expansion_ = 2.0 - kTwoPi * std::fabs(c);
    return m;
}

int SiteMap::branch_of(double x) const {
    if (x >= endp_d_.back()) return branch_count() - 1;
    // right-limit convention: an interior endpoint belongs to the branch it opens
    int lo = 0, hi = branch_count() - 1;
    while (lo < hi) {
        int mid = (lo + hi) / 2;
        if (x < endp_d_[mid + 1]) hi = mid; else lo = mid + 1;
    }
    return lo;
}

bool SiteMap::double_is_endpoint(double x) const {
    for (size_t j = 1; j + 1 < endp_d_.size(); ++j)
        if (x == endp_d_[j]) return true;
    return false;
}

int SiteMap::branch_of_strict(double x) const {
    if (double_is_endpoint(x)) throw BranchBoundaryError();
    return branch_of(x);
}

int SiteMap::branch_of_exact(const Rational& x) const {
    for (size_t j = 1; j + 1 < endp_.size(); ++j)
        if (x == endp_[j]) throw BranchBoundaryError();
    for (int j = 0; j < branch_count(); ++j)
        if (x < endp_[j + 1]) return j;
    return branch_count() - 1;
}

double SiteMap::eval_perturbed(double x) const {
    double y = 2.0 * x + pert_c_ * std::sin(kTwoPi * x);
    y -= std::floor(y);
    // branch images are exactly [0,1); guard rounding at the seam
    if (y >= 1.0) y = 0.0;
    return y;
}

double SiteMap::derivative_perturbed(double x) const {
    return 2.0 + pert_c_ * kTwoPi * std::cos(kTwoPi * x);
}

double SiteMap::eval(double x) const {
    if (perturbed_) return eval_perturbed(std::min(std::max(x, 0.0), 1.0));
    int j = (x >= 1.0) ? branch_count() - 1 : branch_of(x);
    double a = endp_d_[j], b = endp_d_[j + 1];
    double y = increasing_[j] ? (x - a) / (b - a) : (b - x) / (b - a);
    return std::min(std::max(y, 0.0), 1.0);
}

Rational SiteMap::eval_exact(const Rational& x) const {
    if (perturbed_) throw NumericError("exact evaluation needs an affine map");
    int j = (x == Rational(1)) ? branch_count() - 1 : branch_of_exact(x);
    const Rational& a = endp_[j];
    const Rational& b = endp_[j + 1];
    Rational w = b - a;
    return increasing_[j] ? (x - a) / w : (b - x) / w;
}

double SiteMap::derivative(double x) const {
    if (perturbed_) return derivative_perturbed(x);
    int j = branch_of_strict(x);
    return slopes_[j].to_double();
}

double SiteMap::orbit_derivative(double a, int n) const {
    double prod = 1.0;
    double x = a;
    for (int i = 0; i < n; ++i) {
        prod *= derivative(x);
        x = eval(x);
    }
    return prod;
}

Rational SiteMap::orbit_derivative_exact(const Rational& a, int n) const {
    if (perturbed_) throw NumericError("exact orbit derivative needs an affine map");
    Rational prod(1);
    Rational x = a;
    for (int i = 0; i < n; ++i) {
        int j = branch_of_exact(x);
        prod = prod * slopes_[j];
        x = eval_exact(x);
    }
    return prod;
}

double SiteMap::inverse_branch(int j, double y) const {
    double a = endp_d_[j], b = endp_d_[j + 1];
    if (!perturbed_)
        return increasing_[j] ? a + y * (b - a) : b - y * (b - a);
    // monotone increasing on [a,b]; bisection seeded by the affine inverse,
    // then Newton
    double target = y + static_cast<double>(j);  // unwrapped value 2x + c sin(2 pi x)
    double x = a + y * (b - a);
    for (int it = 0; it < 60; ++it) {
        double f = 2.0 * x + pert_c_ * std::sin(kTwoPi * x) - target;
        double fp = derivative_perturbed(x);
        double step = f / fp;
        x -= step;
        if (x < a) x = a;
        if (x > b) x = b;
        if (std::fabs(step) < 1e-15) break;
    }
    return x;
}

std::vector<std::vector<double>> SiteMap::ulam_matrix_1d(int bins) const {
    if (bins < 16) throw ValidationError("bins", "need at least 16 bins");
    if (bins % 2 != 0) ++bins;  // keep 1/2 on a cell boundary
    const double n = static_cast<double>(bins);
    std::vector<std::vector<double>> U(bins, std::vector<double>(bins, 0.0));
    for (int c = 0; c < bins; ++c) {
        double a = c / n, b = (c + 1) / n;
        // For both families a cell is contained in one branch once endpoints
        // land on cell boundaries; the shipped families have endpoints at
        // multiples of 1/2.
        int j = branch_of((a + b) / 2);
        double ya = eval(std::nextafter(a, b));
        double yb = eval(std::nextafter(b, a));
        double lo = std::min(ya, yb), hi = std::max(ya, yb);
        if (hi <= lo) continue;
        int r0 = std::max(0, static_cast<int>(lo * n));
        int r1 = std::min(bins - 1, static_cast<int>(hi * n));
        for (int r = r0; r <= r1; ++r) {
            double u = std::max(lo, r / n), v = std::min(hi, (r + 1) / n);
            if (v <= u) continue;
            double xu = inverse_branch(j, u), xv = inverse_branch(j, v);
            U[r][c] += std::fabs(xv - xu) / (b - a);
        }
    }
    return U;
}

InvariantDensity SiteMap::invariant_density(int bins) const {
    if (!perturbed_) return InvariantDensity::uniform();
    if (bins < 16) throw ValidationError("bins", "need at least 16 bins");
    if (bins % 2 != 0) ++bins;
    auto U = ulam_matrix_1d(bins);
    std::vector<double> h(bins, 1.0), next(bins, 0.0);
    const int max_iter = 100000;
    for (int it = 0; it < max_iter; ++it) {
        for (int r = 0; r < bins; ++r) {
            double s = 0.0;
            for (int c = 0; c < bins; ++c) s += U[r][c] * h[c];
            next[r] = s;
        }
        double mass = 0.0, resid = 0.0;
        for (int r = 0; r < bins; ++r) mass += next[r];
        for (int r = 0; r < bins; ++r) next[r] *= bins / mass;
        for (int r = 0; r < bins; ++r) resid += std::fabs(next[r] - h[r]) / bins;
        h.swap(next);
        if (resid < 1e-10) return InvariantDensity::tabulated(h);
    }
    throw NoConvergenceError("invariant density power iteration did not converge");
}

}  // namespace colmaps
