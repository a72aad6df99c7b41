#pragma once

#include <optional>
#include <string>
#include <vector>

#include "colmaps/errors.hpp"
#include "colmaps/rational.hpp"

namespace colmaps {

// Invariant density h of the single-site map, either exactly uniform (every
// full-branch affine map leaves Lebesgue invariant) or tabulated on a uniform
// grid as the fixed point of the one-dimensional Ulam matrix.
struct InvariantDensity {
    enum class Kind { Uniform, Tabulated };

    Kind kind = Kind::Uniform;
    std::vector<double> table;  // per-bin density values, uniform grid on [0,1]
    double lower_bound = 1.0;   // inf h
    double upper_bound = 1.0;   // sup h

    static InvariantDensity uniform() { return InvariantDensity{}; }
    static InvariantDensity tabulated(std::vector<double> values);

    double value_at(double x) const;
    double integral(double lo, double hi) const;
    double integral_total() const { return integral(0.0, 1.0); }

    // Inverse CDF (piecewise linear within bins) for sampling coordinates
    // from h; u in [0,1).
    double quantile(double u) const;
    // Same, restricted to the interval (lo,hi); used to draw points
    // inside a collision zone proportionally to h.
    double quantile_in(double lo, double hi, double u) const;
};

// Single-site dynamics: piecewise monotone, full-branch, uniformly expanding.
// Two families are representable: full affine branches (slopes determined by
// the branch widths) and the sinusoidally perturbed doubling map
// tau(x) = 2x + c*sin(2*pi*x) mod 1.
class SiteMap {
  public:
    static SiteMap doubling();
    static SiteMap tent();
    // Full affine branches over the given endpoints; increasing[j] gives the
    // orientation of branch j. endpoints.front()==0, endpoints.back()==1.
    static SiteMap affine(std::vector<Rational> endpoints, std::vector<bool> increasing);
    // |c| < 1/(2*pi) keeps the map expanding.
    static SiteMap perturbed_doubling(double c);

    int branch_count() const { return static_cast<int>(increasing_.size()); }
    const std::vector<double>& endpoints() const { return endp_d_; }
    const std::vector<Rational>& endpoints_exact() const { return endp_; }
    bool is_affine() const { return !perturbed_; }
    // true when orbits of rational points can be iterated exactly
    bool rational_mode() const { return !perturbed_; }
    double min_expansion() const { return min_expansion_; }
    const std::string& family() const { return family_; }
    double perturbation() const { return pert_c_; }

    // tau(x); branch endpoints evaluate via the right limit (left at x=1).
    double eval(double x) const;
    Rational eval_exact(const Rational& x) const;

    // tau'(x) with sign; throws BranchBoundaryError at branch endpoints.
    double derivative(double x) const;

    // prod_{i<n} tau'(tau^i(a)); throws if the orbit touches an endpoint.
    double orbit_derivative(double a, int n) const;
    Rational orbit_derivative_exact(const Rational& a, int n) const;

    // Branch index whose (half-open) interval contains x, right-limit
    // convention; x=1 belongs to the last branch.
    int branch_of(double x) const;
    // throws BranchBoundaryError when x sits on an interior endpoint
    int branch_of_strict(double x) const;
    int branch_of_exact(const Rational& x) const;  // strict

    // Inverse of branch j on (0,1); affine in closed form, Newton otherwise.
    double inverse_branch(int j, double y) const;

    // Uniform for all-affine maps; otherwise the Ulam fixed point on `bins`
    // cells (power iteration to l1 residual 1e-10, at most 1e5 sweeps).
    InvariantDensity invariant_density(int bins) const;

    // One-dimensional Ulam matrix used by invariant_density; exposed so the
    // fixed-point identity ||U h - h||_1 can be checked externally.
    // Column-stochastic, entry (r,c) = fraction of cell c mapped into cell r.
    std::vector<std::vector<double>> ulam_matrix_1d(int bins) const;

    bool double_is_endpoint(double x) const;

  private:
    SiteMap() = default;

    std::string family_;
    std::vector<Rational> endp_;   // exact endpoints
    std::vector<double> endp_d_;   // cached doubles
    std::vector<bool> increasing_;
    std::vector<Rational> slopes_; // signed, affine mode
    bool perturbed_ = false;
    double pert_c_ = 0.0;
    double min_expansion_ = 2.0;

    double eval_perturbed(double x) const;
    double derivative_perturbed(double x) const;
};

}  // namespace colmaps
