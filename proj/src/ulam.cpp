#include "colmaps/ulam.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace colmaps {

GridSpec build_grid(const SiteMap& map, const CollisionSpec& c, const LatticeSpec& l,
                    int bins_per_axis) {
    if (l.L > 3) throw TooLargeError("spectral grid limited to L <= 3");
    if (bins_per_axis < 32) throw ValidationError("run.bins", "need at least 32 bins per axis");
    std::vector<double> pts;
    for (int i = 0; i <= bins_per_axis; ++i)
        pts.push_back(static_cast<double>(i) / bins_per_axis);
    for (double e : map.endpoints()) pts.push_back(e);
    for (int v = 0; v < c.directions(); ++v)
        for (int sign : {+1, -1}) {
            const Zone& z = c.zone(v, sign);
            if (z.width() > 0) { pts.push_back(z.lo); pts.push_back(z.hi); }
        }
    std::sort(pts.begin(), pts.end());
    std::vector<double> axis;
    for (double p : pts) {
        if (p < 0.0 || p > 1.0) continue;
        if (axis.empty() || p - axis.back() > 1e-12) axis.push_back(p);
    }
    if (axis.back() < 1.0) axis.push_back(1.0);
    GridSpec g;
    g.axis = std::move(axis);
    g.L = static_cast<int>(l.L);
    if (g.cells() > 10000000L) throw TooLargeError("cell budget above 1e7");
    return g;
}

namespace {

// 1D transition profile: for each axis cell, the overlap of its forward image
// with every axis cell, as a fraction of the source cell. Exact for affine
// branches; midpoint quadrature (32 points) otherwise.
struct AxisProfile {
    std::vector<long> ptr;      // per source cell
    std::vector<long> target;
    std::vector<double> frac;
};

AxisProfile axis_profile(const GridSpec& grid, const SiteMap& map) {
    AxisProfile prof;
    const long n = grid.axis_cells();
    prof.ptr.push_back(0);
    std::vector<double> acc(static_cast<size_t>(n), 0.0);
    for (long cidx = 0; cidx < n; ++cidx) {
        double a = grid.cell_lo(cidx), b = grid.cell_hi(cidx);
        std::fill(acc.begin(), acc.end(), 0.0);
        if (map.is_affine()) {
            // the cell sits inside one branch (branch endpoints are breakpoints)
            double ya = map.eval(std::nextafter(a, b));
            double yb = map.eval(std::nextafter(b, a));
            double lo = std::min(ya, yb), hi = std::max(ya, yb);
            auto it0 = std::upper_bound(grid.axis.begin(), grid.axis.end(), lo);
            long r = std::max<long>(0, (it0 - grid.axis.begin()) - 1);
            for (; r < n && grid.cell_lo(r) < hi; ++r) {
                double u = std::max(lo, grid.cell_lo(r));
                double v = std::min(hi, grid.cell_hi(r));
                if (v > u) acc[static_cast<size_t>(r)] += (v - u) / (hi - lo);
            }
        } else {
            const int q = 32;
            for (int s = 0; s < q; ++s) {
                double x = a + (b - a) * (s + 0.5) / q;
                double y = map.eval(x);
                auto it = std::upper_bound(grid.axis.begin(), grid.axis.end(), y);
                long r = std::min<long>(n - 1, std::max<long>(0, (it - grid.axis.begin()) - 1));
                acc[static_cast<size_t>(r)] += 1.0 / q;
            }
        }
        for (long r = 0; r < n; ++r)
            if (acc[static_cast<size_t>(r)] > 0.0) {
                prof.target.push_back(r);
                prof.frac.push_back(acc[static_cast<size_t>(r)]);
            }
        prof.ptr.push_back(static_cast<long>(prof.target.size()));
    }
    return prof;
}

}  // namespace

SparseOperator assemble(const GridSpec& grid, const SiteMap& map, const CollisionSpec& c,
                        const LatticeSpec& l) {
    const long A = grid.axis_cells();
    const int L = grid.L;
    SparseOperator op;
    op.dim = grid.cells();
    op.axis_cells = A;
    op.L = L;
    AxisProfile prof = axis_profile(grid, map);

    // per-axis-cell zone membership (cells are zone-aligned, test midpoints)
    std::vector<std::vector<uint8_t>> in_plus(static_cast<size_t>(c.directions())),
        in_minus(static_cast<size_t>(c.directions()));
    for (int v = 0; v < c.directions(); ++v) {
        in_plus[v].resize(static_cast<size_t>(A));
        in_minus[v].resize(static_cast<size_t>(A));
        for (long i = 0; i < A; ++i) {
            double mid = 0.5 * (grid.cell_lo(i) + grid.cell_hi(i));
            in_plus[v][i] = c.in_zone(mid, v, +1);
            in_minus[v][i] = c.in_zone(mid, v, -1);
        }
    }
    auto cell_in_hole = [&](const long* ax) {
        for (long p = 0; p < l.L; ++p)
            for (int v = 0; v < l.d; ++v) {
                long q = l.neighbor(p, v, +1);
                if (in_plus[v][static_cast<size_t>(ax[p])] &&
                    in_minus[v][static_cast<size_t>(ax[q])])
                    return true;
            }
        return false;
    };

    op.col_ptr.assign(static_cast<size_t>(op.dim) + 1, 0);
    op.column_mass.assign(static_cast<size_t>(op.dim), 0.0);
    op.cell_vol.assign(static_cast<size_t>(op.dim), 0.0);

    std::vector<long> ax(static_cast<size_t>(L), 0);
    std::vector<long> rows_buf;
    std::vector<double> w_buf;
    for (long cell = 0; cell < op.dim; ++cell) {
        long rem = cell;
        for (int i = L - 1; i >= 0; --i) { ax[i] = rem % A; rem /= A; }
        double vol = 1.0;
        for (int i = 0; i < L; ++i)
            vol *= grid.cell_hi(ax[i]) - grid.cell_lo(ax[i]);
        op.cell_vol[static_cast<size_t>(cell)] = vol;
        bool hole = cell_in_hole(ax.data());
        op.column_mass[static_cast<size_t>(cell)] = hole ? 0.0 : 1.0;
        if (hole) {
            op.col_ptr[static_cast<size_t>(cell) + 1] = static_cast<long>(op.row_idx.size());
            continue;
        }
        // tensor product of the per-axis profiles
        rows_buf.assign(1, 0);
        w_buf.assign(1, 1.0);
        for (int i = 0; i < L; ++i) {
            std::vector<long> nrows;
            std::vector<double> nw;
            nrows.reserve(rows_buf.size() * 3);
            nw.reserve(rows_buf.size() * 3);
            for (size_t k = 0; k < rows_buf.size(); ++k)
                for (long t = prof.ptr[ax[i]]; t < prof.ptr[ax[i] + 1]; ++t) {
                    nrows.push_back(rows_buf[k] * A + prof.target[static_cast<size_t>(t)]);
                    nw.push_back(w_buf[k] * prof.frac[static_cast<size_t>(t)]);
                }
            rows_buf.swap(nrows);
            w_buf.swap(nw);
        }
        for (size_t k = 0; k < rows_buf.size(); ++k) {
            op.row_idx.push_back(rows_buf[k]);
            op.weight.push_back(w_buf[k]);
        }
        op.col_ptr[static_cast<size_t>(cell) + 1] = static_cast<long>(op.row_idx.size());
    }
    return op;
}

void SparseOperator::export_triplets(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f.precision(17);
    f << "# row col weight\n";
    for (long c = 0; c < dim; ++c)
        for (long t = col_ptr[static_cast<size_t>(c)]; t < col_ptr[static_cast<size_t>(c) + 1]; ++t)
            f << row_idx[static_cast<size_t>(t)] << ' ' << c << ' '
              << weight[static_cast<size_t>(t)] << '\n';
}

namespace {

// mass-vector pushforward: out_r = sum_c w(r,c) m_c
void apply(const SparseOperator& op, const std::vector<double>& m, std::vector<double>& out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (long c = 0; c < op.dim; ++c) {
        double mc = m[static_cast<size_t>(c)];
        if (mc == 0.0) continue;
        for (long t = op.col_ptr[static_cast<size_t>(c)];
             t < op.col_ptr[static_cast<size_t>(c) + 1]; ++t)
            out[static_cast<size_t>(op.row_idx[static_cast<size_t>(t)])] +=
                op.weight[static_cast<size_t>(t)] * mc;
    }
}

double l1(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += std::fabs(x);
    return s;
}

}  // namespace

SpectralResult leading_eigen(const SparseOperator& op, double tol, long max_iter) {
    if (tol < 1e-14) tol = 1e-14;
    SpectralResult res;
    std::vector<double> m = op.cell_vol;  // uniform density
    double mass = l1(m);
    for (auto& x : m) x /= mass;
    std::vector<double> next(m.size(), 0.0);
    double lambda = 1.0;
    long it = 0;
    for (; it < max_iter; ++it) {
        apply(op, m, next);
        double nm = l1(next);
        if (nm <= 0.0) throw NoConvergenceError("operator annihilated the density");
        lambda = nm;  // since |m|_1 = 1
        double resid = 0.0;
        for (size_t i = 0; i < m.size(); ++i) resid += std::fabs(next[i] - lambda * m[i]);
        for (auto& x : next) x /= nm;
        m.swap(next);
        if (resid <= tol * lambda) {
            res.residual = resid;
            break;
        }
        res.residual = resid;
    }
    if (it >= max_iter) throw NoConvergenceError("power iteration hit the iteration cap");
    res.lambda = lambda;
    res.iterations = it + 1;
    res.rho.resize(m.size());
    double integral = 0.0;
    for (size_t i = 0; i < m.size(); ++i) integral += m[i];
    for (size_t i = 0; i < m.size(); ++i)
        res.rho[i] = op.cell_vol[i] > 0 ? m[i] / (op.cell_vol[i] * integral) : 0.0;

    // crude second-mode estimate: power iteration on the complement of m
    std::vector<double> w(m.size());
    double phase = 1.0;
    for (size_t i = 0; i < w.size(); ++i) {
        w[i] = phase * op.cell_vol[i];
        phase = -phase;
    }
    auto project_out = [&](std::vector<double>& v) {
        double num = 0.0, den = 0.0;
        for (size_t i = 0; i < v.size(); ++i) { num += v[i] * m[i]; den += m[i] * m[i]; }
        double a = den > 0 ? num / den : 0.0;
        for (size_t i = 0; i < v.size(); ++i) v[i] -= a * m[i];
    };
    project_out(w);
    double nw = l1(w);
    if (nw > 0) {
        for (auto& x : w) x /= nw;
        double ratio = 0.0;
        std::vector<double> wn(w.size());
        for (int k = 0; k < 200; ++k) {
            apply(op, w, wn);
            project_out(wn);
            double n2 = l1(wn);
            if (n2 <= 0) { ratio = 0.0; break; }
            ratio = n2;
            for (auto& x : wn) x /= n2;
            w.swap(wn);
        }
        res.gap_proxy = std::min(ratio, std::nextafter(lambda, 0.0));
    }
    return res;
}

double survival_via_operator(const SparseOperator& op, long n) {
    if (n < 1) throw ValidationError("n", "need n >= 1");
    std::vector<double> m = op.cell_vol;  // the constant density 1, as masses
    std::vector<double> next(m.size(), 0.0);
    for (long i = 0; i < n; ++i) {
        apply(op, m, next);
        m.swap(next);
    }
    double s = 0.0;
    for (double x : m) s += x;
    return s;
}

}  // namespace colmaps
