#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "colmaps/collision.hpp"
#include "colmaps/lattice.hpp"
#include "colmaps/site_map.hpp"

namespace colmaps {

// Product grid for the finite-rank operator on [0,1]^L, L <= 3. Every axis
// uses the same breakpoints: `bins` uniform cells refined by the branch
// endpoints and every zone endpoint. Alignment is what keeps the hole
// indicator sharp; a cell that straddled a zone boundary would smear the
// conditioning by O(cell/eps).
struct GridSpec {
    std::vector<double> axis;  // breakpoints, 0 = first, 1 = last
    int L = 1;

    long axis_cells() const { return static_cast<long>(axis.size()) - 1; }
    long cells() const {
        long n = 1;
        for (int i = 0; i < L; ++i) n *= axis_cells();
        return n;
    }
    double cell_lo(long axis_cell) const { return axis[static_cast<size_t>(axis_cell)]; }
    double cell_hi(long axis_cell) const { return axis[static_cast<size_t>(axis_cell) + 1]; }
};

GridSpec build_grid(const SiteMap& map, const CollisionSpec& c, const LatticeSpec& l,
                    int bins_per_axis);

// Column-substochastic transition matrix of the hole-conditioned pushforward:
// entry (r,c) is the fraction of cell c, kept only if c avoids the collision
// set, that T0 maps into cell r. Stored per column.
struct SparseOperator {
    long dim = 0;
    std::vector<long> col_ptr;      // size dim+1
    std::vector<long> row_idx;
    std::vector<double> weight;
    std::vector<double> column_mass;  // fraction of the cell inside X_eps^0
    std::vector<double> cell_vol;
    long axis_cells = 0;
    int L = 1;

    void export_triplets(const std::string& path) const;
};

SparseOperator assemble(const GridSpec& grid, const SiteMap& map, const CollisionSpec& c,
                        const LatticeSpec& l);

struct SpectralResult {
    double lambda = 1.0;
    std::vector<double> rho;  // density per cell, integral 1
    double gap_proxy = 0.0;
    long iterations = 0;
    double residual = 0.0;
};

SpectralResult leading_eigen(const SparseOperator& op, double tol = 1e-12,
                             long max_iter = 100000);

// integral of the n-fold pushforward of the constant density 1
double survival_via_operator(const SparseOperator& op, long n);

}  // namespace colmaps
