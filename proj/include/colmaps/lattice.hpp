#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "colmaps/errors.hpp"

namespace colmaps {

// Sites of the periodic lattice Z^d/(NZ)^d, flattened row-major (coordinate 0
// most significant), so the flat index order is the lexicographic order on
// coordinates. That order is also the total order used by the
// inclusion-exclusion enumeration.
struct LatticeSpec {
    int d = 1;
    int N = 2;
    long L = 2;  // N^d

    LatticeSpec() = default;
    LatticeSpec(int dim, int period) : d(dim), N(period) {
        if (dim < 1 || dim > 16) throw ValidationError("lattice.d", "d must be in [1,16]");
        if (period < 2)
            throw ValidationError("lattice.N",
                                  "N must be at least 2 (N=1 leaves every collision box empty)");
        L = 1;
        for (int i = 0; i < dim; ++i) {
            if (L > 100000000L / period) throw ValidationError("lattice.N", "lattice too large");
            L *= period;
        }
    }

    std::vector<int> coords(long p) const {
        std::vector<int> c(d);
        for (int i = d - 1; i >= 0; --i) { c[i] = static_cast<int>(p % N); p /= N; }
        return c;
    }

    long index(const std::vector<int>& c) const {
        long p = 0;
        for (int i = 0; i < d; ++i) p = p * N + c[i];
        return p;
    }

    // p + sign*e_dir, coordinatewise mod N
    long neighbor(long p, int dir, int sign) const {
        // stride of coordinate `dir` in the flat index
        long stride = 1;
        for (int i = dir + 1; i < d; ++i) stride *= N;
        long block = stride * N;
        long base = p - (p / block) * block;        // offset within the dir-block
        long lo = p - base;                          // start of the block
        long coord = base / stride;
        long rest = base % stride;
        long nc = (coord + sign + N) % N;
        return lo + nc * stride + rest;
    }

    // All (site, direction in V+) pairs in the fixed order: flat site index
    // (lexicographic coordinates) first, then direction index.
    std::vector<std::pair<long, int>> collision_pairs() const {
        std::vector<std::pair<long, int>> out;
        out.reserve(static_cast<size_t>(L) * d);
        for (long p = 0; p < L; ++p)
            for (int v = 0; v < d; ++v) out.emplace_back(p, v);
        return out;
    }
};

}  // namespace colmaps
