#include "doctest.h"

#include "colmaps/lattice.hpp"

using namespace colmaps;

TEST_CASE("neighbor arithmetic wraps per coordinate") {
    LatticeSpec l1(1, 4);
    CHECK(l1.neighbor(3, 0, +1) == 0);
    CHECK(l1.neighbor(0, 0, -1) == 3);

    LatticeSpec l2(2, 2);
    // row-major: (i,j) -> 2i+j; (1,0)=2; +e2 flips j -> (1,1)=3
    CHECK(l2.neighbor(2, 1, +1) == 3);
    CHECK(l2.neighbor(2, 0, +1) == 0);

    LatticeSpec lw(1, 2);
    CHECK(lw.neighbor(0, 0, +1) == 1);
    CHECK(lw.neighbor(1, 0, +1) == 0);
}

TEST_CASE("neighbor round trip") {
    for (auto [d, N] : {std::pair{1, 4}, {2, 3}, {3, 2}, {2, 5}}) {
        LatticeSpec l(d, N);
        for (long p = 0; p < l.L; ++p)
            for (int v = 0; v < d; ++v) {
                CHECK(l.neighbor(l.neighbor(p, v, +1), v, -1) == p);
                CHECK(l.neighbor(l.neighbor(p, v, -1), v, +1) == p);
            }
    }
}

TEST_CASE("collision pair enumeration: count and order") {
    LatticeSpec l3(1, 3);
    auto p3 = l3.collision_pairs();
    REQUIRE(p3.size() == 3);
    CHECK(p3[0] == std::pair<long, int>{0, 0});
    CHECK(p3[1] == std::pair<long, int>{1, 0});
    CHECK(p3[2] == std::pair<long, int>{2, 0});

    CHECK(LatticeSpec(2, 2).collision_pairs().size() == 8);
    CHECK(LatticeSpec(1, 2).collision_pairs().size() == 2);

    // pairs are distinct and lexicographic in (site, direction)
    LatticeSpec l(2, 3);
    auto ps = l.collision_pairs();
    CHECK(ps.size() == static_cast<size_t>(l.L) * 2);
    for (size_t i = 1; i < ps.size(); ++i) CHECK(ps[i - 1] < ps[i]);
}

TEST_CASE("N = 1 is rejected") {
    CHECK_THROWS_AS(LatticeSpec(1, 1), ValidationError);
}

TEST_CASE("coords round trip") {
    LatticeSpec l(3, 4);
    for (long p = 0; p < l.L; ++p) CHECK(l.index(l.coords(p)) == p);
}
