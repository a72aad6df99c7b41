#include "doctest.h"

#include "colmaps/scenario.hpp"

using namespace colmaps;

TEST_CASE("config parse, serialize, reload") {
    const char* text = R"(
# comment
[map]
family = affine
endpoints = 0, 1/2, 3/4, 1
orientation = +, +, -

[lattice]
d = 1
N = 4

[collision]
eps = 0.01
centers_1 = 1/3, 2/3

[run]
seed = 99
trajectories = 5000
)";
    Scenario sc = Scenario::from_string(text);
    CHECK(sc.family == "affine");
    CHECK(sc.endpoints.size() == 4);
    CHECK(sc.endpoints[2] == Rational(3, 4));
    CHECK(sc.orientation == std::vector<bool>{true, true, false});
    CHECK(sc.N == 4);
    CHECK(sc.eps == 0.01);
    CHECK(sc.centers[0].first == Rational(1, 3));
    CHECK(sc.seed == 99);
    CHECK(sc.trajectories == 5000);

    // round trip: serialize -> parse -> serialize is a fixed point
    std::string s1 = sc.serialize();
    Scenario back = Scenario::from_string(s1);
    CHECK(back.serialize() == s1);
    CHECK(back.centers[0].second == Rational(2, 3));
}

TEST_CASE("fractions survive the round trip exactly") {
    Scenario sc = Scenario::preset("d1N4_nonperiodic");
    Scenario back = Scenario::from_string(sc.serialize());
    CHECK(back.centers[0].first == Rational(1, 10));
    CHECK(back.centers[0].second == Rational(9, 10));
}

TEST_CASE("validation names the offending field") {
    Scenario sc = Scenario::preset("d1N2_period2");
    sc.eps = 0.4;  // zones overflow and overlap
    try {
        sc.validate();
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.field).rfind("collision.centers_1", 0) == 0);
    }

    Scenario two = Scenario::preset("d2N2_mixed");
    two.centers.pop_back();
    try {
        two.validate();
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(e.field == "collision.centers");
    }

    Scenario bad = Scenario::preset("d1N2_period2");
    bad.N = 1;
    CHECK_THROWS_AS(bad.validate(), ValidationError);

    Scenario badmeasure = Scenario::preset("d1N2_period2");
    badmeasure.measure = "cauchy";
    try {
        badmeasure.validate();
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(e.field == "run.measure");
    }
}

TEST_CASE("unknown keys are rejected") {
    CHECK_THROWS_AS(Scenario::from_string("[run]\nbogus = 1\n"), ValidationError);
    CHECK_THROWS_AS(Scenario::from_string("[map]\nfamily = doubling\nnonsense\n"),
                    ValidationError);
}

TEST_CASE("presets") {
    auto names = Scenario::preset_names();
    CHECK(names.size() >= 5);
    for (const auto& n : names) {
        Scenario sc = Scenario::preset(n);
        sc.validate();
    }
    CHECK_THROWS_AS(Scenario::preset("nope"), ValidationError);

    Scenario d2 = Scenario::preset("d2N2_mixed");
    CHECK(d2.d == 2);
    CHECK(d2.make_lattice().L == 4);
}

TEST_CASE("set_key overrides") {
    Scenario sc = Scenario::preset("d1N2_period2");
    sc.set_key("collision.eps", "0.02");
    CHECK(sc.eps == 0.02);
    sc.set_key("run.seed", "123");
    CHECK(sc.seed == 123);
    sc.set_key("collision.centers_1", "1/5, 4/5");
    CHECK(sc.centers[0].first == Rational(1, 5));
    CHECK_THROWS_AS(sc.set_key("run.nonsense", "1"), ValidationError);
    CHECK_THROWS_AS(sc.set_key("plain", "1"), ValidationError);
}
