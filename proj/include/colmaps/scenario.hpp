#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "colmaps/collision.hpp"
#include "colmaps/lattice.hpp"
#include "colmaps/rate_theory.hpp"
#include "colmaps/site_map.hpp"

namespace colmaps {

// One experiment description: map, lattice, collision zones and run knobs.
// The on-disk format is a flat sectioned text file:
//
//   [map]
//   family = doubling            # doubling | tent | affine | perturbed_doubling
//   endpoints = 0, 1/2, 3/4, 1   # affine only
//   orientation = +, +, -        # affine only
//   c = 0.05                     # perturbed_doubling only
//   [lattice]
//   d = 1
//   N = 4
//   [collision]
//   eps = 0.01
//   centers_1 = 1/3, 2/3         # (a_v, a_-v) for direction 1
//   [run]
//   seed = 1
//   trajectories = 100000
//   ...
//
// Fractions like "1/3" stay exact and drive the rational-mode machinery.
struct Scenario {
    // map block
    std::string family = "doubling";
    std::vector<Rational> endpoints;
    std::vector<bool> orientation;
    double perturbation = 0.05;
    // lattice block
    int d = 1;
    int N = 2;
    // collision block
    double eps = 0.01;
    std::vector<std::pair<Rational, Rational>> centers;
    // run block
    uint64_t seed = 1;
    long trajectories = 100000;
    long n_max = 0;  // 0 = derive from the predicted rate
    int bins = 0;    // 0 = skip the spectral stage
    int k_max = 64;
    int qk_kmax = 8;
    long qk_samples = 0;
    long hitting_samples = 0;
    long burn_in = 5;
    std::string measure = "lebesgue";
    int threads = 1;
    int density_bins = 4096;

    static Scenario from_file(const std::string& path);
    static Scenario from_string(const std::string& text);
    static Scenario preset(const std::string& name);
    static std::vector<std::string> preset_names();

    // named-field validation; throws ValidationError
    void validate() const;

    std::string serialize() const;

    // resolved model objects
    SiteMap make_map() const;
    LatticeSpec make_lattice() const;
    CollisionSpec make_collision() const;
    InvariantDensity make_density() const;

    void set_key(const std::string& dotted_key, const std::string& value);
};

}  // namespace colmaps
