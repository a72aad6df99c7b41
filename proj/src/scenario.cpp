#include "colmaps/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace colmaps {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

long to_long(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        long r = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return r;
    } catch (...) {
        throw ValidationError(key, "expected an integer, got '" + v + "'");
    }
}

double to_double(const std::string& key, const std::string& v) {
    try {
        if (v.find('/') != std::string::npos) return Rational::parse(v).to_double();
        size_t pos = 0;
        double r = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return r;
    } catch (const ValidationError&) {
        throw;
    } catch (...) {
        throw ValidationError(key, "expected a number, got '" + v + "'");
    }
}

}  // namespace

Scenario Scenario::from_string(const std::string& text) {
    Scenario sc;
    sc.centers.clear();
    std::map<int, std::pair<Rational, Rational>> centers_by_dir;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ValidationError("config", "bad section header at line " +
                                                    std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config",
                                  "expected key = value at line " + std::to_string(lineno));
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        std::string dotted = section.empty() ? key : section + "." + key;

        if (dotted == "map.family") sc.family = value;
        else if (dotted == "map.endpoints") {
            sc.endpoints.clear();
            for (const auto& t : split_list(value)) sc.endpoints.push_back(Rational::parse(t));
        } else if (dotted == "map.orientation") {
            sc.orientation.clear();
            for (const auto& t : split_list(value)) {
                if (t == "+") sc.orientation.push_back(true);
                else if (t == "-") sc.orientation.push_back(false);
                else throw ValidationError("map.orientation", "use '+' or '-', got '" + t + "'");
            }
        } else if (dotted == "map.c") sc.perturbation = to_double(dotted, value);
        else if (dotted == "lattice.d") sc.d = static_cast<int>(to_long(dotted, value));
        else if (dotted == "lattice.N") sc.N = static_cast<int>(to_long(dotted, value));
        else if (dotted == "collision.eps") sc.eps = to_double(dotted, value);
        else if (dotted.rfind("collision.centers_", 0) == 0) {
            int dir = static_cast<int>(to_long(dotted, dotted.substr(18)));
            auto parts = split_list(value);
            if (parts.size() != 2)
                throw ValidationError(dotted, "expected 'a_v, a_-v'");
            centers_by_dir[dir] = {Rational::parse(parts[0]), Rational::parse(parts[1])};
        } else if (dotted == "run.seed") sc.seed = static_cast<uint64_t>(to_long(dotted, value));
        else if (dotted == "run.trajectories") sc.trajectories = to_long(dotted, value);
        else if (dotted == "run.n_max") sc.n_max = to_long(dotted, value);
        else if (dotted == "run.bins") sc.bins = static_cast<int>(to_long(dotted, value));
        else if (dotted == "run.k_max") sc.k_max = static_cast<int>(to_long(dotted, value));
        else if (dotted == "run.qk_kmax") sc.qk_kmax = static_cast<int>(to_long(dotted, value));
        else if (dotted == "run.qk_samples") sc.qk_samples = to_long(dotted, value);
        else if (dotted == "run.hitting_samples") sc.hitting_samples = to_long(dotted, value);
        else if (dotted == "run.burn_in") sc.burn_in = to_long(dotted, value);
        else if (dotted == "run.measure") sc.measure = value;
        else if (dotted == "run.threads") sc.threads = static_cast<int>(to_long(dotted, value));
        else if (dotted == "run.density_bins")
            sc.density_bins = static_cast<int>(to_long(dotted, value));
        else throw ValidationError(dotted, "unknown key");
    }
    for (const auto& [dir, pr] : centers_by_dir) {
        if (dir != static_cast<int>(sc.centers.size()) + 1)
            throw ValidationError("collision.centers_" + std::to_string(dir),
                                  "directions must be numbered 1..d consecutively");
        sc.centers.push_back(pr);
    }
    if (sc.centers.empty()) sc.centers = {{Rational(1, 3), Rational(2, 3)}};
    return sc;
}

Scenario Scenario::from_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ValidationError("config", "cannot open '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return from_string(ss.str());
}

std::string Scenario::serialize() const {
    std::ostringstream os;
    os.precision(17);
    os << "[map]\n";
    os << "family = " << family << "\n";
    if (family == "affine") {
        os << "endpoints = ";
        for (size_t i = 0; i < endpoints.size(); ++i)
            os << (i ? ", " : "") << endpoints[i].str();
        os << "\norientation = ";
        for (size_t i = 0; i < orientation.size(); ++i)
            os << (i ? ", " : "") << (orientation[i] ? "+" : "-");
        os << "\n";
    }
    if (family == "perturbed_doubling") os << "c = " << perturbation << "\n";
    os << "\n[lattice]\n";
    os << "d = " << d << "\n";
    os << "N = " << N << "\n";
    os << "\n[collision]\n";
    os << "eps = " << eps << "\n";
    for (size_t v = 0; v < centers.size(); ++v)
        os << "centers_" << (v + 1) << " = " << centers[v].first.str() << ", "
           << centers[v].second.str() << "\n";
    os << "\n[run]\n";
    os << "seed = " << seed << "\n";
    os << "trajectories = " << trajectories << "\n";
    os << "n_max = " << n_max << "\n";
    os << "bins = " << bins << "\n";
    os << "k_max = " << k_max << "\n";
    os << "qk_kmax = " << qk_kmax << "\n";
    os << "qk_samples = " << qk_samples << "\n";
    os << "hitting_samples = " << hitting_samples << "\n";
    os << "burn_in = " << burn_in << "\n";
    os << "measure = " << measure << "\n";
    os << "threads = " << threads << "\n";
    os << "density_bins = " << density_bins << "\n";
    return os.str();
}

SiteMap Scenario::make_map() const {
    if (family == "doubling") return SiteMap::doubling();
    if (family == "tent") return SiteMap::tent();
    if (family == "affine") return SiteMap::affine(endpoints, orientation);
    if (family == "perturbed_doubling") return SiteMap::perturbed_doubling(perturbation);
    throw ValidationError("map.family", "unknown family '" + family + "'");
}

LatticeSpec Scenario::make_lattice() const { return LatticeSpec(d, N); }

CollisionSpec Scenario::make_collision() const { return CollisionSpec(eps, centers); }

InvariantDensity Scenario::make_density() const {
    return make_map().invariant_density(density_bins);
}

void Scenario::validate() const {
    SiteMap map = make_map();  // throws with field names on bad map blocks
    LatticeSpec lat = make_lattice();
    if (static_cast<int>(centers.size()) != d)
        throw ValidationError("collision.centers", "need exactly d center pairs");
    CollisionSpec col = make_collision();
    col.validate_against(map, lat);
    if (measure != "lebesgue" && measure != "mu0")
        throw ValidationError("run.measure", "expected 'lebesgue' or 'mu0'");
    if (trajectories < 0 || qk_samples < 0 || hitting_samples < 0)
        throw ValidationError("run", "sample counts cannot be negative");
    if (threads < 0) throw ValidationError("run.threads", "threads must be >= 0");
}

void Scenario::set_key(const std::string& dotted_key, const std::string& value) {
    const std::string k = dotted_key;
    auto dot = k.find('.');
    if (dot == std::string::npos) throw ValidationError(k, "keys look like section.name");
    if (k.rfind("collision.centers_", 0) == 0) {
        int dir = static_cast<int>(to_long(k, k.substr(18)));
        auto parts = split_list(value);
        if (parts.size() != 2) throw ValidationError(k, "expected 'a_v, a_-v'");
        std::pair<Rational, Rational> pr{Rational::parse(parts[0]), Rational::parse(parts[1])};
        if (dir < 1 || dir > static_cast<int>(centers.size()) + 1)
            throw ValidationError(k, "direction out of range");
        if (dir == static_cast<int>(centers.size()) + 1) centers.push_back(pr);
        else centers[static_cast<size_t>(dir - 1)] = pr;
        return;
    }
    // round-trip through the parser so every other key uses one code path
    Scenario probe = from_string("[" + k.substr(0, dot) + "]\n" + k.substr(dot + 1) + " = " +
                                 value + "\n");
    if (k == "map.family") family = probe.family;
    else if (k == "map.endpoints") endpoints = probe.endpoints;
    else if (k == "map.orientation") orientation = probe.orientation;
    else if (k == "map.c") perturbation = probe.perturbation;
    else if (k == "lattice.d") d = probe.d;
    else if (k == "lattice.N") N = probe.N;
    else if (k == "collision.eps") eps = probe.eps;
    else if (k == "run.seed") seed = probe.seed;
    else if (k == "run.trajectories") trajectories = probe.trajectories;
    else if (k == "run.n_max") n_max = probe.n_max;
    else if (k == "run.bins") bins = probe.bins;
    else if (k == "run.k_max") k_max = probe.k_max;
    else if (k == "run.qk_kmax") qk_kmax = probe.qk_kmax;
    else if (k == "run.qk_samples") qk_samples = probe.qk_samples;
    else if (k == "run.hitting_samples") hitting_samples = probe.hitting_samples;
    else if (k == "run.burn_in") burn_in = probe.burn_in;
    else if (k == "run.measure") measure = probe.measure;
    else if (k == "run.threads") threads = probe.threads;
    else if (k == "run.density_bins") density_bins = probe.density_bins;
    else throw ValidationError(k, "unknown key");
}

std::vector<std::string> Scenario::preset_names() {
    return {"d1N2_period2", "d1N3_period2", "d1N4_period2", "d1N4_nonperiodic",
            "d1N4_hitting", "d2N2_mixed", "d1N2_perturbed"};
}

Scenario Scenario::preset(const std::string& name) {
    Scenario sc;
    sc.centers = {{Rational(1, 3), Rational(2, 3)}};
    if (name == "d1N2_period2") {
        sc.d = 1; sc.N = 2; sc.eps = 0.01;
        sc.trajectories = 200000;
        sc.bins = 128;
        sc.qk_samples = 1000000;
    } else if (name == "d1N3_period2") {
        sc.d = 1; sc.N = 3; sc.eps = 0.01;
        sc.trajectories = 200000;
        sc.bins = 64;
    } else if (name == "d1N4_period2") {
        sc.d = 1; sc.N = 4; sc.eps = 0.01;
        sc.trajectories = 200000;
        sc.qk_samples = 1000000;
    } else if (name == "d1N4_nonperiodic") {
        sc.d = 1; sc.N = 4; sc.eps = 0.01;
        sc.centers = {{Rational(1, 10), Rational(9, 10)}};
        sc.trajectories = 200000;
    } else if (name == "d1N4_hitting") {
        sc.d = 1; sc.N = 4; sc.eps = 0.005;
        sc.trajectories = 0;
        sc.hitting_samples = 20000;
    } else if (name == "d2N2_mixed") {
        sc.d = 2; sc.N = 2; sc.eps = 0.01;
        sc.centers = {{Rational(1, 3), Rational(2, 3)}, {Rational(1, 5), Rational(4, 5)}};
        sc.trajectories = 100000;
        sc.qk_samples = 1000000;
    } else if (name == "d1N2_perturbed") {
        sc.family = "perturbed_doubling";
        sc.perturbation = 0.05;
        sc.d = 1; sc.N = 2; sc.eps = 0.02;
        sc.trajectories = 100000;
        sc.bins = 64;
    } else {
        throw ValidationError("preset", "unknown preset '" + name + "'");
    }
    return sc;
}

}  // namespace colmaps
