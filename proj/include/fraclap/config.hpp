#ifndef FRACLAP_CONFIG_HPP
#define FRACLAP_CONFIG_HPP

#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fraclap/grid.hpp"
#include "fraclap/nonlinearity.hpp"
#include "fraclap/solver.hpp"

namespace fraclap {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Tolerances {
    double solver = 1e-10;
    double eigen = 1e-10;
    double entropy = 1e-6;
};

struct ExperimentConfig {
    double a = -1.0, b = 1.0;
    int n_cells = 128;
    double s = 0.25;
    double q = 0.5;
    HSpec h_spec;
    SourceSpec f_spec;
    MeasureSpec mu_spec;
    std::vector<double> n_schedule{1, 2, 4, 8};
    std::vector<double> k_list{1, 2, 4, 8, 16};
    Tolerances tol;
    unsigned seed = 42;
    std::string output_dir = "out";

    ProblemSpec problem() const {
        ProblemSpec p;
        p.q = q;
        p.s = s;
        p.h_spec = h_spec;
        p.f_spec = f_spec;
        p.mu_spec = mu_spec;
        p.grid = build_grid(a, b, n_cells);
        return p;
    }
};

namespace detail {

template <typename T>
T require(const nlohmann::json& j, const std::string& key) {
    if (!j.contains(key)) throw ConfigError("config: missing key '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config: bad value for '" + key + "': " + e.what());
    }
}

template <typename T>
T get_or(const nlohmann::json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config: bad value for '" + key + "': " + e.what());
    }
}

}  // namespace detail

inline ExperimentConfig parse_config(const nlohmann::json& j) {
    ExperimentConfig c;
    const auto grid = detail::require<nlohmann::json>(j, "grid");
    c.a = detail::require<double>(grid, "a");
    c.b = detail::require<double>(grid, "b");
    c.n_cells = detail::require<int>(grid, "n_cells");
    if (!(c.b > c.a)) throw ConfigError("config: grid requires b > a");
    if (c.n_cells < 4) throw ConfigError("config: grid requires n_cells >= 4");

    c.s = detail::require<double>(j, "s");
    if (!(c.s > 0.0 && c.s < 1.0)) throw ConfigError("config: s must lie in (0,1)");
    c.q = detail::require<double>(j, "q");
    if (!(c.q > 0.0 && c.q < 1.0)) throw ConfigError("config: q must lie in (0,1)");

    if (j.contains("h_spec")) {
        const auto& h = j.at("h_spec");
        c.h_spec.gamma = detail::get_or<double>(h, "gamma", 0.5);
        c.h_spec.theta = detail::get_or<double>(h, "theta", 2.0);
        if (!(c.h_spec.gamma > 0.0 && c.h_spec.gamma <= 1.0))
            throw ConfigError("config: h_spec.gamma must lie in (0,1]");
        if (!(c.h_spec.theta > 0.0)) throw ConfigError("config: h_spec.theta must be positive");
    }
    if (j.contains("f_spec")) {
        const auto& f = j.at("f_spec");
        const std::string kind = detail::get_or<std::string>(f, "kind", "constant");
        if (kind == "constant")
            c.f_spec.kind = SourceSpec::Kind::constant;
        else if (kind == "boundary_singular")
            c.f_spec.kind = SourceSpec::Kind::boundary_singular;
        else
            throw ConfigError("config: f_spec.kind must be constant|boundary_singular");
        c.f_spec.amplitude = detail::get_or<double>(f, "amplitude", 1.0);
        c.f_spec.beta = detail::get_or<double>(f, "beta", 0.0);
        if (c.f_spec.amplitude < 0.0) throw ConfigError("config: f_spec.amplitude must be >= 0");
        if (!(c.f_spec.beta >= 0.0 && c.f_spec.beta < 1.0))
            throw ConfigError("config: f_spec.beta must lie in [0,1)");
    }
    if (j.contains("mu_spec")) {
        const auto& m = j.at("mu_spec");
        const std::string kind = detail::get_or<std::string>(m, "kind", "l1_density");
        if (kind == "l1_density")
            c.mu_spec.kind = MeasureSpec::Kind::l1_density;
        else if (kind == "dirac")
            c.mu_spec.kind = MeasureSpec::Kind::dirac;
        else
            throw ConfigError("config: mu_spec.kind must be l1_density|dirac");
        c.mu_spec.amplitude = detail::get_or<double>(m, "amplitude", 0.0);
        c.mu_spec.beta = detail::get_or<double>(m, "beta", 0.0);
        c.mu_spec.atom_location = detail::get_or<double>(m, "atom_location", 0.0);
        c.mu_spec.mass = detail::get_or<double>(m, "mass", 0.0);
        if (c.mu_spec.amplitude < 0.0 || c.mu_spec.mass < 0.0)
            throw ConfigError("config: measure must be nonnegative");
        if (!(c.mu_spec.beta >= 0.0 && c.mu_spec.beta < 1.0))
            throw ConfigError("config: mu_spec.beta must lie in [0,1)");
        if (c.mu_spec.kind == MeasureSpec::Kind::dirac &&
            !(c.mu_spec.atom_location > c.a && c.mu_spec.atom_location < c.b))
            throw ConfigError("config: atom_location must lie in (a,b)");
    }
    c.n_schedule = detail::get_or<std::vector<double>>(j, "n_schedule", c.n_schedule);
    for (size_t i = 0; i < c.n_schedule.size(); ++i) {
        if (c.n_schedule[i] < 1.0) throw ConfigError("config: n_schedule entries must be >= 1");
        if (i > 0 && !(c.n_schedule[i] > c.n_schedule[i - 1]))
            throw ConfigError("config: n_schedule must be strictly increasing");
    }
    if (c.n_schedule.empty()) throw ConfigError("config: n_schedule must be nonempty");
    c.k_list = detail::get_or<std::vector<double>>(j, "k_list", c.k_list);
    if (j.contains("tolerances")) {
        const auto& t = j.at("tolerances");
        c.tol.solver = detail::get_or<double>(t, "solver", c.tol.solver);
        c.tol.eigen = detail::get_or<double>(t, "eigen", c.tol.eigen);
        c.tol.entropy = detail::get_or<double>(t, "entropy", c.tol.entropy);
    }
    c.seed = detail::get_or<unsigned>(j, "seed", c.seed);
    c.output_dir = detail::get_or<std::string>(j, "output_dir", c.output_dir);
    return c;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: parse failure: ") + e.what());
    }
    return parse_config(j);
}

inline nlohmann::json config_echo(const ExperimentConfig& c) {
    nlohmann::json j;
    j["grid"] = {{"a", c.a}, {"b", c.b}, {"n_cells", c.n_cells}};
    j["s"] = c.s;
    j["q"] = c.q;
    j["h_spec"] = {{"gamma", c.h_spec.gamma}, {"theta", c.h_spec.theta}};
    j["f_spec"] = {
        {"kind", c.f_spec.kind == SourceSpec::Kind::constant ? "constant" : "boundary_singular"},
        {"amplitude", c.f_spec.amplitude},
        {"beta", c.f_spec.beta}};
    j["mu_spec"] = {
        {"kind", c.mu_spec.kind == MeasureSpec::Kind::l1_density ? "l1_density" : "dirac"},
        {"amplitude", c.mu_spec.amplitude},
        {"beta", c.mu_spec.beta},
        {"atom_location", c.mu_spec.atom_location},
        {"mass", c.mu_spec.mass}};
    j["n_schedule"] = c.n_schedule;
    j["k_list"] = c.k_list;
    j["tolerances"] = {{"solver", c.tol.solver}, {"eigen", c.tol.eigen}, {"entropy", c.tol.entropy}};
    j["seed"] = c.seed;
    j["output_dir"] = c.output_dir;
    return j;
}

/// Seeded test vectors vanishing at the two boundary-adjacent nodes on
/// each side: windowed random low-frequency Fourier sums.
inline std::vector<Eigen::VectorXd> random_test_vectors(const Grid& grid, int count,
                                                        unsigned seed, int modes = 6) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::vector<Eigen::VectorXd> out;
    const int n = grid.n_nodes();
    for (int v = 0; v < count; ++v) {
        std::vector<double> coef(modes);
        for (double& cf : coef) cf = unif(rng);
        Eigen::VectorXd phi(n);
        for (int i = 0; i < n; ++i) {
            const double t = (grid.nodes[i] - grid.a) / grid.length();
            double val = 0.0;
            for (int k = 0; k < modes; ++k) val += coef[k] * std::sin((k + 1) * M_PI * t);
            phi[i] = val * t * (1.0 - t);  // window to zero at the boundary
        }
        for (int i = 0; i < std::min(2, n); ++i) {
            phi[i] = 0.0;
            phi[n - 1 - i] = 0.0;
        }
        out.push_back(std::move(phi));
    }
    return out;
}

}  // namespace fraclap

#endif
