#ifndef FRACLAP_NONLINEARITY_HPP
#define FRACLAP_NONLINEARITY_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "fraclap/grid.hpp"

namespace fraclap {

/// Clip to the band [-k, k].
inline double truncate(double k, double s) {
    if (!(k > 0.0)) throw std::invalid_argument("truncate: level k must be positive");
    return std::clamp(s, -k, k);
}

inline Eigen::VectorXd truncate(double k, const Eigen::VectorXd& u) {
    Eigen::VectorXd out(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) out[i] = truncate(k, u[i]);
    return out;
}

/// Componentwise u^{-q}. Positivity of u is a hard precondition: a
/// nonpositive entry is a solver bug and must surface, never be clamped.
inline Eigen::VectorXd singular_term(const Eigen::VectorXd& u, double q) {
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("singular_term: q must lie in (0,1)");
    Eigen::VectorXd out(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        if (!(u[i] > 0.0)) throw std::domain_error("singular_term: nonpositive entry");
        out[i] = std::pow(u[i], -q);
    }
    return out;
}

/// Non-increasing continuous nonlinearity h(t) = 1/(t^gamma + t^theta),
/// singular at 0 like t^{-gamma} and decaying like t^{-theta}.
struct HSpec {
    double gamma = 0.5;
    double theta = 2.0;
    double c1 = 1.0;
    double c2 = 1.0;
};

inline double h_eval(const HSpec& spec, double t) {
    if (!(t > 0.0)) throw std::domain_error("h_eval: t must be positive");
    return 1.0 / (std::pow(t, spec.gamma) + std::pow(t, spec.theta));
}

inline double h_derivative(const HSpec& spec, double t) {
    const double d = std::pow(t, spec.gamma) + std::pow(t, spec.theta);
    const double dd = spec.gamma * std::pow(t, spec.gamma - 1.0) +
                      spec.theta * std::pow(t, spec.theta - 1.0);
    return -dd / (d * d);
}

/// h truncated at level n; h is nonnegative so T_n(h) = min(h, n).
inline double h_truncated(double n, const HSpec& spec, double t) {
    if (!(n >= 1.0)) throw std::invalid_argument("h_truncated: level must be >= 1");
    return std::min(h_eval(spec, t), n);
}

inline double h_truncated_derivative(double n, const HSpec& spec, double t) {
    return h_eval(spec, t) >= n ? 0.0 : h_derivative(spec, t);
}

/// Nonnegative datum f: either a constant or a boundary-singular profile
/// amplitude * delta(x)^{-beta} with beta < 1 (so f stays in L^1).
struct SourceSpec {
    enum class Kind { constant, boundary_singular };
    Kind kind = Kind::constant;
    double amplitude = 1.0;
    double beta = 0.0;
};

inline double source_eval(const SourceSpec& spec, double delta) {
    if (spec.kind == SourceSpec::Kind::constant) return spec.amplitude;
    return spec.amplitude * std::pow(delta, -spec.beta);
}

inline Eigen::VectorXd source_truncated(double n, const SourceSpec& spec, const Grid& grid) {
    Eigen::VectorXd f(grid.n_nodes());
    for (int i = 0; i < grid.n_nodes(); ++i)
        f[i] = std::min(source_eval(spec, grid.delta[i]), n);
    return f;
}

/// Nonnegative measure datum: an L^1 density (possibly unbounded near the
/// boundary) or a single Dirac atom.
struct MeasureSpec {
    enum class Kind { l1_density, dirac };
    Kind kind = Kind::l1_density;
    double amplitude = 0.0;  // density scale: amplitude * delta^{-beta}
    double beta = 0.0;       // beta < 1
    double atom_location = 0.0;
    double mass = 0.0;
};

inline double density_eval(const MeasureSpec& spec, double delta) {
    return spec.amplitude * std::pow(delta, -spec.beta);
}

/// Truncation schedule mu_n: densities are clipped at n (monotone in n);
/// a Dirac atom becomes mass/h at the nearest node, independent of n.
inline Eigen::VectorXd measure_approximant(const MeasureSpec& spec, double n,
                                           const Grid& grid) {
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(grid.n_nodes());
    if (spec.kind == MeasureSpec::Kind::l1_density) {
        for (int i = 0; i < grid.n_nodes(); ++i)
            mu[i] = std::min(density_eval(spec, grid.delta[i]), n);
    } else {
        if (!(spec.atom_location > grid.a && spec.atom_location < grid.b))
            throw std::invalid_argument("measure_approximant: atom outside (a,b)");
        int best = 0;
        for (int i = 1; i < grid.n_nodes(); ++i)
            if (std::abs(grid.nodes[i] - spec.atom_location) <
                std::abs(grid.nodes[best] - spec.atom_location))
                best = i;
        mu[best] = spec.mass / grid.h;
    }
    return mu;
}

/// Alternative schedule for the uniqueness experiment: window-average the
/// truncated density over [x-w, x+w] with the density extended by zero
/// outside the interval. Distinct from the nodal truncation at every
/// finite n, converging to the same measure.
inline Eigen::VectorXd measure_approximant_mollified(const MeasureSpec& spec, double n,
                                                     double width, const Grid& grid) {
    if (spec.kind != MeasureSpec::Kind::l1_density)
        throw std::invalid_argument("measure_approximant_mollified: density schedules only");
    Eigen::VectorXd mu(grid.n_nodes());
    const int quad_pts = 64;
    for (int i = 0; i < grid.n_nodes(); ++i) {
        const double x = grid.nodes[i];
        double acc = 0.0;
        // midpoint rule on a fixed fine subdivision of the window
        const double dw = 2.0 * width / quad_pts;
        for (int j = 0; j < quad_pts; ++j) {
            const double y = x - width + (j + 0.5) * dw;
            if (y <= grid.a || y >= grid.b) continue;
            const double d = std::min(y - grid.a, grid.b - y);
            acc += std::min(density_eval(spec, d), n) * dw;
        }
        mu[i] = acc / (2.0 * width);
    }
    return mu;
}

}  // namespace fraclap

#endif
