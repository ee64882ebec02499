#ifndef FRACLAP_ANALYSIS_HPP
#define FRACLAP_ANALYSIS_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "fraclap/certificate.hpp"
#include "fraclap/fractional_operator.hpp"
#include "fraclap/grid.hpp"
#include "fraclap/nonlinearity.hpp"
#include "fraclap/solver.hpp"

namespace fraclap {

struct NormReport {
    std::map<double, double> lp;
    std::map<std::pair<double, double>, double> gagliardo;  // (s1, p) -> value
    std::map<double, double> marcinkiewicz;
};

inline double lp_norm(const Eigen::VectorXd& u, double p, const Grid& grid) {
    if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
    double acc = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) acc += std::pow(std::abs(u[i]), p);
    return std::pow(grid.h * acc, 1.0 / p);
}

namespace detail {

// closed-form double integral of (y-x)^{-alpha} over [p1,p2] x [q1,q2],
// q1 >= p2, alpha in (1,2)
inline double cell_pair_mass(double p1, double p2, double q1, double q2, double alpha) {
    const double beta = 2.0 - alpha;
    // rounding can push the touching-cell gap q1 - p2 to -1e-17; clamp
    // before the fractional power
    const auto pw = [beta](double d) { return std::pow(std::max(d, 0.0), beta); };
    const double num = pw(q2 - p1) - pw(q2 - p2) - pw(q1 - p1) + pw(q1 - p2);
    return num / ((1.0 - alpha) * beta);
}

// double integral of (y-x)^{-alpha} over [p1,p2] x [q, infinity)
inline double cell_tail_mass(double p1, double p2, double q, double alpha) {
    const double beta = 2.0 - alpha;
    return (std::pow(q - p1, beta) - std::pow(q - p2, beta)) / ((alpha - 1.0) * beta);
}

}  // namespace detail

/// Discrete Gagliardo seminorm of order s1 in L^p, for the zero-extended
/// function: midpoint-cell quadrature of the double integral over the
/// pairing region, with per-cell-pair kernel mass in closed form. Requires
/// p*s1 < 1 so the touching-cell masses stay finite.
inline double gagliardo_seminorm(const Eigen::VectorXd& u, double s1, double p,
                                 const Grid& grid) {
    if (!(s1 > 0.0 && s1 < 1.0) || !(p >= 1.0) || !(p * s1 < 1.0))
        throw std::invalid_argument("gagliardo_seminorm: need s1 in (0,1), p >= 1, p*s1 < 1");
    const int n = grid.n_nodes();
    if (u.size() != n) throw std::invalid_argument("gagliardo_seminorm: dimension mismatch");
    const double alpha = 1.0 + p * s1;
    const double hh = 0.5 * grid.h;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const double p1 = grid.nodes[i] - hh, p2 = grid.nodes[i] + hh;
        for (int j = i + 1; j < n; ++j) {
            const double mass = detail::cell_pair_mass(p1, p2, grid.nodes[j] - hh,
                                                       grid.nodes[j] + hh, alpha);
            acc += 2.0 * std::pow(std::abs(u[i] - u[j]), p) * mass;
        }
        // exterior of the covered span on both sides (u = 0 there)
        const double right = detail::cell_tail_mass(p1, p2, grid.nodes[n - 1] + hh, alpha);
        const double left =
            detail::cell_tail_mass(-p2, -p1, -(grid.nodes[0] - hh), alpha);
        acc += 2.0 * std::pow(std::abs(u[i]), p) * (left + right);
    }
    return std::pow(acc, 1.0 / p);
}

/// Lebesgue measure of the discrete super-level set {|u| >= t}.
inline double distribution_function(const Eigen::VectorXd& u, double t, const Grid& grid) {
    int count = 0;
    for (Eigen::Index i = 0; i < u.size(); ++i)
        if (std::abs(u[i]) >= t) ++count;
    return grid.h * count;
}

/// sup_t t * omega({|u| >= t})^{1/r}, evaluated over the attained levels.
inline double marcinkiewicz_norm(const Eigen::VectorXd& u, double r, const Grid& grid) {
    if (!(r > 0.0)) throw std::invalid_argument("marcinkiewicz_norm: r must be positive");
    double best = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        const double t = std::abs(u[i]);
        if (t == 0.0) continue;
        best = std::max(best, t * std::pow(distribution_function(u, t, grid), 1.0 / r));
    }
    return best;
}

/// Truncation-energy growth: e(k) = B(T_k(w), T_k(w)) must be O(k). The
/// bound is calibrated from the smallest three levels with a 4x headroom
/// factor.
inline Certificate energy_growth_certificate(const Eigen::VectorXd& w,
                                             const OperatorMatrix& op,
                                             std::vector<double> k_list) {
    std::sort(k_list.begin(), k_list.end());
    if (k_list.size() < 3 || !(k_list.back() >= 10.0 * k_list.front()))
        throw std::invalid_argument(
            "energy_growth_certificate: k_list must have >= 3 levels spanning a decade");
    if (!(w.cwiseAbs().maxCoeff() > 0.0))
        throw std::invalid_argument("energy_growth_certificate: degenerate w");
    Certificate cert;
    cert.name = "energy_growth";
    std::vector<double> ratios;
    for (size_t idx = 0; idx < k_list.size(); ++idx) {
        const double k = k_list[idx];
        const Eigen::VectorXd tk = truncate(k, w);
        const double e = bilinear_form(op, tk, tk);
        cert.data["e_" + std::to_string(idx)] = e;
        ratios.push_back(e / k);
    }
    std::vector<double> head(ratios.begin(), ratios.begin() + 3);
    std::sort(head.begin(), head.end());
    const double c_fit = 4.0 * head[1];
    cert.tolerance = c_fit;
    cert.data["c_fit"] = c_fit;
    cert.data["max_ratio"] = *std::max_element(ratios.begin(), ratios.end());
    cert.pass = cert.data["max_ratio"] <= c_fit;
    return cert;
}

namespace detail {

// least-squares slope of y against x
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace detail

/// Super-level-set decay: the log-log slope of omega({w >= k}) against k
/// must not exceed -1/(1-2s) (the N=1 Marcinkiewicz exponent), up to a
/// fixed slack; a distribution that vanishes inside the k-range passes
/// outright.
inline Certificate tail_exponent_certificate(const Eigen::VectorXd& w, const Grid& grid,
                                             double s, const std::vector<double>& k_list,
                                             double slack = 0.3) {
    if (!(s < 0.5))
        throw std::invalid_argument("tail_exponent_certificate: requires s < 1/2");
    Certificate cert;
    cert.name = "tail_exponent";
    cert.tolerance = slack;
    const double target = 1.0 / (1.0 - 2.0 * s);  // N/(N-2s), N = 1
    cert.data["target_exponent"] = target;
    std::vector<double> lk, ld;
    bool vanished = false;
    for (double k : k_list) {
        const double d = distribution_function(w, k, grid);
        if (d == 0.0) {
            vanished = true;
            continue;
        }
        lk.push_back(std::log(k));
        ld.push_back(std::log(d));
    }
    cert.data["vanished"] = vanished ? 1.0 : 0.0;
    if (vanished || lk.size() < 2) {
        cert.pass = true;
        return cert;
    }
    const double slope = detail::fit_slope(lk, ld);
    cert.data["slope"] = slope;
    cert.pass = slope <= -target + slack;
    return cert;
}

/// Two-sided delta^s envelope: k1 = min, k2 = max of u_i / delta_i^s over
/// the nodes at least `exclusion` positions away from either endpoint.
/// When a coarse-grid ratio is supplied, the envelope ratio must not
/// increase under the refinement.
inline Certificate boundary_envelope_certificate(const Eigen::VectorXd& u, const Grid& grid,
                                                 double s, int exclusion,
                                                 double coarse_ratio = -1.0,
                                                 double headroom = 50.0) {
    if (exclusion < 1)
        throw std::invalid_argument("boundary_envelope_certificate: exclusion >= 1");
    const int n = grid.n_nodes();
    if (2 * exclusion >= n)
        throw std::invalid_argument("boundary_envelope_certificate: empty inclusion set");
    double k1 = std::numeric_limits<double>::infinity(), k2 = 0.0;
    for (int i = exclusion; i < n - exclusion; ++i) {
        const double r = u[i] / std::pow(grid.delta[i], s);
        k1 = std::min(k1, r);
        k2 = std::max(k2, r);
    }
    Certificate cert;
    cert.name = "boundary_envelope";
    cert.tolerance = headroom;
    cert.data["k1"] = k1;
    cert.data["k2"] = k2;
    cert.data["ratio"] = k2 / k1;
    cert.pass = k1 > 0.0 && k2 / k1 <= headroom;
    if (coarse_ratio > 0.0) {
        cert.data["coarse_ratio"] = coarse_ratio;
        cert.pass = cert.pass && k2 / k1 <= coarse_ratio * (1.0 + 1e-9);
    }
    return cert;
}

/// Entropy-inequality residual LHS - RHS for the test pair (phi, k); a
/// nonpositive value certifies the inequality. The measure is paired
/// exactly (density sum or atom evaluation), not through a schedule.
inline double entropy_residual(const Eigen::VectorXd& u, const Eigen::VectorXd& phi,
                               double k, const ProblemSpec& problem,
                               const OperatorMatrix& op) {
    if (phi.size() != u.size() || u.size() != op.size())
        throw std::invalid_argument("entropy_residual: dimension mismatch");
    const Grid& grid = problem.grid;
    const Eigen::VectorXd psi = truncate(k, (u - phi).eval());
    const double lhs = bilinear_form(op, u, psi);
    double rhs = 0.0;
    for (int i = 0; i < grid.n_nodes(); ++i) {
        const double reaction = std::pow(u[i], -problem.q) +
                                source_eval(problem.f_spec, grid.delta[i]) *
                                    h_eval(problem.h_spec, u[i]);
        rhs += grid.h * reaction * psi[i];
    }
    if (problem.mu_spec.kind == MeasureSpec::Kind::l1_density) {
        for (int i = 0; i < grid.n_nodes(); ++i)
            rhs += grid.h * density_eval(problem.mu_spec, grid.delta[i]) * psi[i];
    } else {
        int best = 0;
        for (int i = 1; i < grid.n_nodes(); ++i)
            if (std::abs(grid.nodes[i] - problem.mu_spec.atom_location) <
                std::abs(grid.nodes[best] - problem.mu_spec.atom_location))
                best = i;
        rhs += problem.mu_spec.mass * psi[best];
    }
    return lhs - rhs;
}

/// Energy of the truncated difference of two candidate solutions; zero
/// for all k exactly when the two coincide.
inline double uniqueness_gap(const Eigen::VectorXd& u, const Eigen::VectorXd& v, double k,
                             const OperatorMatrix& op) {
    const Eigen::VectorXd d = truncate(k, (u - v).eval());
    return bilinear_form(op, d, d);
}

/// Weighted-integral-to-seminorm ratios for the Hardy-Sobolev bound at
/// order s*q: finite and mutually consistent ratios (max <= 2x median)
/// over the supplied test set.
inline Certificate hardy_sobolev_certificate(const std::vector<Eigen::VectorXd>& phi_set,
                                             double s, double q, const Grid& grid) {
    const double sq = s * q;
    if (!(sq > 0.0 && sq < 0.5))
        throw std::invalid_argument("hardy_sobolev_certificate: requires s*q in (0, 1/2)");
    if (phi_set.empty())
        throw std::invalid_argument("hardy_sobolev_certificate: empty test set");
    std::vector<double> ratios;
    for (const auto& phi : phi_set) {
        double weighted = 0.0;
        for (int i = 0; i < grid.n_nodes(); ++i)
            weighted += grid.h * phi[i] * phi[i] * std::pow(grid.delta[i], -2.0 * sq);
        const double semi = gagliardo_seminorm(phi, sq, 2.0, grid);
        ratios.push_back(weighted / (semi * semi));
    }
    std::vector<double> sorted = ratios;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[sorted.size() / 2];
    Certificate cert;
    cert.name = "hardy_sobolev";
    cert.tolerance = 2.0;
    cert.data["max_ratio"] = sorted.back();
    cert.data["median_ratio"] = median;
    cert.pass = std::isfinite(sorted.back()) && sorted.back() <= 2.0 * median;
    return cert;
}

}  // namespace fraclap

#endif
