#ifndef FRACLAP_SOLVER_HPP
#define FRACLAP_SOLVER_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fraclap/certificate.hpp"
#include "fraclap/fractional_operator.hpp"
#include "fraclap/grid.hpp"
#include "fraclap/nonlinearity.hpp"

namespace fraclap {

struct ProblemSpec {
    double q = 0.5;
    double s = 0.25;
    HSpec h_spec;
    SourceSpec f_spec;
    MeasureSpec mu_spec;
    Grid grid;
};

constexpr double kLimitLevel = std::numeric_limits<double>::infinity();

struct Solution {
    Eigen::VectorXd values;
    double level = 1.0;  // truncation level n, kLimitLevel for the untruncated solve
    double residual_norm = 0.0;
    int newton_iters = 0;
    std::vector<std::pair<double, double>> continuation_trace;  // (eps, residual)
};

struct SolverError : std::runtime_error {
    std::vector<std::pair<double, double>> trace;
    SolverError(const std::string& msg, std::vector<std::pair<double, double>> t)
        : std::runtime_error(msg), trace(std::move(t)) {}
};

namespace detail {

/// State-dependent nonsingular part of the reaction: g(w) and dg/dw
/// (componentwise). dg/dw must be <= 0 so the Newton matrix stays SPD.
struct Reaction {
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> value;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> deriv;
};

inline Reaction constant_reaction(const Eigen::VectorXd& g) {
    return {[g](const Eigen::VectorXd& w) { return g; },
            [g](const Eigen::VectorXd& w) { return Eigen::VectorXd::Zero(w.size()); }};
}

/// Damped Newton on L w = q_weight*(w+eps)^{-q} + g(w), with
/// eps-continuation from 1 down to 0 to desingularize the reaction near
/// the boundary where w vanishes. Steps are halved until the iterate is
/// componentwise positive and the residual decreases.
inline Solution solve_singular(const OperatorMatrix& op, const Reaction& reaction,
                               double q, double tol, double q_weight,
                               const Eigen::VectorXd* initial = nullptr,
                               int max_newton_per_stage = 200) {
    const int n = op.size();
    Eigen::LDLT<Eigen::MatrixXd> torsion(op.weights);
    Eigen::VectorXd w =
        initial ? *initial : torsion.solve(Eigen::VectorXd::Ones(n)).eval();
    if (!(w.minCoeff() > 0.0))
        throw std::runtime_error("solve_singular: initial guess not positive");

    Solution sol;
    const auto residual = [&](const Eigen::VectorXd& v, double eps) -> Eigen::VectorXd {
        Eigen::VectorXd sing(n);
        for (int i = 0; i < n; ++i) sing[i] = std::pow(v[i] + eps, -q);
        return op.weights * v - q_weight * sing - reaction.value(v);
    };

    double eps = 1.0;
    while (true) {
        Eigen::VectorXd F = residual(w, eps);
        double fnorm = F.lpNorm<Eigen::Infinity>();
        int it = 0;
        while (fnorm > tol) {
            if (++it > max_newton_per_stage) {
                std::ostringstream msg;
                msg << "solve_singular: Newton cap exceeded at eps=" << eps
                    << " residual=" << fnorm;
                throw SolverError(msg.str(), sol.continuation_trace);
            }
            Eigen::MatrixXd J = op.weights;
            const Eigen::VectorXd gd = reaction.deriv(w);
            for (int i = 0; i < n; ++i)
                J(i, i) += q_weight * q * std::pow(w[i] + eps, -q - 1.0) - gd[i];
            const Eigen::VectorXd step = J.ldlt().solve(-F);
            double alpha = 1.0;
            bool accepted = false;
            for (int half = 0; half < 50; ++half) {
                const Eigen::VectorXd trial = w + alpha * step;
                if (trial.minCoeff() > 0.0) {
                    const Eigen::VectorXd Ft = residual(trial, eps);
                    const double ft = Ft.lpNorm<Eigen::Infinity>();
                    if (ft < fnorm) {
                        w = trial;
                        F = Ft;
                        fnorm = ft;
                        accepted = true;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            ++sol.newton_iters;
            if (!accepted) {
                std::ostringstream msg;
                msg << "solve_singular: Newton stagnation at eps=" << eps
                    << " residual=" << fnorm;
                throw SolverError(msg.str(), sol.continuation_trace);
            }
        }
        sol.continuation_trace.emplace_back(eps, fnorm);
        sol.residual_norm = fnorm;
        if (eps == 0.0) break;
        eps = (0.5 * eps > 1e-12 * w.cwiseAbs().maxCoeff()) ? 0.5 * eps : 0.0;
    }
    sol.values = w;
    return sol;
}

}  // namespace detail

/// Auxiliary problem L w = w^{-q} + g for fixed nonnegative data g.
/// q_weight 0 disables the singular term (linear solve check path).
inline Solution solve_regularized(const OperatorMatrix& op, const Eigen::VectorXd& g,
                                  double q, double tol, double q_weight = 1.0) {
    if (g.size() != op.size())
        throw std::invalid_argument("solve_regularized: dimension mismatch");
    if (g.minCoeff() < 0.0)
        throw std::invalid_argument("solve_regularized: g must be nonnegative");
    return detail::solve_singular(op, detail::constant_reaction(g), q, tol, q_weight);
}

namespace detail {

inline Eigen::VectorXd frozen_reaction_data(const ProblemSpec& problem, double n,
                                            const Eigen::VectorXd& v) {
    const Eigen::VectorXd f = source_truncated(n, problem.f_spec, problem.grid);
    const Eigen::VectorXd mu = measure_approximant(problem.mu_spec, n, problem.grid);
    Eigen::VectorXd g(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i)
        g[i] = f[i] * h_truncated(n, problem.h_spec, std::abs(v[i]) + 1.0 / n) + mu[i];
    return g;
}

}  // namespace detail

/// One application of the fixed-point map: freeze v in the h-term and
/// solve the auxiliary problem with g = f_n h_n(|v|+1/n) + mu_n.
inline Solution fixed_point_map(const ProblemSpec& problem, double n,
                                const Eigen::VectorXd& v, const OperatorMatrix& op,
                                double tol) {
    Solution sol =
        solve_regularized(op, detail::frozen_reaction_data(problem, n, v), problem.q, tol);
    sol.level = n;
    return sol;
}

/// Level-n approximant: full coupled system
/// L w = w^{-q} + f_n h_n(w + 1/n) + mu_n by damped Newton on the complete
/// residual. level = kLimitLevel solves the untruncated, unshifted system.
inline Solution solve_approximant(const ProblemSpec& problem, double n,
                                  const OperatorMatrix& op, double tol,
                                  const Eigen::VectorXd* initial = nullptr) {
    const bool limit = !(n < kLimitLevel);
    const Grid& grid = problem.grid;
    Eigen::VectorXd f(grid.n_nodes()), mu(grid.n_nodes());
    if (limit) {
        for (int i = 0; i < grid.n_nodes(); ++i)
            f[i] = source_eval(problem.f_spec, grid.delta[i]);
        if (problem.mu_spec.kind == MeasureSpec::Kind::l1_density)
            for (int i = 0; i < grid.n_nodes(); ++i)
                mu[i] = density_eval(problem.mu_spec, grid.delta[i]);
        else
            mu = measure_approximant(problem.mu_spec, 1.0, grid);
    } else {
        f = source_truncated(n, problem.f_spec, grid);
        mu = measure_approximant(problem.mu_spec, n, grid);
    }
    const double shift = limit ? 0.0 : 1.0 / n;
    const HSpec hs = problem.h_spec;

    detail::Reaction reaction;
    reaction.value = [f, mu, hs, n, shift, limit](const Eigen::VectorXd& w) {
        Eigen::VectorXd g(w.size());
        for (Eigen::Index i = 0; i < w.size(); ++i) {
            const double t = w[i] + shift;
            g[i] = f[i] * (limit ? h_eval(hs, t) : h_truncated(n, hs, t)) + mu[i];
        }
        return g;
    };
    reaction.deriv = [f, hs, n, shift, limit](const Eigen::VectorXd& w) {
        Eigen::VectorXd d(w.size());
        for (Eigen::Index i = 0; i < w.size(); ++i) {
            const double t = w[i] + shift;
            d[i] = f[i] * (limit ? h_derivative(hs, t) : h_truncated_derivative(n, hs, t));
        }
        return d;
    };

    Solution sol = detail::solve_singular(op, reaction, problem.q, tol, 1.0, initial);
    sol.level = n;
    return sol;
}

/// Interior lower-bound certificate: w_n >= v_n >= v_1 with
/// C_K = min of v_1 over the given compact subset.
/// v_n solves the companion problem L v = f_n h_n(v + 1/n) (no singular
/// term, no measure).
inline Solution solve_companion(const ProblemSpec& problem, double n,
                                const OperatorMatrix& op, double tol) {
    const Grid& grid = problem.grid;
    const Eigen::VectorXd f = source_truncated(n, problem.f_spec, grid);
    const HSpec hs = problem.h_spec;
    const double shift = 1.0 / n;
    detail::Reaction reaction;
    reaction.value = [f, hs, n, shift](const Eigen::VectorXd& v) {
        Eigen::VectorXd g(v.size());
        for (Eigen::Index i = 0; i < v.size(); ++i)
            g[i] = f[i] * h_truncated(n, hs, v[i] + shift);
        return g;
    };
    reaction.deriv = [f, hs, n, shift](const Eigen::VectorXd& v) {
        Eigen::VectorXd d(v.size());
        for (Eigen::Index i = 0; i < v.size(); ++i)
            d[i] = f[i] * h_truncated_derivative(n, hs, v[i] + shift);
        return d;
    };
    Solution sol = detail::solve_singular(op, reaction, problem.q, tol, /*q_weight=*/0.0);
    sol.level = n;
    return sol;
}

inline Certificate comparison_certificate(const ProblemSpec& problem, double n,
                                          const OperatorMatrix& op,
                                          double tol = 1e-10,
                                          double margin = 0.25) {
    const Solution wn = solve_approximant(problem, n, op, tol);
    const Solution vn = solve_companion(problem, n, op, tol);
    const Solution vn1 = solve_companion(problem, n + 1, op, tol);
    const Solution v1 = solve_companion(problem, 1, op, tol);

    const CompactSubset K = compact_subset(problem.grid, margin);
    double ck = std::numeric_limits<double>::infinity();
    for (int idx : K.indices) ck = std::min(ck, v1.values[idx]);

    Certificate cert;
    cert.name = "comparison";
    cert.tolerance = 1e-9;
    cert.data["min_w_minus_v"] = (wn.values - vn.values).minCoeff();
    cert.data["min_v_next_minus_v"] = (vn1.values - vn.values).minCoeff();
    cert.data["c_k"] = ck;
    cert.data["margin"] = margin;
    cert.data["n"] = n;
    cert.pass = cert.data["min_w_minus_v"] >= -cert.tolerance &&
                cert.data["min_v_next_minus_v"] >= -cert.tolerance && ck > 0.0;
    return cert;
}

struct LimitReport {
    Solution final;
    std::vector<double> levels;
    std::vector<double> gaps;       // max|w_{next} - w| per schedule step
    std::vector<double> residuals;  // solver residual per level
    bool cauchy_ok = true;
    bool monotone_checked = false;
    bool monotone_ok = true;
};

/// Runs the approximation ladder over an increasing schedule, warm-starting
/// each level from the previous one, and reports the Cauchy gaps. For
/// l1-density measures the monotone increase of the ladder is asserted as
/// well (the Dirac nearest-node schedule is constant in n, so it is not).
inline LimitReport approximation_limit(const ProblemSpec& problem,
                                       const std::vector<double>& n_schedule,
                                       const OperatorMatrix& op, double tol) {
    if (n_schedule.empty())
        throw std::invalid_argument("approximation_limit: empty schedule");
    for (size_t i = 1; i < n_schedule.size(); ++i)
        if (!(n_schedule[i] > n_schedule[i - 1]))
            throw std::invalid_argument("approximation_limit: schedule must increase");

    LimitReport rep;
    rep.monotone_checked = problem.mu_spec.kind == MeasureSpec::Kind::l1_density;
    Solution prev;
    for (size_t i = 0; i < n_schedule.size(); ++i) {
        Solution cur = solve_approximant(problem, n_schedule[i], op, tol,
                                         i == 0 ? nullptr : &prev.values);
        rep.levels.push_back(n_schedule[i]);
        rep.residuals.push_back(cur.residual_norm);
        if (i > 0) {
            rep.gaps.push_back((cur.values - prev.values).lpNorm<Eigen::Infinity>());
            if (rep.monotone_checked &&
                (cur.values - prev.values).minCoeff() < -1e-9)
                rep.monotone_ok = false;
        }
        prev = std::move(cur);
    }
    const size_t m = rep.gaps.size();
    if (m >= 3 && !(rep.gaps[m - 1] <= rep.gaps[m - 3]))
        rep.cauchy_ok = false;
    rep.final = std::move(prev);
    return rep;
}

}  // namespace fraclap

#endif
