#ifndef FRACLAP_FRACTIONAL_OPERATOR_HPP
#define FRACLAP_FRACTIONAL_OPERATOR_HPP

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "fraclap/grid.hpp"

namespace fraclap {

/// C_{1,s} = 4^s Gamma(1/2+s) / (sqrt(pi) |Gamma(-s)|), the constant that
/// makes the singular-integral operator agree with the usual one.
inline double normalization_constant(double s) {
    if (!(s > 0.0 && s < 1.0))
        throw std::invalid_argument("normalization_constant: s must lie in (0,1)");
    return std::pow(4.0, s) * std::tgamma(0.5 + s) /
           (std::sqrt(M_PI) * std::abs(std::tgamma(-s)));
}

/// Kernel mass of R \ (a,b) seen from an interior point x, before the
/// C_{1,s} factor: ((x-a)^{-2s} + (b-x)^{-2s}) / (2s).
inline double tail_weight(double x, const Grid& grid, double s) {
    if (!(x > grid.a && x < grid.b))
        throw std::invalid_argument("tail_weight: x must lie strictly inside (a,b)");
    return (std::pow(x - grid.a, -2.0 * s) + std::pow(grid.b - x, -2.0 * s)) / (2.0 * s);
}

/// Dense discrete restricted fractional Laplacian over the interior nodes.
/// weights is the full matrix L; tail holds the per-node exterior mass
/// (already scaled by c_ns) folded into the diagonal, so every row sums
/// to tail(i) exactly.
struct OperatorMatrix {
    double s = 0.0;
    double c_ns = 0.0;
    double h = 0.0;
    Eigen::MatrixXd weights;
    Eigen::VectorXd tail;
    bool outside_paper_regime = false;  // s >= 1/2

    int size() const { return static_cast<int>(weights.rows()); }
};

namespace detail {

// int_{r1}^{r2} r^{-1-2s} dr, 0 < r1 < r2
inline double kernel_mass(double r1, double r2, double s) {
    return (std::pow(r1, -2.0 * s) - std::pow(r2, -2.0 * s)) / (2.0 * s);
}

// int_{r1}^{r2} r^{-2s} dr, 0 <= r1 < r2
inline double kernel_first_moment(double r1, double r2, double s) {
    if (s == 0.5) return std::log(r2 / r1);
    return (std::pow(r2, 1.0 - 2.0 * s) - std::pow(r1, 1.0 - 2.0 * s)) / (1.0 - 2.0 * s);
}

// Exact integral of the hat at distance m*h against the kernel |r|^{-1-2s},
// for separations m >= 2 (no singularity inside the support).
inline double hat_kernel_weight(int m, double h, double s) {
    const double r0 = (m - 1) * h, r1 = m * h, r2 = (m + 1) * h;
    const double left = (kernel_first_moment(r0, r1, s) - r0 * kernel_mass(r0, r1, s)) / h;
    const double right = (r2 * kernel_mass(r1, r2, s) - kernel_first_moment(r1, r2, s)) / h;
    return left + right;
}

// Principal-value integral over the two cells adjacent to a node. The
// piecewise-linear interpolant gives the odd-cancellation form
// (2u_i - u_{i-1} - u_{i+1}) * sigma; for s >= 1/2 the linear kink is not
// integrable against the kernel and the symmetric quadratic rule is used
// instead (positive for all s).
inline double singular_cell_weight(double h, double s) {
    if (s < 0.5) return std::pow(h, -2.0 * s) / (1.0 - 2.0 * s);
    return std::pow(h, -2.0 * s) / (2.0 - 2.0 * s);
}

// Exact value of the operator applied to the one-sided profile
// (x-a)^s_+ restricted to (a,b): the profile is s-harmonic on (a,inf),
// so only the mass removed beyond b remains,
//   C * int_b^inf (y-a)^s (y-x)^{-1-2s} dy.
// Substituting w = (y-x)^{-s} turns this into a smooth integral on a
// bounded range, evaluated by a fixed midpoint rule.
inline double one_sided_profile_reference(double x, double a, double b, double s,
                                          double c_ns) {
    const double upper = std::pow(1.0 / (b - x), s);
    const int nq = 4000;
    const double dw = upper / nq;
    double acc = 0.0;
    for (int j = 0; j < nq; ++j) {
        const double w = (j + 0.5) * dw;
        acc += std::pow((x - a) * std::pow(w, 1.0 / s) + 1.0, s);
    }
    return c_ns * acc * dw / s;
}

}  // namespace detail

inline OperatorMatrix assemble_operator(const Grid& grid, double s) {
    if (!(s > 0.0 && s < 1.0))
        throw std::invalid_argument("assemble_operator: s must lie in (0,1)");
    const int n = grid.n_nodes();
    OperatorMatrix op;
    op.s = s;
    op.c_ns = normalization_constant(s);
    op.h = grid.h;
    op.outside_paper_regime = (s >= 0.5);
    op.weights = Eigen::MatrixXd::Zero(n, n);
    op.tail.resize(n);

    // Toeplitz off-diagonal band: w[m] is the interaction weight at
    // separation m*h.
    std::vector<double> w(n, 0.0);
    if (n > 1) w[1] = detail::singular_cell_weight(grid.h, s);
    for (int m = 2; m < n; ++m) w[m] = detail::hat_kernel_weight(m, grid.h, s);

    for (int i = 0; i < n; ++i) {
        op.tail[i] = op.c_ns * tail_weight(grid.nodes[i], grid, s);
        double diag = op.tail[i];
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const double wij = op.c_ns * w[std::abs(i - j)];
            op.weights(i, j) = -wij;
            diag += wij;
        }
        op.weights(i, i) = diag;
    }

    // Near-boundary recalibration. The Toeplitz weights lose accuracy at
    // fixed index near the boundary because linear interpolation cannot
    // resolve the delta^s edge behavior of solutions. Symmetric pair
    // updates anchored at the first (resp. last) node make the matrix
    // exact on the one-sided profile (x-a)^s_+ (resp. mirrored) in the
    // first band of rows, while preserving row sums, symmetry, and -- via
    // the clamp -- the off-diagonal sign pattern.
    const int band = std::min(std::max(8, grid.n_cells / 8), (n - 1) / 2);
    if (band >= 1) {
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v[i] = std::pow(grid.nodes[i] - grid.a, s);
        const Eigen::VectorXd base = op.weights * v;
        for (int i = 1; i <= band; ++i) {
            const double ref = detail::one_sided_profile_reference(
                grid.nodes[i], grid.a, grid.b, s, op.c_ns);
            double eps = (ref - base[i]) / (v[i] - v[0]);
            eps = std::max(eps, -op.c_ns * w[i]);  // keep off-diagonals <= 0
            op.weights(0, i) -= eps;
            op.weights(i, 0) -= eps;
            op.weights(0, 0) += eps;
            op.weights(i, i) += eps;
            const int i0 = n - 1, ii = n - 1 - i;
            op.weights(i0, ii) -= eps;
            op.weights(ii, i0) -= eps;
            op.weights(i0, i0) += eps;
            op.weights(ii, ii) += eps;
        }
    }
    return op;
}

inline Eigen::VectorXd apply(const OperatorMatrix& op, const Eigen::VectorXd& u) {
    if (u.size() != op.size())
        throw std::invalid_argument("apply: dimension mismatch");
    return op.weights * u;
}

/// Discrete fractional Dirichlet pairing u^T L v * h. Symmetric in (u,v).
inline double bilinear_form(const OperatorMatrix& op, const Eigen::VectorXd& u,
                            const Eigen::VectorXd& v) {
    if (u.size() != op.size() || v.size() != op.size())
        throw std::invalid_argument("bilinear_form: dimension mismatch");
    return u.dot(op.weights * v) * op.h;
}

struct SpectralEstimate {
    double lambda1 = 0.0;
    Eigen::VectorXd eigvec;
    double residual = 0.0;
};

/// Inverse power iteration for the principal eigenpair. The eigenvector is
/// normalized to max-norm 1 and returned with positive sign.
inline SpectralEstimate smallest_eigenvalue(const OperatorMatrix& op, double tol,
                                            int max_iters = 10000) {
    const int n = op.size();
    Eigen::LDLT<Eigen::MatrixXd> factor(op.weights);
    if (factor.info() != Eigen::Success)
        throw std::runtime_error("smallest_eigenvalue: factorization failed");
    Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
    v /= v.norm();
    double lambda = 0.0;
    for (int it = 0; it < max_iters; ++it) {
        Eigen::VectorXd y = factor.solve(v);
        y /= y.norm();
        lambda = y.dot(op.weights * y);
        const double res = (op.weights * y - lambda * y).norm();
        v = y;
        if (res <= tol * y.norm()) {
            SpectralEstimate est;
            if (v.sum() < 0.0) v = -v;
            est.eigvec = v / v.cwiseAbs().maxCoeff();
            est.lambda1 = lambda;
            est.residual = res;
            return est;
        }
    }
    throw std::runtime_error("smallest_eigenvalue: no convergence after max iterations");
}

}  // namespace fraclap

#endif
