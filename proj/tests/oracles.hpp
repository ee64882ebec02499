// Independent numerical oracles used only by the test suite. Everything
// here is implemented from textbook formulas, deliberately sharing no code
// with the library under test.
#ifndef FRACLAP_TEST_ORACLES_HPP
#define FRACLAP_TEST_ORACLES_HPP

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracle {

/// Lanczos approximation of Gamma(x) (g = 7, 9 coefficients), with the
/// reflection formula for x < 0.5.
inline double gamma_fn(double x) {
    static const double coef[9] = {0.99999999999980993,  676.5203681218851,
                                   -1259.1392167224028,  771.32342877765313,
                                   -176.61502916214059,  12.507343278686905,
                                   -0.13857109526572012, 9.9843695780195716e-6,
                                   1.5056327351493116e-7};
    if (x < 0.5) return M_PI / (std::sin(M_PI * x) * gamma_fn(1.0 - x));
    x -= 1.0;
    double a = coef[0];
    const double t = x + 7.5;
    for (int i = 1; i < 9; ++i) a += coef[i] / (x + i);
    return std::sqrt(2.0 * M_PI) * std::pow(t, x + 0.5) * std::exp(-t) * a;
}

/// Normalization constant C_{1,s} from the Lanczos gamma.
inline double normalization(double s) {
    return std::pow(4.0, s) * gamma_fn(0.5 + s) /
           (std::sqrt(M_PI) * std::abs(gamma_fn(-s)));
}

/// Constant value of the operator on the Getoor profile (1-x^2)^s_+.
inline double getoor_constant(double s) {
    return std::pow(2.0, 2.0 * s) * gamma_fn(s + 0.5) * gamma_fn(s + 1.0) /
           gamma_fn(0.5);
}

namespace detail {

inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double fa, double fm, double fb, double whole,
                               double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 40);
}

}  // namespace detail

/// Adaptive principal-value quadrature of the restricted fractional
/// Laplacian at x for a C^2 function u on (a,b), extended by zero:
///   C(s) PV int_R (u(x)-u(y)) |x-y|^{-1-2s} dy
/// written in the symmetric-difference form over r = |x-y|, with a series
/// correction below eps and the exact power-law tail beyond the interval.
inline double fractional_laplacian(const std::function<double(double)>& u,
                                   double upp_x,  // u''(x)
                                   double x, double a, double b, double s,
                                   double tol = 1e-10) {
    if (!(x > a && x < b)) throw std::invalid_argument("oracle: x outside (a,b)");
    const double R = std::max(x - a, b - x);
    const double eps = 1e-5 * R;
    const double ux = u(x);
    auto integrand = [&](double r) {
        const double yl = x - r, yr = x + r;
        const double ul = (yl > a && yl < b) ? u(yl) : 0.0;
        const double ur = (yr > a && yr < b) ? u(yr) : 0.0;
        return (2.0 * ux - ul - ur) * std::pow(r, -1.0 - 2.0 * s);
    };
    double acc = detail::integrate(integrand, eps, R, tol);
    acc += -upp_x * std::pow(eps, 2.0 - 2.0 * s) / (2.0 - 2.0 * s);  // r < eps series
    acc += 2.0 * ux * std::pow(R, -2.0 * s) / (2.0 * s);             // r > R tail
    return normalization(s) * acc;
}

/// Brute-force Gagliardo seminorm of the piecewise-constant cell extension
/// of nodal values (zero outside the covered span): double Riemann sum with
/// sub-cell midpoint sampling plus analytic one-sided exterior tails.
inline double gagliardo_bruteforce(const std::vector<double>& nodes,
                                   const std::vector<double>& vals, double h,
                                   double s1, double p, int sub = 16) {
    const double alpha = 1.0 + p * s1;
    const int n = static_cast<int>(nodes.size());
    const double lo = nodes.front() - 0.5 * h, hi = nodes.back() + 0.5 * h;
    const double dx = h / sub;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int si = 0; si < sub; ++si) {
            const double x = nodes[i] - 0.5 * h + (si + 0.5) * dx;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                for (int sj = 0; sj < sub; ++sj) {
                    const double y = nodes[j] - 0.5 * h + (sj + 0.5) * dx;
                    acc += std::pow(std::abs(vals[i] - vals[j]), p) *
                           std::pow(std::abs(x - y), -alpha) * dx * dx;
                }
            }
            // same-cell pairs contribute zero (piecewise constant)
            // exterior tails: |u(x) - 0|^p against both half-lines, doubled
            // for the (x, y) <-> (y, x) swap
            const double tail = (std::pow(hi - x, 1.0 - alpha) +
                                 std::pow(x - lo, 1.0 - alpha)) /
                                (alpha - 1.0);
            acc += 2.0 * std::pow(std::abs(vals[i]), p) * tail * dx;
        }
    }
    return std::pow(acc, 1.0 / p);
}

}  // namespace oracle

#endif
