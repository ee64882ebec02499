#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "fraclap/fractional_operator.hpp"
#include "fraclap/report.hpp"
#include "oracles.hpp"

using namespace fraclap;

TEST_CASE("normalization constant against frozen values and independent gamma") {
    // frozen from an independent high-precision evaluation
    CHECK(normalization_constant(0.25) == doctest::Approx(0.19947114020071634).epsilon(1e-14));
    CHECK(normalization_constant(0.5) == doctest::Approx(0.31830988618379067).epsilon(1e-14));
    CHECK(normalization_constant(0.1) == doctest::Approx(0.090313982871455613).epsilon(1e-14));
    CHECK(normalization_constant(0.4) == doctest::Approx(0.28195845299999038).epsilon(1e-14));
    for (double s : {0.05, 0.15, 0.3, 0.45, 0.6, 0.75, 0.9})
        CHECK(normalization_constant(s) == doctest::Approx(oracle::normalization(s)).epsilon(1e-11));
    CHECK_THROWS_AS(normalization_constant(0.0), std::invalid_argument);
    CHECK_THROWS_AS(normalization_constant(1.0), std::invalid_argument);
}

TEST_CASE("getoor constant against frozen values") {
    CHECK(getoor_constant(0.1) == doctest::Approx(0.91816874239976061).epsilon(1e-13));
    CHECK(getoor_constant(0.25) == doctest::Approx(0.88622692545275801).epsilon(1e-13));
    CHECK(getoor_constant(0.4) == doctest::Approx(0.9313837709802427).epsilon(1e-13));
    for (double s : {0.1, 0.25, 0.4})
        CHECK(getoor_constant(s) == doctest::Approx(oracle::getoor_constant(s)).epsilon(1e-11));
}

TEST_CASE("tail weight formula and domain") {
    const Grid g = build_grid(-1.0, 1.0, 8);
    const double s = 0.25;
    CHECK(tail_weight(0.0, g, s) ==
          doctest::Approx(2.0 * std::pow(1.0, -0.5) / 0.5).epsilon(1e-14));
    CHECK(tail_weight(0.5, g, s) ==
          doctest::Approx((std::pow(1.5, -0.5) + std::pow(0.5, -0.5)) / 0.5).epsilon(1e-14));
    CHECK_THROWS_AS(tail_weight(-1.0, g, s), std::invalid_argument);
    CHECK_THROWS_AS(tail_weight(1.5, g, s), std::invalid_argument);
}

TEST_CASE("constant function reproduces the exterior tail exactly") {
    for (double s : {0.1, 0.25, 0.4, 0.6, 0.75}) {
        for (int nc : {16, 64}) {
            const Grid g = build_grid(-1.0, 1.0, nc);
            const OperatorMatrix op = assemble_operator(g, s);
            const Eigen::VectorXd lu =
                apply(op, Eigen::VectorXd::Ones(g.n_nodes()));
            CHECK((lu - op.tail).cwiseAbs().maxCoeff() < 1e-12 * op.tail.maxCoeff());
        }
    }
}

TEST_CASE("structure: symmetry, M-matrix signs, diagonal dominance") {
    for (double s : {0.1, 0.25, 0.4, 0.5, 0.75}) {
        for (int nc : {16, 64}) {
            for (auto [a, b] : {std::pair{-1.0, 1.0}, std::pair{0.0, 3.0}}) {
                const Grid g = build_grid(a, b, nc);
                const OperatorMatrix op = assemble_operator(g, s);
                const int n = op.size();
                CHECK((op.weights - op.weights.transpose()).cwiseAbs().maxCoeff() <
                      1e-12 * op.weights.cwiseAbs().maxCoeff());
                for (int i = 0; i < n; ++i) {
                    CHECK(op.weights(i, i) > 0.0);
                    double offsum = 0.0;
                    for (int j = 0; j < n; ++j)
                        if (j != i) {
                            CHECK(op.weights(i, j) <= 0.0);
                            offsum += std::abs(op.weights(i, j));
                        }
                    CHECK(op.weights(i, i) > offsum);  // row sum = tail > 0
                }
                CHECK(op.outside_paper_regime == (s >= 0.5));
            }
        }
    }
}

TEST_CASE("discrete maximum principle on random nonnegative data") {
    const Grid g = build_grid(-1.0, 1.0, 48);
    const OperatorMatrix op = assemble_operator(g, 0.25);
    Eigen::LDLT<Eigen::MatrixXd> solver(op.weights);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::VectorXd rhs(op.size());
        for (int i = 0; i < op.size(); ++i) rhs[i] = unif(rng);
        const Eigen::VectorXd u = solver.solve(rhs);
        CHECK(u.minCoeff() >= -1e-12);
    }
}

TEST_CASE("smooth-function consistency against adaptive PV quadrature") {
    // u = (1-x^2)^3 vanishes to high order at the boundary, so the nodal
    // interpolant converges; check interior nodes on two meshes.
    auto u = [](double x) { return std::pow(1.0 - x * x, 3); };
    auto upp = [](double x) {
        return -6.0 * (1.0 - x * x) * (1.0 - 5.0 * x * x);
    };
    const double s = 0.3;
    double prev_err = 0.0;
    for (int nc : {64, 128}) {
        const Grid g = build_grid(-1.0, 1.0, nc);
        const OperatorMatrix op = assemble_operator(g, s);
        Eigen::VectorXd v(g.n_nodes());
        for (int i = 0; i < g.n_nodes(); ++i) v[i] = u(g.nodes[i]);
        const Eigen::VectorXd lu = apply(op, v);
        double err = 0.0;
        for (int i = g.n_nodes() / 4; i <= 3 * g.n_nodes() / 4; i += g.n_nodes() / 16) {
            const double exact =
                oracle::fractional_laplacian(u, upp(g.nodes[i]), g.nodes[i], -1.0, 1.0, s);
            err = std::max(err, std::abs(lu[i] - exact));
        }
        CHECK(err < 0.02);
        if (prev_err > 0.0) CHECK(err < prev_err);
        prev_err = err;
    }
}

TEST_CASE("getoor profile deviation small and refining") {
    for (double s : {0.1, 0.25, 0.4}) {
        const Grid g1 = build_grid(-1.0, 1.0, 64);
        const Grid g2 = build_grid(-1.0, 1.0, 128);
        const double d1 = getoor_deviation(assemble_operator(g1, s), g1, s);
        const double d2 = getoor_deviation(assemble_operator(g2, s), g2, s);
        CHECK(d1 < 0.05);
        CHECK(d2 < d1);
    }
}

TEST_CASE("bilinear form is symmetric and positive") {
    const Grid g = build_grid(-1.0, 1.0, 32);
    const OperatorMatrix op = assemble_operator(g, 0.25);
    std::mt19937 rng(11);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXd u(op.size()), v(op.size());
        for (int i = 0; i < op.size(); ++i) {
            u[i] = gauss(rng);
            v[i] = gauss(rng);
        }
        CHECK(bilinear_form(op, u, v) ==
              doctest::Approx(bilinear_form(op, v, u)).epsilon(1e-10));
        CHECK(bilinear_form(op, u, u) > 0.0);
    }
}

TEST_CASE("principal eigenpair: positive, residual small, Rayleigh bound") {
    const Grid g = build_grid(-1.0, 1.0, 64);
    const OperatorMatrix op = assemble_operator(g, 0.25);
    const SpectralEstimate est = smallest_eigenvalue(op, 1e-10);
    CHECK(est.lambda1 > 0.0);
    CHECK(est.residual <= 1e-10);
    CHECK(est.eigvec.minCoeff() > 0.0);
    CHECK(est.eigvec.maxCoeff() == doctest::Approx(1.0).epsilon(1e-12));
    // independent check against Eigen's dense symmetric solver
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.weights);
    CHECK(est.lambda1 == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-9));
    // Rayleigh bound on random vectors
    std::mt19937 rng(3);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::VectorXd u(op.size());
        for (int i = 0; i < op.size(); ++i) u[i] = gauss(rng);
        CHECK(est.lambda1 * op.h * u.squaredNorm() <= bilinear_form(op, u, u) + 1e-10);
    }
}

TEST_CASE("operator input validation") {
    const Grid g = build_grid(-1.0, 1.0, 8);
    CHECK_THROWS_AS(assemble_operator(g, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(assemble_operator(g, 1.0), std::invalid_argument);
    const OperatorMatrix op = assemble_operator(g, 0.25);
    CHECK_THROWS_AS(apply(op, Eigen::VectorXd::Ones(3)), std::invalid_argument);
}
