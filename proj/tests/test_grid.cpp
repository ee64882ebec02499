#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fraclap/grid.hpp"

using namespace fraclap;

TEST_CASE("uniform grid geometry") {
    const Grid g = build_grid(-1.0, 1.0, 8);
    CHECK(g.h == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(g.n_nodes() == 7);
    CHECK(g.nodes.front() == doctest::Approx(-0.75).epsilon(1e-15));
    CHECK(g.nodes.back() == doctest::Approx(0.75).epsilon(1e-15));
    for (int i = 0; i < g.n_nodes(); ++i) {
        CHECK(g.nodes[i] == doctest::Approx(-1.0 + (i + 1) * 0.25).epsilon(1e-14));
        CHECK(g.delta[i] ==
              doctest::Approx(std::min(g.nodes[i] + 1.0, 1.0 - g.nodes[i])).epsilon(1e-14));
        CHECK(g.delta[i] > 0.0);
    }
}

TEST_CASE("grid on a shifted interval") {
    const Grid g = build_grid(2.0, 5.0, 6);
    CHECK(g.h == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(g.length() == doctest::Approx(3.0));
    CHECK(g.n_nodes() == 5);
    CHECK(g.nodes[2] == doctest::Approx(3.5));
    CHECK(g.delta[0] == doctest::Approx(0.5));
    CHECK(g.delta[4] == doctest::Approx(0.5));
}

TEST_CASE("grid rejects degenerate input") {
    CHECK_THROWS_AS(build_grid(1.0, 1.0, 8), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(1.0, 0.0, 8), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(0.0, 1.0, 3), std::invalid_argument);
}

TEST_CASE("compact subset selects interior nodes symmetrically") {
    const Grid g = build_grid(-1.0, 1.0, 16);
    const CompactSubset k = compact_subset(g, 0.5);
    CHECK(!k.indices.empty());
    for (int idx : k.indices) CHECK(g.delta[idx] >= 0.5);
    // symmetry of the index set
    for (size_t j = 0; j < k.indices.size(); ++j)
        CHECK(k.indices[j] + k.indices[k.indices.size() - 1 - j] == g.n_nodes() - 1);
    CHECK_THROWS_AS(compact_subset(g, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(compact_subset(g, 1.0), std::invalid_argument);
}
