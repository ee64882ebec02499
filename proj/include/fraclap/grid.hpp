#ifndef FRACLAP_GRID_HPP
#define FRACLAP_GRID_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

namespace fraclap {

/// Uniform mesh on a bounded interval (a,b). Unknowns live at the
/// n_cells-1 interior cell interfaces; the exterior-zero condition is
/// handled by the operator, not by ghost nodes.
struct Grid {
    double a = 0.0;
    double b = 0.0;
    int n_cells = 0;
    double h = 0.0;
    std::vector<double> nodes;  // x_i = a + i*h, i = 1..n_cells-1
    std::vector<double> delta;  // distance to the nearer endpoint

    int n_nodes() const { return static_cast<int>(nodes.size()); }
    double length() const { return b - a; }
};

inline Grid build_grid(double a, double b, int n_cells) {
    if (!(b > a)) throw std::invalid_argument("build_grid: requires b > a");
    if (n_cells < 4) throw std::invalid_argument("build_grid: requires n_cells >= 4");
    Grid g;
    g.a = a;
    g.b = b;
    g.n_cells = n_cells;
    g.h = (b - a) / n_cells;
    g.nodes.resize(n_cells - 1);
    g.delta.resize(n_cells - 1);
    for (int i = 1; i < n_cells; ++i) {
        const double x = a + i * g.h;
        g.nodes[i - 1] = x;
        g.delta[i - 1] = std::min(x - a, b - x);
    }
    return g;
}

/// Node indices at distance >= margin from the boundary.
struct CompactSubset {
    double margin = 0.0;
    std::vector<int> indices;
};

inline CompactSubset compact_subset(const Grid& grid, double margin) {
    if (!(margin > 0.0 && margin < 0.5 * grid.length()))
        throw std::invalid_argument("compact_subset: margin must lie in (0, (b-a)/2)");
    CompactSubset k;
    k.margin = margin;
    for (int i = 0; i < grid.n_nodes(); ++i)
        if (grid.delta[i] >= margin) k.indices.push_back(i);
    return k;
}

}  // namespace fraclap

#endif
