#include "vim/grid.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace vim {

std::vector<double> Grid::nodes() const {
    std::vector<double> t(static_cast<std::size_t>(n_points));
    for (int j = 0; j < n_points; ++j) t[static_cast<std::size_t>(j)] = node(j);
    return t;
}

Grid make_grid(double t0, double tf, int n_points) {
    if (!(t0 < tf)) {
        throw std::invalid_argument("invalid interval: require t0 < tf, got [" +
                                    std::to_string(t0) + ", " + std::to_string(tf) + "]");
    }
    if (n_points < 2) {
        throw std::invalid_argument("grid needs at least 2 points, got " +
                                    std::to_string(n_points));
    }
    return Grid{t0, tf, n_points};
}

GridFunction::GridFunction(Grid g, std::vector<double> vals)
    : grid(g), values(std::move(vals)) {
    if (values.size() != static_cast<std::size_t>(grid.n_points)) {
        throw std::invalid_argument("grid function needs " + std::to_string(grid.n_points) +
                                    " values, got " + std::to_string(values.size()));
    }
}

GridFunction::GridFunction(Grid g, double fill)
    : grid(g), values(static_cast<std::size_t>(g.n_points), fill) {}

double GridFunction::interpolate(double t) const {
    if (t <= grid.t0) return values.front();
    if (t >= grid.tf) return values.back();
    double h = grid.step();
    int j = static_cast<int>((t - grid.t0) / h);
    if (j > grid.n_points - 2) j = grid.n_points - 2;
    double tj = grid.node(j);
    double w = (t - tj) / h;
    auto uj = static_cast<std::size_t>(j);
    return values[uj] + w * (values[uj + 1] - values[uj]);
}

double norm_inf(const GridFunction& u) {
    double m = 0.0;
    for (double v : u.values) m = std::max(m, std::abs(v));
    return m;
}

double mixed_norm(std::span<const GridFunction> us) {
    if (us.empty()) throw std::invalid_argument("mixed_norm of no components");
    const Grid& g = us.front().grid;
    for (const GridFunction& u : us) {
        if (!(u.grid == g)) throw std::invalid_argument("mixed_norm: grid mismatch");
    }
    double m = 0.0;
    for (std::size_t j = 0; j < static_cast<std::size_t>(g.n_points); ++j) {
        double s = 0.0;
        for (const GridFunction& u : us) s += std::abs(u.values[j]);
        m = std::max(m, s);
    }
    return m;
}

namespace {

void check_index(std::size_t size, int i) {
    if (i < 1 || static_cast<std::size_t>(i) >= size) {
        throw std::out_of_range("integration index " + std::to_string(i) +
                                " out of range for " + std::to_string(size) + " nodes");
    }
}

}  // namespace

double trapezoid_integral(std::span<const double> g, double h, int upto_index) {
    check_index(g.size(), upto_index);
    auto i = static_cast<std::size_t>(upto_index);
    double s = g[0] + g[i];
    for (std::size_t j = 1; j < i; ++j) s += 2.0 * g[j];
    return 0.5 * h * s;
}

double trapezoid_integral(const GridFunction& g, int upto_index) {
    return trapezoid_integral(g.values, g.grid.step(), upto_index);
}

std::vector<double> tail_integrals(std::span<const double> g, double h, int upto_index) {
    check_index(g.size(), upto_index);
    auto i = static_cast<std::size_t>(upto_index);
    std::vector<double> z(i + 1);
    z[i] = 0.0;
    for (std::size_t j = i; j-- > 0;) {
        z[j] = 0.5 * h * (g[j] + g[j + 1]) + z[j + 1];
    }
    return z;
}

std::vector<double> tail_integrals(const GridFunction& g, int upto_index) {
    return tail_integrals(g.values, g.grid.step(), upto_index);
}

}  // namespace vim
