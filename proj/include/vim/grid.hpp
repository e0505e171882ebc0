#pragma once

#include <span>
#include <vector>

namespace vim {

/// Equidistant grid of n_points nodes on [t0, tf]. The last node is assigned
/// tf exactly instead of being accumulated, matching linspace semantics.
struct Grid {
    double t0;
    double tf;
    int n_points;

    double step() const { return (tf - t0) / (n_points - 1); }
    double length() const { return tf - t0; }
    double node(int j) const { return j == n_points - 1 ? tf : t0 + j * step(); }
    std::vector<double> nodes() const;

    friend bool operator==(const Grid&, const Grid&) = default;
};

Grid make_grid(double t0, double tf, int n_points);

/// Nodal values on a grid, read between nodes as a first-order spline
/// (piecewise-linear interpolant).
struct GridFunction {
    Grid grid;
    std::vector<double> values;

    GridFunction(Grid g, std::vector<double> vals);
    GridFunction(Grid g, double fill);

    double interpolate(double t) const;
};

/// max_j |u(t_j)|
double norm_inf(const GridFunction& u);

/// max over nodes of the 1-norm across components: max_j sum_k |u_k(t_j)|.
/// All functions must live on the same grid.
double mixed_norm(std::span<const GridFunction> us);

/// Composite trapezoid value of integral from t_0 to t_i:
/// (h/2) * (g_0 + g_i + 2 * sum_{j=1}^{i-1} g_j), summed in exactly that
/// order. Requires 1 <= i <= N-1. The span overload takes the leading nodal
/// values of an integrand with spacing h (g.size() must exceed i).
double trapezoid_integral(std::span<const double> g, double h, int upto_index);
double trapezoid_integral(const GridFunction& g, int upto_index);

/// Backward trapezoid tails z_j ~ integral from t_j to t_i of g, computed by
/// the recurrence z_i = 0, z_j = 0.5*h*(g_j + g_{j+1}) + z_{j+1} for
/// j = i-1 .. 0. Returns z of length i+1. The recurrence order is part of
/// the contract; it fixes the bit pattern of the iteration scheme.
std::vector<double> tail_integrals(std::span<const double> g, double h, int upto_index);
std::vector<double> tail_integrals(const GridFunction& g, int upto_index);

}  // namespace vim
