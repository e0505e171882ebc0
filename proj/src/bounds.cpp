#include "vim/bounds.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace vim {

double error_bound(const BoundInput& input) {
    if (!(input.L > 0.0)) throw std::invalid_argument("bound: L must be > 0");
    if (!(input.T > 0.0)) throw std::invalid_argument("bound: T must be > 0");
    if (input.dimension < 1) throw std::invalid_argument("bound: dimension must be >= 1");
    if (input.e0_norm < 0.0) throw std::invalid_argument("bound: e0_norm must be >= 0");
    if (input.n < 0) throw std::invalid_argument("bound: n must be >= 0");

    if (input.n == 0 || input.e0_norm == 0.0) return input.e0_norm;
    double m = (input.dimension + 1) * input.L * std::exp(input.L * input.T);
    double log_term = input.n * std::log(m * input.T) - std::lgamma(input.n + 1.0);
    return input.e0_norm * std::exp(log_term);
}

namespace {

double scan_diagonal(const Expr& f_diag, const Grid& grid,
                     std::span<const GridFunction> trajectory, double padding) {
    const auto d = trajectory.size();
    std::vector<double> state(d);
    double m = 0.0;
    for (int j = 0; j < grid.n_points; ++j) {
        double tj = grid.node(j);
        for (std::size_t q = 0; q < d; ++q) {
            state[q] = trajectory[q].values[static_cast<std::size_t>(j)];
        }
        m = std::max(m, std::abs(eval_expression(f_diag, tj, state)));
        if (padding > 0.0) {
            for (std::size_t q = 0; q < d; ++q) {
                double base = state[q];
                for (double shift : {padding, -padding}) {
                    state[q] = base + shift;
                    m = std::max(m, std::abs(eval_expression(f_diag, tj, state)));
                }
                state[q] = base;
            }
        }
    }
    return m;
}

}  // namespace

double sample_lipschitz(const ScalarIvp& problem, const GridFunction& trajectory,
                        double padding) {
    if (padding < 0.0) throw std::invalid_argument("padding must be >= 0");
    return scan_diagonal(problem.f_x, trajectory.grid,
                         std::span<const GridFunction>(&trajectory, 1), padding);
}

double sample_lipschitz(const SystemIvp& problem, std::span<const GridFunction> trajectory,
                        double padding) {
    if (padding < 0.0) throw std::invalid_argument("padding must be >= 0");
    if (trajectory.size() != static_cast<std::size_t>(problem.dimension)) {
        throw std::invalid_argument("trajectory has " + std::to_string(trajectory.size()) +
                                    " components, problem has " +
                                    std::to_string(problem.dimension));
    }
    const Grid& grid = trajectory.front().grid;
    double m = 0.0;
    for (std::size_t k = 0; k < trajectory.size(); ++k) {
        m = std::max(m, scan_diagonal(problem.f_diag[k], grid, trajectory, padding));
    }
    return m;
}

}  // namespace vim
