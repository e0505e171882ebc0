#include "vim/oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace vim {

int BuiltinProblem::dimension() const {
    return std::holds_alternative<ScalarIvp>(problem)
               ? 1
               : std::get<SystemIvp>(problem).dimension;
}

SystemIvp BuiltinProblem::as_system() const {
    if (const auto* sys = std::get_if<SystemIvp>(&problem)) return *sys;
    const auto& s = std::get<ScalarIvp>(problem);
    return SystemIvp({s.f}, {s.f_x}, {s.x0}, s.t0, s.tf);
}

std::vector<GridFunction> rk4_solve(const SystemIvp& problem, int n_points) {
    Grid grid = make_grid(problem.t0, problem.tf, n_points);
    const auto d = static_cast<std::size_t>(problem.dimension);
    const double h = grid.step();

    std::vector<std::vector<double>> values(d, std::vector<double>(
                                                   static_cast<std::size_t>(n_points)));
    std::vector<double> x = problem.x0;
    std::vector<double> stage(d), k1(d), k2(d), k3(d), k4(d);
    for (std::size_t k = 0; k < d; ++k) values[k][0] = x[k];

    auto deriv = [&](double t, const std::vector<double>& state, std::vector<double>& out) {
        for (std::size_t k = 0; k < d; ++k) out[k] = eval_expression(problem.f[k], t, state);
    };

    for (int j = 0; j + 1 < n_points; ++j) {
        double tj = grid.node(j);
        deriv(tj, x, k1);
        for (std::size_t k = 0; k < d; ++k) stage[k] = x[k] + 0.5 * h * k1[k];
        deriv(tj + 0.5 * h, stage, k2);
        for (std::size_t k = 0; k < d; ++k) stage[k] = x[k] + 0.5 * h * k2[k];
        deriv(tj + 0.5 * h, stage, k3);
        for (std::size_t k = 0; k < d; ++k) stage[k] = x[k] + h * k3[k];
        deriv(tj + h, stage, k4);
        for (std::size_t k = 0; k < d; ++k) {
            x[k] += h / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
            if (!std::isfinite(x[k])) {
                throw SolveError("non-finite state in reference solver at node " +
                                 std::to_string(j + 1));
            }
            values[k][static_cast<std::size_t>(j) + 1] = x[k];
        }
    }

    std::vector<GridFunction> out;
    out.reserve(d);
    for (std::size_t k = 0; k < d; ++k) out.emplace_back(grid, std::move(values[k]));
    return out;
}

GridFunction rk4_solve(const ScalarIvp& problem, int n_points) {
    SystemIvp sys({problem.f}, {problem.f_x}, {problem.x0}, problem.t0, problem.tf);
    return std::move(rk4_solve(sys, n_points).front());
}

BuiltinProblem builtin(std::string_view name) {
    if (name == "linear1") {
        return BuiltinProblem{
            "linear1",
            ScalarIvp(parse_expression("2*x+t", 1), 0.0, 0.0, 1.0),
            [](double t) {
                return std::vector<double>{0.25 * (std::exp(2.0 * t) - 2.0 * t - 1.0)};
            },
            "x' = 2x + t, x(0) = 0; exact x(t) = (e^{2t} - 2t - 1)/4",
        };
    }
    if (name == "riccati1") {
        // Stated with the closed form (1 - e^{-2t})/(1 + e^{-2t}); that
        // function solves x' = 1 - x^2, x(0) = 0.
        return BuiltinProblem{
            "riccati1",
            ScalarIvp(parse_expression("1-x^2", 1), 0.0, 0.0, 1.0),
            [](double t) {
                double q = std::exp(-2.0 * t);
                return std::vector<double>{(1.0 - q) / (1.0 + q)};
            },
            "x' = 1 - x^2, x(0) = 0; exact x(t) = (1 - e^{-2t})/(1 + e^{-2t})",
        };
    }
    if (name == "harmonic") {
        return BuiltinProblem{
            "harmonic",
            SystemIvp({parse_expression("x2", 2), parse_expression("-x1", 2)}, {0.0, 1.0}, 0.0,
                      1.0),
            [](double t) { return std::vector<double>{std::sin(t), std::cos(t)}; },
            "x1' = x2, x2' = -x1, x(0) = (0, 1); exact (sin t, cos t)",
        };
    }
    throw std::invalid_argument("unknown builtin problem '" + std::string(name) +
                                "'; known: linear1, riccati1, harmonic");
}

std::vector<std::string> builtin_names() { return {"linear1", "riccati1", "harmonic"}; }

}  // namespace vim
