#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "vim/scalar.hpp"
#include "vim/system.hpp"

namespace vim {

/// A registered test problem with a closed-form solution, used to validate
/// the iteration independently.
struct BuiltinProblem {
    std::string name;
    std::variant<ScalarIvp, SystemIvp> problem;
    std::function<std::vector<double>(double)> exact;  // t -> component values
    std::string source;

    int dimension() const;
    SystemIvp as_system() const;
};

/// Classical fixed-step fourth-order Runge-Kutta over an equidistant grid.
/// Independent of the fixed-point iteration; at fine grids its error is
/// negligible against the iteration errors being measured.
std::vector<GridFunction> rk4_solve(const SystemIvp& problem, int n_points);
GridFunction rk4_solve(const ScalarIvp& problem, int n_points);

/// Registered names: "linear1", "riccati1", "harmonic".
BuiltinProblem builtin(std::string_view name);
std::vector<std::string> builtin_names();

}  // namespace vim
