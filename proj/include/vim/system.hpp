#pragma once

#include <span>
#include <vector>

#include "vim/scalar.hpp"

namespace vim {

/// First-order system x_k'(t) = f_k(t, x_1..x_d), x_k(t0) = x0_k for
/// k = 1..d. f_diag holds the diagonal partials df_k/dx_k, derived
/// symbolically unless overridden; only these enter the kernel of the
/// iteration — off-diagonal dependences act through the f values alone.
struct SystemIvp {
    int dimension;
    std::vector<Expr> f;
    std::vector<Expr> f_diag;
    std::vector<double> x0;
    double t0;
    double tf;

    SystemIvp(std::vector<Expr> f, std::vector<double> x0, double t0, double tf);
    SystemIvp(std::vector<Expr> f, std::vector<Expr> f_diag_override, std::vector<double> x0,
              double t0, double tf);
};

struct SystemSolveReport {
    std::vector<GridFunction> solution;
    int iterations = 0;
    bool converged = false;
    std::vector<double> residual_history;  // mixed norm of successive differences
    std::vector<std::vector<GridFunction>> iterates;  // when requested; [0] is the initial guess
};

/// One Jacobi-style sweep: every component is updated from the same previous
/// iterate. Component k runs the scalar transformed update with nodal values
/// f_k and df_k/dx_k taken along u_old.
std::vector<GridFunction> vim_step_system(const SystemIvp& problem,
                                          std::span<const GridFunction> u_old);

SystemSolveReport vim_solve_system(const SystemIvp& problem, const SolveConfig& config,
                                   bool keep_iterates = false);

}  // namespace vim
