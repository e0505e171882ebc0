#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "vim/expr.hpp"
#include "vim/grid.hpp"

namespace vim {

/// Raised when an iteration produces a non-finite value (the exponential
/// kernel can overflow for stiff right-hand sides). The message names the
/// node and, once known, the iteration.
class SolveError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Scalar initial value problem x'(t) = f(t, x(t)), x(t0) = x0.
/// f_x is the partial derivative of f in x; it is derived symbolically
/// unless an override is supplied.
struct ScalarIvp {
    Expr f;
    Expr f_x;
    double x0;
    double t0;
    double tf;

    ScalarIvp(Expr f, double x0, double t0, double tf);
    ScalarIvp(Expr f, Expr f_x_override, double x0, double t0, double tf);
};

struct SolveConfig {
    int n_points = 100;
    double tol = 1e-5;
    int max_iters = 5;
};

struct SolveReport {
    GridFunction solution;  // last iterate
    int iterations = 0;
    bool converged = false;
    std::vector<double> residual_history;  // sup-norm of successive differences
    std::vector<GridFunction> iterates;    // filled when requested; [0] is the initial guess
};

/// Kernel weight e^z applied to the weighted residual.
double lambda_factor(double z);

/// Core update of one fixed-point sweep on nodal arrays with spacing h:
/// keeps node 0 at x0 and sets, for every i >= 1,
///   u_new_i = trapezoid( (f - df*u_old) * e^z, i ) + e^{z_0} * x0,
/// where z = tail_integrals(df, i). f_vals and df_vals are the nodal values
/// of the right-hand side and of its partial derivative along u_old.
std::vector<double> transformed_sweep(std::span<const double> f_vals,
                                      std::span<const double> df_vals,
                                      std::span<const double> u_old, double x0, double h);

/// One iteration of the transformed recurrence. u_old must satisfy
/// u_old(t0) = x0 and live on a grid spanning [t0, tf].
GridFunction vim_step_scalar(const ScalarIvp& problem, const GridFunction& u_old);

/// Iterates vim_step_scalar from the constant initial guess u_0 = x0 until
/// the sup-norm of successive iterates drops below tol (converged) or
/// max_iters steps were taken. Non-convergence is reported through the
/// flag, not as an error.
SolveReport vim_solve_scalar(const ScalarIvp& problem, const SolveConfig& config,
                             bool keep_iterates = false);

void validate(const SolveConfig& config);

}  // namespace vim
