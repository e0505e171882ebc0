#include "vim/scalar.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace vim {

namespace {

void check_dimension(const Expr& e, const char* what) {
    if (max_state_index(e) > 1) {
        throw std::invalid_argument(std::string(what) +
                                    " of a scalar problem references x2 or higher");
    }
}

void check_interval(double t0, double tf) {
    if (!(t0 < tf)) throw std::invalid_argument("invalid interval: require t0 < tf");
}

}  // namespace

ScalarIvp::ScalarIvp(Expr f_in, double x0_in, double t0_in, double tf_in)
    : f(std::move(f_in)), f_x(differentiate(f, 1)), x0(x0_in), t0(t0_in), tf(tf_in) {
    check_dimension(f, "right-hand side");
    check_interval(t0, tf);
}

ScalarIvp::ScalarIvp(Expr f_in, Expr f_x_override, double x0_in, double t0_in, double tf_in)
    : f(std::move(f_in)), f_x(std::move(f_x_override)), x0(x0_in), t0(t0_in), tf(tf_in) {
    check_dimension(f, "right-hand side");
    check_dimension(f_x, "derivative override");
    check_interval(t0, tf);
}

void validate(const SolveConfig& config) {
    if (config.n_points < 2) throw std::invalid_argument("config: n_points must be >= 2");
    if (!(config.tol > 0.0)) throw std::invalid_argument("config: tol must be > 0");
    if (config.max_iters < 1) throw std::invalid_argument("config: max_iters must be >= 1");
}

double lambda_factor(double z) { return std::exp(z); }

std::vector<double> transformed_sweep(std::span<const double> f_vals,
                                      std::span<const double> df_vals,
                                      std::span<const double> u_old, double x0, double h) {
    const std::size_t n = u_old.size();
    std::vector<double> u_new(n, x0);
    std::vector<double> w(n);
    for (std::size_t i = 1; i < n; ++i) {
        std::vector<double> z = tail_integrals(df_vals, h, static_cast<int>(i));
        for (std::size_t j = 0; j <= i; ++j) {
            w[j] = (f_vals[j] - df_vals[j] * u_old[j]) * lambda_factor(z[j]);
        }
        u_new[i] = trapezoid_integral(std::span<const double>(w.data(), i + 1), h,
                                      static_cast<int>(i)) +
                   lambda_factor(z[0]) * x0;
        if (!std::isfinite(u_new[i])) {
            throw SolveError("non-finite value produced at node " + std::to_string(i));
        }
    }
    return u_new;
}

GridFunction vim_step_scalar(const ScalarIvp& problem, const GridFunction& u_old) {
    const Grid& grid = u_old.grid;
    if (grid.t0 != problem.t0 || grid.tf != problem.tf) {
        throw std::invalid_argument("iterate grid does not span the problem interval");
    }
    if (u_old.values.front() != problem.x0) {
        throw std::invalid_argument("iterate does not satisfy the initial condition");
    }
    const auto n = static_cast<std::size_t>(grid.n_points);
    std::vector<double> f0(n), df0(n);
    for (std::size_t j = 0; j < n; ++j) {
        double tj = grid.node(static_cast<int>(j));
        double xj = u_old.values[j];
        f0[j] = eval_expression(problem.f, tj, std::span<const double>(&xj, 1));
        df0[j] = eval_expression(problem.f_x, tj, std::span<const double>(&xj, 1));
    }
    return GridFunction(grid,
                        transformed_sweep(f0, df0, u_old.values, problem.x0, grid.step()));
}

namespace {

double sup_diff(const GridFunction& a, const GridFunction& b) {
    double m = 0.0;
    for (std::size_t j = 0; j < a.values.size(); ++j) {
        m = std::max(m, std::abs(a.values[j] - b.values[j]));
    }
    return m;
}

}  // namespace

SolveReport vim_solve_scalar(const ScalarIvp& problem, const SolveConfig& config,
                             bool keep_iterates) {
    validate(config);
    Grid grid = make_grid(problem.t0, problem.tf, config.n_points);
    GridFunction u_old(grid, problem.x0);

    SolveReport report{GridFunction(grid, problem.x0), 0, false, {}, {}};
    if (keep_iterates) report.iterates.push_back(u_old);

    double nrm = 0.0;
    int iter = 0;
    while (true) {
        ++iter;
        GridFunction u_new = [&] {
            try {
                return vim_step_scalar(problem, u_old);
            } catch (const SolveError& e) {
                throw SolveError(std::string(e.what()) + " in iteration " + std::to_string(iter));
            }
        }();
        nrm = sup_diff(u_new, u_old);
        report.residual_history.push_back(nrm);
        u_old = std::move(u_new);
        if (keep_iterates) report.iterates.push_back(u_old);
        if (nrm < config.tol || iter >= config.max_iters) break;
    }
    report.solution = u_old;
    report.iterations = iter;
    report.converged = nrm < config.tol;
    return report;
}

}  // namespace vim
