#include "vim/system.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace vim {

namespace {

void check_system(const std::vector<Expr>& f, const std::vector<Expr>& f_diag,
                  const std::vector<double>& x0, double t0, double tf) {
    const auto d = f.size();
    if (d < 1) throw std::invalid_argument("system needs at least one equation");
    if (f_diag.size() != d || x0.size() != d) {
        throw std::invalid_argument("system sizes disagree: " + std::to_string(d) +
                                    " equations, " + std::to_string(f_diag.size()) +
                                    " derivatives, " + std::to_string(x0.size()) +
                                    " initial values");
    }
    for (std::size_t k = 0; k < d; ++k) {
        if (max_state_index(f[k]) > static_cast<int>(d) ||
            max_state_index(f_diag[k]) > static_cast<int>(d)) {
            throw std::invalid_argument("equation " + std::to_string(k + 1) +
                                        " references a state variable beyond x" +
                                        std::to_string(d));
        }
    }
    if (!(t0 < tf)) throw std::invalid_argument("invalid interval: require t0 < tf");
}

std::vector<Expr> diagonal_derivatives(const std::vector<Expr>& f) {
    std::vector<Expr> out;
    out.reserve(f.size());
    for (std::size_t k = 0; k < f.size(); ++k) {
        out.push_back(differentiate(f[k], static_cast<int>(k) + 1));
    }
    return out;
}

}  // namespace

SystemIvp::SystemIvp(std::vector<Expr> f_in, std::vector<double> x0_in, double t0_in,
                     double tf_in)
    : dimension(static_cast<int>(f_in.size())),
      f(std::move(f_in)),
      f_diag(diagonal_derivatives(f)),
      x0(std::move(x0_in)),
      t0(t0_in),
      tf(tf_in) {
    check_system(f, f_diag, x0, t0, tf);
}

SystemIvp::SystemIvp(std::vector<Expr> f_in, std::vector<Expr> f_diag_override,
                     std::vector<double> x0_in, double t0_in, double tf_in)
    : dimension(static_cast<int>(f_in.size())),
      f(std::move(f_in)),
      f_diag(std::move(f_diag_override)),
      x0(std::move(x0_in)),
      t0(t0_in),
      tf(tf_in) {
    check_system(f, f_diag, x0, t0, tf);
}

std::vector<GridFunction> vim_step_system(const SystemIvp& problem,
                                          std::span<const GridFunction> u_old) {
    const auto d = static_cast<std::size_t>(problem.dimension);
    if (u_old.size() != d) {
        throw std::invalid_argument("iterate has " + std::to_string(u_old.size()) +
                                    " components, problem has " + std::to_string(d));
    }
    const Grid& grid = u_old.front().grid;
    if (grid.t0 != problem.t0 || grid.tf != problem.tf) {
        throw std::invalid_argument("iterate grid does not span the problem interval");
    }
    for (std::size_t k = 0; k < d; ++k) {
        if (!(u_old[k].grid == grid)) {
            throw std::invalid_argument("iterate components live on different grids");
        }
        if (u_old[k].values.front() != problem.x0[k]) {
            throw std::invalid_argument("component " + std::to_string(k + 1) +
                                        " does not satisfy its initial condition");
        }
    }

    const auto n = static_cast<std::size_t>(grid.n_points);
    std::vector<double> state(d);
    std::vector<double> fk(n), gk(n);
    std::vector<GridFunction> u_new;
    u_new.reserve(d);
    for (std::size_t k = 0; k < d; ++k) {
        for (std::size_t j = 0; j < n; ++j) {
            double tj = grid.node(static_cast<int>(j));
            for (std::size_t q = 0; q < d; ++q) state[q] = u_old[q].values[j];
            fk[j] = eval_expression(problem.f[k], tj, state);
            gk[j] = eval_expression(problem.f_diag[k], tj, state);
        }
        try {
            u_new.emplace_back(grid, transformed_sweep(fk, gk, u_old[k].values, problem.x0[k],
                                                       grid.step()));
        } catch (const SolveError& e) {
            throw SolveError(std::string(e.what()) + " in component " + std::to_string(k + 1));
        }
    }
    return u_new;
}

namespace {

double mixed_diff(std::span<const GridFunction> a, std::span<const GridFunction> b) {
    double m = 0.0;
    for (std::size_t j = 0; j < a.front().values.size(); ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) {
            s += std::abs(a[k].values[j] - b[k].values[j]);
        }
        m = std::max(m, s);
    }
    return m;
}

}  // namespace

SystemSolveReport vim_solve_system(const SystemIvp& problem, const SolveConfig& config,
                                   bool keep_iterates) {
    validate(config);
    Grid grid = make_grid(problem.t0, problem.tf, config.n_points);
    const auto d = static_cast<std::size_t>(problem.dimension);

    std::vector<GridFunction> u_old;
    u_old.reserve(d);
    for (std::size_t k = 0; k < d; ++k) u_old.emplace_back(grid, problem.x0[k]);

    SystemSolveReport report;
    if (keep_iterates) report.iterates.push_back(u_old);

    double nrm = 0.0;
    int iter = 0;
    while (true) {
        ++iter;
        std::vector<GridFunction> u_new = [&] {
            try {
                return vim_step_system(problem, u_old);
            } catch (const SolveError& e) {
                throw SolveError(std::string(e.what()) + " in iteration " + std::to_string(iter));
            }
        }();
        nrm = mixed_diff(u_new, u_old);
        report.residual_history.push_back(nrm);
        u_old = std::move(u_new);
        if (keep_iterates) report.iterates.push_back(u_old);
        if (nrm < config.tol || iter >= config.max_iters) break;
    }
    report.solution = std::move(u_old);
    report.iterations = iter;
    report.converged = nrm < config.tol;
    return report;
}

}  // namespace vim
