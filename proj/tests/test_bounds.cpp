#include <cmath>

#include "doctest.h"

#include "vim/bounds.hpp"
#include "vim/oracle.hpp"

using vim::BoundInput;
using vim::GridFunction;
using vim::ScalarIvp;

TEST_CASE("error_bound: reference values") {
    // n = 0 is the initial error itself
    CHECK(vim::error_bound({5.0, 2.0, 3, 1.25, 0}) == 1.25);
    CHECK(vim::error_bound({5.0, 2.0, 3, 0.0, 7}) == 0.0);

    // scalar constant M = 2 L e^{LT} = 4 e^2 at L=2, T=1
    CHECK(vim::error_bound({2.0, 1.0, 1, 1.0, 1}) ==
          doctest::Approx(4.0 * std::exp(2.0)).epsilon(1e-12));

    // two equations: M = 3 e, bound at n=2 is M^2 T^2 / 2 = 9 e^2 / 2
    CHECK(vim::error_bound({1.0, 1.0, 2, 1.0, 2}) ==
          doctest::Approx(4.5 * std::exp(2.0)).epsilon(1e-12));

    CHECK_THROWS_AS(vim::error_bound({0.0, 1.0, 1, 1.0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(vim::error_bound({1.0, 0.0, 1, 1.0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(vim::error_bound({1.0, 1.0, 0, 1.0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(vim::error_bound({1.0, 1.0, 1, -1.0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(vim::error_bound({1.0, 1.0, 1, 1.0, -1}), std::invalid_argument);

    // overflow saturates instead of trapping
    CHECK(std::isinf(vim::error_bound({500.0, 2.0, 1, 1.0, 3})));
}

TEST_CASE("error_bound: successive ratio is MT/(n+1) and the tail vanishes") {
    const double L = 2.0, T = 1.0;
    const double M = 4.0 * std::exp(2.0);
    for (int n = 0; n < 200; ++n) {
        double r = vim::error_bound({L, T, 1, 1.0, n + 1}) / vim::error_bound({L, T, 1, 1.0, n});
        double q = M * T / (n + 1);
        CHECK(std::abs(r - q) <= 1e-12 * q);
    }
    CHECK(vim::error_bound({L, T, 1, 1.0, 200}) < 1e-10);

    // decreasing once n+1 exceeds MT
    int start = static_cast<int>(M * T) + 1;
    for (int n = start; n < start + 20; ++n) {
        CHECK(vim::error_bound({L, T, 1, 1.0, n + 1}) < vim::error_bound({L, T, 1, 1.0, n}));
    }
}

TEST_CASE("error_bound: monotone in every input") {
    BoundInput base{1.5, 0.8, 2, 0.7, 3};
    double b = vim::error_bound(base);
    CHECK(vim::error_bound({2.0, 0.8, 2, 0.7, 3}) > b);
    CHECK(vim::error_bound({1.5, 1.1, 2, 0.7, 3}) > b);
    CHECK(vim::error_bound({1.5, 0.8, 4, 0.7, 3}) > b);
    CHECK(vim::error_bound({1.5, 0.8, 2, 0.9, 3}) > b);
}

TEST_CASE("sample_lipschitz: constant and state-dependent derivatives") {
    vim::BuiltinProblem lin = vim::builtin("linear1");
    const auto& p = std::get<ScalarIvp>(lin.problem);
    GridFunction anything(vim::make_grid(0.0, 1.0, 9), 123.0);
    CHECK(vim::sample_lipschitz(p, anything, 0.0) == 2.0);
    CHECK(vim::sample_lipschitz(p, anything, 10.0) == 2.0);

    // f = x^2 has f_x = 2x: zero on the zero trajectory
    ScalarIvp quad(vim::parse_expression("x^2", 1), 0.0, 0.0, 1.0);
    CHECK(vim::sample_lipschitz(quad, GridFunction(vim::make_grid(0.0, 1.0, 9), 0.0), 0.0) ==
          0.0);

    // on the hyperbolic-tangent arc the largest |2x| is 2 tanh(1)
    vim::Grid g = vim::make_grid(0.0, 1.0, 101);
    std::vector<double> arc(101);
    for (int j = 0; j < 101; ++j) arc[static_cast<std::size_t>(j)] = std::tanh(g.node(j));
    double L = vim::sample_lipschitz(quad, GridFunction(g, arc), 0.0);
    CHECK(L == doctest::Approx(2.0 * std::tanh(1.0)).epsilon(1e-12));

    // padding widens the scan
    double Lp = vim::sample_lipschitz(quad, GridFunction(g, arc), 0.1);
    CHECK(Lp == doctest::Approx(2.0 * (std::tanh(1.0) + 0.1)).epsilon(1e-12));

    CHECK_THROWS_AS(vim::sample_lipschitz(quad, GridFunction(g, arc), -0.5),
                    std::invalid_argument);
}

TEST_CASE("sample_lipschitz: system scans every diagonal") {
    vim::SystemIvp sys({vim::parse_expression("3*x1+x2", 2), vim::parse_expression("x2*x2", 2)},
                       {0.0, 0.5}, 0.0, 1.0);
    vim::Grid g = vim::make_grid(0.0, 1.0, 5);
    std::vector<GridFunction> traj{GridFunction(g, 0.0), GridFunction(g, 0.5)};
    // diagonals are 3 and 2 x2; at x2 = 0.5 the largest magnitude is 3
    CHECK(vim::sample_lipschitz(sys, traj, 0.0) == 3.0);
    // pushing x2 to 2.1 makes the second diagonal dominate
    std::vector<GridFunction> high{GridFunction(g, 0.0), GridFunction(g, 2.1)};
    CHECK(vim::sample_lipschitz(sys, high, 0.0) == doctest::Approx(4.2).epsilon(1e-15));
}

TEST_CASE("bound validity along solver iterates, with quadrature slack") {
    struct Case {
        const char* name;
        bool sampled_L;
    };
    for (Case c : {Case{"linear1", false}, Case{"riccati1", true}}) {
        CAPTURE(c.name);
        vim::BuiltinProblem b = vim::builtin(c.name);
        const auto& p = std::get<ScalarIvp>(b.problem);
        vim::SolveReport rep = vim::vim_solve_scalar(p, vim::SolveConfig{100, 1e-5, 5}, true);
        REQUIRE(rep.converged);

        double L = c.sampled_L ? vim::sample_lipschitz(p, rep.solution, 0.1) : 2.0;
        double T = p.tf - p.t0;
        double h = rep.solution.grid.step();

        auto sup_err = [&](const GridFunction& u) {
            double m = 0.0;
            for (int j = 0; j < u.grid.n_points; ++j) {
                m = std::max(m, std::abs(u.values[static_cast<std::size_t>(j)] -
                                         b.exact(u.grid.node(j))[0]));
            }
            return m;
        };
        double e0 = sup_err(rep.iterates.front());
        for (std::size_t n = 0; n < rep.iterates.size(); ++n) {
            double observed = sup_err(rep.iterates[n]);
            double bound =
                vim::error_bound({L, T, 1, e0, static_cast<int>(n)}) + 10.0 * h * h;
            CAPTURE(n);
            CHECK(observed <= bound);
        }
    }
}
