#include <cmath>

#include "doctest.h"

#include "vim/oracle.hpp"

using vim::GridFunction;
using vim::ScalarIvp;
using vim::SystemIvp;

TEST_CASE("rk4: exponential growth to machine accuracy") {
    ScalarIvp p(vim::parse_expression("x", 1), 1.0, 0.0, 1.0);
    GridFunction u = vim::rk4_solve(p, 1001);
    CHECK(std::abs(u.values.back() - std::exp(1.0)) <= 1e-9);
}

TEST_CASE("rk4: harmonic oscillator lands on (sin 1, cos 1)") {
    SystemIvp sys = std::get<SystemIvp>(vim::builtin("harmonic").problem);
    std::vector<GridFunction> u = vim::rk4_solve(sys, 1001);
    CHECK(std::abs(u[0].values.back() - std::sin(1.0)) <= 1e-9);
    CHECK(std::abs(u[1].values.back() - std::cos(1.0)) <= 1e-9);
}

TEST_CASE("rk4: zero field stays put exactly") {
    ScalarIvp p(vim::parse_expression("0", 1), 2.75, 0.0, 1.0);
    GridFunction u = vim::rk4_solve(p, 11);
    for (double v : u.values) CHECK(v == 2.75);
}

TEST_CASE("rk4: non-finite state aborts") {
    ScalarIvp p(vim::parse_expression("x^2", 1), 1.0, 0.0, 2.0);  // blows up at t = 1
    CHECK_THROWS_AS(vim::rk4_solve(p, 2001), vim::SolveError);
}

TEST_CASE("rk4: fourth-order decay on the linear builtin") {
    vim::BuiltinProblem b = vim::builtin("linear1");
    const auto& p = std::get<ScalarIvp>(b.problem);
    double prev = 0.0;
    for (int n : {11, 21, 41, 81}) {
        GridFunction u = vim::rk4_solve(p, n);
        double err = 0.0;
        for (int j = 0; j < n; ++j) {
            err = std::max(err, std::abs(u.values[static_cast<std::size_t>(j)] -
                                         b.exact(u.grid.node(j))[0]));
        }
        if (prev != 0.0) {
            double ratio = prev / err;
            CHECK(ratio >= 16.0 * 0.7);
            CHECK(ratio <= 16.0 * 1.3);
        }
        prev = err;
    }
}

TEST_CASE("builtin registry") {
    CHECK(vim::builtin_names() == std::vector<std::string>{"linear1", "riccati1", "harmonic"});
    CHECK(vim::builtin("linear1").dimension() == 1);
    CHECK(vim::builtin("harmonic").dimension() == 2);
    CHECK_THROWS_AS(vim::builtin("nosuch"), std::invalid_argument);

    vim::BuiltinProblem lin = vim::builtin("linear1");
    const auto& p = std::get<ScalarIvp>(lin.problem);
    CHECK(p.x0 == 0.0);
    CHECK(p.t0 == 0.0);
    CHECK(p.tf == 1.0);
    CHECK(p.f == vim::parse_expression("2*x+t", 1));
    CHECK(lin.exact(1.0)[0] == doctest::Approx(0.25 * (std::exp(2.0) - 3.0)).epsilon(1e-15));
    CHECK(vim::builtin("riccati1").exact(1.0)[0] ==
          doctest::Approx(std::tanh(1.0)).epsilon(1e-15));
}

TEST_CASE("builtin exact curves satisfy their equations (finite differences)") {
    const double delta = 1e-5;
    for (const std::string& name : vim::builtin_names()) {
        CAPTURE(name);
        vim::BuiltinProblem b = vim::builtin(name);
        SystemIvp sys = b.as_system();
        double worst = 0.0;
        const int n = 10000;
        for (int j = 1; j < n; ++j) {
            double t = sys.t0 + delta + (static_cast<double>(j) / n) * (sys.tf - sys.t0 - 2 * delta);
            std::vector<double> mid = b.exact(t);
            std::vector<double> hi = b.exact(t + delta);
            std::vector<double> lo = b.exact(t - delta);
            for (int k = 0; k < sys.dimension; ++k) {
                double slope = (hi[static_cast<std::size_t>(k)] -
                                lo[static_cast<std::size_t>(k)]) /
                               (2.0 * delta);
                double rhs = vim::eval_expression(sys.f[static_cast<std::size_t>(k)], t, mid);
                worst = std::max(worst, std::abs(slope - rhs) / (1.0 + std::abs(rhs)));
            }
        }
        CHECK(worst <= 1e-6);
    }
}

TEST_CASE("builtin initial values match the exact curves at t0") {
    for (const std::string& name : vim::builtin_names()) {
        vim::BuiltinProblem b = vim::builtin(name);
        SystemIvp sys = b.as_system();
        std::vector<double> at0 = b.exact(sys.t0);
        for (int k = 0; k < sys.dimension; ++k) {
            CHECK(at0[static_cast<std::size_t>(k)] ==
                  doctest::Approx(sys.x0[static_cast<std::size_t>(k)]).epsilon(1e-14));
        }
    }
}

TEST_CASE("oracle agreement: fine rk4 tracks the exact curves everywhere") {
    for (const std::string& name : vim::builtin_names()) {
        CAPTURE(name);
        vim::BuiltinProblem b = vim::builtin(name);
        std::vector<GridFunction> u = vim::rk4_solve(b.as_system(), 1000);
        double worst = 0.0;
        for (int j = 0; j < 1000; ++j) {
            std::vector<double> ex = b.exact(u[0].grid.node(j));
            for (std::size_t k = 0; k < u.size(); ++k) {
                worst = std::max(worst,
                                 std::abs(u[k].values[static_cast<std::size_t>(j)] -
                                          ex[k]));
            }
        }
        CHECK(worst <= 1e-8);
    }
}
