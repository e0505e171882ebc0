#pragma once

// Random expression generator and finite-difference derivative oracle shared
// by the unit and acceptance suites.

#include <cmath>
#include <optional>
#include <random>

#include "vim/expr.hpp"

namespace testgen {

struct AstGen {
    std::mt19937 rng;
    int dim;

    AstGen(unsigned seed, int dimension) : rng(seed), dim(dimension) {}

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    }

    int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

    vim::Expr leaf() {
        double c = uniform(0.0, 1.0);
        if (c < 0.4) {
            // few-digit constants keep printed forms short
            return vim::Expr::constant(std::round(uniform(-3.0, 3.0) * 1000.0) / 1000.0);
        }
        if (c < 0.6) return vim::Expr::time();
        return vim::Expr::state(pick(1, dim));
    }

    vim::Expr gen(int depth) {
        double r = uniform(0.0, 1.0);
        if (depth <= 0 || r < 0.3) return leaf();
        if (r < 0.55) {
            static constexpr vim::UnaryOp ops[] = {
                vim::UnaryOp::Neg, vim::UnaryOp::Exp, vim::UnaryOp::Log, vim::UnaryOp::Sin,
                vim::UnaryOp::Cos, vim::UnaryOp::Tan, vim::UnaryOp::Sqrt};
            return vim::Expr::unary(ops[pick(0, 6)], gen(depth - 1));
        }
        static constexpr vim::BinaryOp ops[] = {vim::BinaryOp::Add, vim::BinaryOp::Sub,
                                                vim::BinaryOp::Mul, vim::BinaryOp::Div,
                                                vim::BinaryOp::Pow};
        vim::BinaryOp op = ops[pick(0, 4)];
        if (op == vim::BinaryOp::Pow) {
            static constexpr double exps[] = {0.0, 1.0, 2.0, 3.0, 0.5};
            return vim::Expr::binary(op, gen(depth - 1), vim::Expr::constant(exps[pick(0, 4)]));
        }
        return vim::Expr::binary(op, gen(depth - 1), gen(depth - 1));
    }
};

struct SamplePoint {
    double t;
    std::vector<double> x;
};

inline std::optional<double> try_eval(const vim::Expr& e, double t,
                                      std::span<const double> x, double cap = 1e4) {
    try {
        double v = vim::eval_expression(e, t, x);
        if (!std::isfinite(v) || std::abs(v) > cap) return std::nullopt;
        return v;
    } catch (const vim::EvalError&) {
        return std::nullopt;
    }
}

/// Looks for a sample point where e, its shifted stencil values and the
/// analytic derivative in x_k are all finite and moderate.
inline std::optional<SamplePoint> find_sample(AstGen& g, const vim::Expr& e,
                                              const vim::Expr& de, int k, int tries = 40) {
    constexpr double h = 1e-6;
    for (int attempt = 0; attempt < tries; ++attempt) {
        SamplePoint p;
        p.t = g.uniform(0.2, 1.5);
        p.x.resize(static_cast<std::size_t>(g.dim));
        for (double& xi : p.x) xi = g.uniform(0.3, 2.0);

        bool ok = true;
        for (double shift : {-h, 0.0, h}) {
            std::vector<double> xs = p.x;
            xs[static_cast<std::size_t>(k - 1)] += shift;
            if (!try_eval(e, p.t, xs)) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        if (!try_eval(de, p.t, p.x)) continue;
        return p;
    }
    return std::nullopt;
}

inline double central_difference(const vim::Expr& e, double t, std::vector<double> x, int k) {
    constexpr double h = 1e-6;
    x[static_cast<std::size_t>(k - 1)] += h;
    double hi = vim::eval_expression(e, t, x);
    x[static_cast<std::size_t>(k - 1)] -= 2.0 * h;
    double lo = vim::eval_expression(e, t, x);
    return (hi - lo) / (2.0 * h);
}

}  // namespace testgen
