#pragma once

#include <span>

#include "vim/scalar.hpp"
#include "vim/system.hpp"

namespace vim {

/// Inputs of the factorial error estimate: a Lipschitz bound L on the
/// relevant partial derivatives, the interval length T = tf - t0, the system
/// dimension, the initial error norm, and the iteration index.
struct BoundInput {
    double L;
    double T;
    int dimension = 1;
    double e0_norm = 1.0;
    int n = 0;
};

/// Factorial decay estimate (M^n T^n / n!) * e0_norm with M = 2 L e^{LT}
/// for scalar problems and M = (d+1) L e^{LT} for systems of d equations
/// (the two coincide at d = 1). The factorial is taken through the
/// log-gamma function so the value stays finite long after M^n alone would
/// overflow; genuine overflow saturates to +infinity.
double error_bound(const BoundInput& input);

/// Empirical Lipschitz estimate: the largest |df/dx| (resp. |df_k/dx_k|)
/// seen along the trajectory, additionally sampled with each state
/// component shifted by +-padding. A lower estimate of the global constant,
/// for diagnostics only.
double sample_lipschitz(const ScalarIvp& problem, const GridFunction& trajectory,
                        double padding);
double sample_lipschitz(const SystemIvp& problem, std::span<const GridFunction> trajectory,
                        double padding);

}  // namespace vim
