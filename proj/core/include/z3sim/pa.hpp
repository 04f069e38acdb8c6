// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <variant>

#include "z3sim/math_util.hpp"

namespace z3sim {

/// Rapp AM/AM model: |y| = |x| / (1 + (|x|^2/p_sat)^S)^(1/(2S)), zero AM/PM.
/// Unit small-signal gain by construction.
struct RappPa {
    double saturation_power = 1.0;  // p_sat, watts
    double smoothness = 2.0;        // S
};

/// Memoryless third-order surrogate y = a1*x + a3*x*|x|^2. The default a3
/// keeps the cubic term perturbative at unit input power.
struct Polynomial3Pa {
    cxd linear_gain{1.0, 0.0};    // a1
    cxd cubic_coeff{-0.05, 0.0};  // a3
};

/// Pass-through.
struct IdealPa {};

using PaModel = std::variant<RappPa, Polynomial3Pa, IdealPa>;

/// Throws ValidationError on non-positive Rapp parameters or a1 == 0.
void validate(const PaModel& model);

/// Sample-wise amplification. Throws ValidationError on non-finite input.
cxd amplify(cxd x, const PaModel& model);
Eigen::MatrixXcd amplify(const Eigen::MatrixXcd& x, const PaModel& model);
void amplify_in_place(Eigen::Ref<Eigen::MatrixXcd> x, const PaModel& model);

/// Derivative of the transfer characteristic at the origin:
/// 1 for Rapp and Ideal, a1 for Polynomial3.
cxd small_signal_gain(const PaModel& model);

}  // namespace z3sim
