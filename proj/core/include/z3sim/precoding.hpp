// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "z3sim/channel.hpp"

namespace z3sim {

enum class PrecoderKind { Mrt, Z3ro };

/// Which antennas carry the sign-inverted Z3RO weights: the first M_s indices
/// (the formula-literal choice) or the M_s smallest channel magnitudes (ties
/// broken by lower antenna index), which minimizes the SNR penalty.
enum class SaturatedSelection { FirstIndices, SmallestGains };

std::string to_string(PrecoderKind kind);
std::string to_string(SaturatedSelection selection);

/// Per-user precoding weights, normalized so sum_m |w_{m,k}|^2 == M for every
/// user. Immutable after construction; safe to share.
struct PrecoderWeights {
    Eigen::MatrixXcd weights;      // M x K, w_{m,k}
    Eigen::VectorXd per_user_alpha;  // alpha_k > 0
    std::vector<std::vector<Eigen::Index>> saturated_sets;  // per user, empty for MRT
    PrecoderKind kind = PrecoderKind::Mrt;

    Eigen::Index antenna_count() const { return weights.rows(); }
    Eigen::Index user_count() const { return weights.cols(); }
};

/// Average PA input power budget shared by the K users.
struct PowerBudget {
    Eigen::VectorXd per_user_power;  // p_k, watts
    double saturation_power = 1.0;   // p_sat, watts

    double input_power() const { return per_user_power.sum(); }  // p_in
    double total_power(Eigen::Index antenna_count) const {       // p_T = M * p_in
        return static_cast<double>(antenna_count) * input_power();
    }
    double backoff_db() const { return to_db(input_power() / saturation_power); }
};

void validate(const PowerBudget& budget);

/// Equal split p_k = p_in / K at the requested back-off 10*log10(p_in/p_sat).
PowerBudget equal_power_budget(Eigen::Index user_count, double backoff_db,
                               double saturation_power);

/// w_{m,k} = alpha_k * conj(h_{m,k}) with alpha_k = sqrt(M / sum_m |h_{m,k}|^2).
PrecoderWeights mrt_weights(std::span<const UserChannel> channels);

/// Z3RO weights: per user, the selected saturated set carries -gamma_k times
/// the matched weight, the rest the matched weight, with
/// gamma_k = (sum_{m not in S} |h|^4 / sum_{m in S} |h|^4)^(1/3) chosen so the
/// beamformed third-order term sum_m h_m w_m |w_m|^2 vanishes at the user.
PrecoderWeights z3ro_weights(std::span<const UserChannel> channels,
                             Eigen::Index saturated_count, SaturatedSelection selection);

/// x[n,m] = sum_k w[m,k] * s[n,k] for an N x K symbol matrix.
Eigen::MatrixXcd precode_symbols(const PrecoderWeights& weights,
                                 const Eigen::MatrixXcd& symbols);

/// Rescales x so the empirical mean per-antenna power equals the budget's
/// p_in. When the symbols already carry variance p_k and the weights are
/// normalized this is the identity up to Monte-Carlo fluctuation.
Eigen::MatrixXcd scale_to_backoff(const Eigen::MatrixXcd& x, const PowerBudget& budget);

/// sum_m h_m w_m |w_m|^2 -- zero at the user for Z3RO by construction.
cxd third_order_beam_sum(const UserChannel& channel, const Eigen::VectorXcd& weight_column);

}  // namespace z3sim
