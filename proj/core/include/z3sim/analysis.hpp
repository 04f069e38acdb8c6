// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>

#include "z3sim/channel.hpp"
#include "z3sim/pa.hpp"
#include "z3sim/precoding.hpp"

namespace z3sim {

/// N x K complex Gaussian symbol matrix; column k is drawn CN(0, p_k),
/// columns independent.
struct SymbolEnsemble {
    Eigen::MatrixXcd symbols;       // N x K
    Eigen::VectorXd per_user_power; // p_k
    std::uint64_t seed = 0;

    Eigen::Index size() const { return symbols.rows(); }
    Eigen::Index user_count() const { return symbols.cols(); }
};

/// Reproducible symbol draw. Warns (stderr) below N = 1e4; throws
/// InconsistencyError if an empirical column variance lands outside the
/// 5/sqrt(N) relative band around p_k.
SymbolEnsemble draw_symbols(Eigen::Index user_count, Eigen::Index ensemble_size,
                            const Eigen::VectorXd& powers, std::uint64_t seed);

/// r[n,l] = sum_m ch.gains[m,l] * amplify(precode(symbols)[n,m]).
/// Noise is never sampled; it enters the SNDR denominators analytically.
Eigen::MatrixXcd received_noiseless(const ChannelSet& channels, const PrecoderWeights& weights,
                                    const PaModel& pa, const SymbolEnsemble& ensemble);

/// G = (1/N) sum_n r_n conj(s_n) / p_k.
cxd bussgang_gain(std::span<const cxd> received, std::span<const cxd> symbols,
                  double symbol_power);

struct DistortionEstimate {
    double variance = 0.0;  // clamped at zero
    double raw = 0.0;       // E|r|^2 - |G|^2 p - sigma_v^2 before clamping
    bool clamped = false;
};

/// E|d|^2 = E|r|^2 - |G|^2 p - sigma_v^2. Small negative estimates (within
/// 10/sqrt(N) of the signal variance) clamp to zero and set the flag; larger
/// negatives signal a mismatched gain/ensemble pairing and throw.
DistortionEstimate distortion_variance(std::span<const cxd> received, cxd gain,
                                       double symbol_power, double noise_var);

/// signal / (distortion + noise), linear. Throws SingularityError when the
/// denominator vanishes.
double sndr(double signal_var, double distortion_var, double noise_var);

/// Rate lower bound log2(1 + sndr), bits/symbol.
double rate_bits(double sndr_linear);

/// Monte-Carlo Bussgang decomposition of one scenario over every location.
struct BussgangResult {
    Eigen::MatrixXcd gain;              // L x K, G_{l,k}
    Eigen::MatrixXd signal_var;         // L x K, |G|^2 p_k
    Eigen::MatrixXd distortion_var;     // L x K, clamped
    Eigen::MatrixXd raw_distortion_var; // L x K
    Eigen::VectorXd received_power;     // L, E|r_l|^2
    double noise_var = 0.0;             // sigma_v^2 carried for SNDR/SNIDR
    Eigen::Index ensemble_size = 0;
    int clamp_count = 0;
};

/// Streaming evaluation: draws the ensemble in blocks, precodes, amplifies,
/// and accumulates the per-location cross moments. Equivalent to the
/// materialized ops above but never stores an N x L matrix. The estimator runs
/// with analytic noise (sigma_v^2 enters only SNDR denominators downstream).
BussgangResult bussgang_analysis(const ChannelSet& channels, const PrecoderWeights& weights,
                                 const PaModel& pa, const Eigen::VectorXd& powers,
                                 Eigen::Index ensemble_size, std::uint64_t seed,
                                 double noise_var);

}  // namespace z3sim
