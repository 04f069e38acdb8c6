// SPDX-License-Identifier: Apache-2.0
#include "z3sim/analysis.hpp"

#include <cmath>
#include <iostream>

#include "z3sim/errors.hpp"
#include "z3sim/rng.hpp"

namespace z3sim {

namespace {

constexpr Eigen::Index kBlockSize = 8192;
constexpr Eigen::Index kSmallEnsembleWarning = 10000;

void check_powers(const Eigen::VectorXd& powers) {
    for (Eigen::Index k = 0; k < powers.size(); ++k) {
        if (!(powers(k) > 0.0) || !std::isfinite(powers(k))) {
            throw ValidationError("symbol power p_k must be positive and finite");
        }
    }
}

void warn_small_ensemble(Eigen::Index ensemble_size) {
    if (ensemble_size < kSmallEnsembleWarning) {
        std::cerr << "z3sim: warning: ensemble size " << ensemble_size
                  << " is below 10000; Monte-Carlo estimates will be noisy\n";
    }
}

/// Fills rows [0, rows) in sample-major order: the draw sequence is the same
/// whether the ensemble is materialized in one piece or streamed in blocks.
void fill_symbol_block(ComplexGaussianSource& source, const Eigen::VectorXd& component_sigma,
                       Eigen::Index rows, Eigen::Ref<Eigen::MatrixXcd> block) {
    for (Eigen::Index n = 0; n < rows; ++n) {
        for (Eigen::Index k = 0; k < block.cols(); ++k) {
            block(n, k) = source.draw(component_sigma(k));
        }
    }
}

DistortionEstimate finalize_distortion(double mean_received_power, cxd gain, double symbol_power,
                                       double noise_var, Eigen::Index ensemble_size) {
    const double signal_var = std::norm(gain) * symbol_power;
    const double raw = mean_received_power - signal_var - noise_var;
    const double tolerance = 10.0 / std::sqrt(static_cast<double>(ensemble_size)) * signal_var;
    if (raw < -tolerance) {
        throw InconsistencyError(
            "distortion estimate is negative beyond Monte-Carlo tolerance; the Bussgang gain does "
            "not belong to this ensemble");
    }
    if (raw < 0.0) {
        return DistortionEstimate{0.0, raw, true};
    }
    return DistortionEstimate{raw, raw, false};
}

}  // namespace

SymbolEnsemble draw_symbols(Eigen::Index user_count, Eigen::Index ensemble_size,
                            const Eigen::VectorXd& powers, std::uint64_t seed) {
    if (user_count < 1 || ensemble_size < 1) {
        throw ValidationError("symbol ensemble needs K >= 1 and N >= 1");
    }
    if (powers.size() != user_count) {
        throw ValidationError("power vector length does not match the user count");
    }
    check_powers(powers);
    warn_small_ensemble(ensemble_size);

    ComplexGaussianSource source(seed);
    const Eigen::VectorXd component_sigma = (powers / 2.0).cwiseSqrt();
    Eigen::MatrixXcd symbols(ensemble_size, user_count);
    fill_symbol_block(source, component_sigma, ensemble_size, symbols);

    const double band = 5.0 / std::sqrt(static_cast<double>(ensemble_size));
    for (Eigen::Index k = 0; k < user_count; ++k) {
        const double empirical = symbols.col(k).squaredNorm() / static_cast<double>(ensemble_size);
        if (std::abs(empirical / powers(k) - 1.0) > band) {
            throw InconsistencyError("drawn ensemble variance for user " + std::to_string(k) +
                                     " is outside the 5/sqrt(N) band around p_k");
        }
    }
    return SymbolEnsemble{std::move(symbols), powers, seed};
}

Eigen::MatrixXcd received_noiseless(const ChannelSet& channels, const PrecoderWeights& weights,
                                    const PaModel& pa, const SymbolEnsemble& ensemble) {
    if (weights.antenna_count() != channels.antenna_count()) {
        throw ValidationError("precoder and channel set disagree on antenna count");
    }
    if (ensemble.user_count() != weights.user_count()) {
        throw ValidationError("ensemble and precoder disagree on user count");
    }
    Eigen::MatrixXcd amplified = precode_symbols(weights, ensemble.symbols);
    amplify_in_place(amplified, pa);
    return amplified * channels.gains;
}

cxd bussgang_gain(std::span<const cxd> received, std::span<const cxd> symbols,
                  double symbol_power) {
    if (received.empty()) {
        throw ValidationError("Bussgang gain needs a non-empty sample");
    }
    if (received.size() != symbols.size()) {
        throw ValidationError("received and symbol sample sizes differ");
    }
    if (!(symbol_power > 0.0)) {
        throw ValidationError("symbol power must be positive");
    }
    cxd acc{0.0, 0.0};
    for (std::size_t n = 0; n < received.size(); ++n) {
        acc += received[n] * std::conj(symbols[n]);
    }
    return acc / (static_cast<double>(received.size()) * symbol_power);
}

DistortionEstimate distortion_variance(std::span<const cxd> received, cxd gain,
                                       double symbol_power, double noise_var) {
    if (received.empty()) {
        throw ValidationError("distortion estimate needs a non-empty sample");
    }
    if (noise_var < 0.0) {
        throw ValidationError("noise variance must be non-negative");
    }
    double mean_power = 0.0;
    for (const cxd& r : received) {
        mean_power += std::norm(r);
    }
    mean_power /= static_cast<double>(received.size());
    return finalize_distortion(mean_power, gain, symbol_power, noise_var,
                               static_cast<Eigen::Index>(received.size()));
}

double sndr(double signal_var, double distortion_var, double noise_var) {
    if (signal_var < 0.0 || distortion_var < 0.0 || noise_var < 0.0) {
        throw ValidationError("SNDR inputs must be non-negative");
    }
    const double denom = distortion_var + noise_var;
    if (denom == 0.0) {
        throw SingularityError("SNDR denominator is zero: no distortion and no noise");
    }
    return signal_var / denom;
}

double rate_bits(double sndr_linear) {
    if (sndr_linear < 0.0 || !std::isfinite(sndr_linear)) {
        throw ValidationError("rate needs a finite non-negative SNDR");
    }
    return std::log2(1.0 + sndr_linear);
}

BussgangResult bussgang_analysis(const ChannelSet& channels, const PrecoderWeights& weights,
                                 const PaModel& pa, const Eigen::VectorXd& powers,
                                 Eigen::Index ensemble_size, std::uint64_t seed,
                                 double noise_var) {
    const Eigen::Index antenna_count = channels.antenna_count();
    const Eigen::Index location_count = channels.location_count();
    const Eigen::Index user_count = weights.user_count();
    if (weights.antenna_count() != antenna_count) {
        throw ValidationError("precoder and channel set disagree on antenna count");
    }
    if (powers.size() != user_count) {
        throw ValidationError("power vector length does not match the user count");
    }
    if (ensemble_size < 1) {
        throw ValidationError("ensemble size must be positive");
    }
    if (noise_var < 0.0) {
        throw ValidationError("noise variance must be non-negative");
    }
    check_powers(powers);
    validate(pa);
    warn_small_ensemble(ensemble_size);

    ComplexGaussianSource source(seed);
    const Eigen::VectorXd component_sigma = (powers / 2.0).cwiseSqrt();
    const Eigen::MatrixXcd weights_t = weights.weights.transpose();  // K x M

    Eigen::MatrixXcd cross = Eigen::MatrixXcd::Zero(location_count, user_count);  // sum r conj(s)
    Eigen::VectorXd power_acc = Eigen::VectorXd::Zero(location_count);            // sum |r|^2

    Eigen::MatrixXcd symbol_block(kBlockSize, user_count);
    Eigen::MatrixXcd antenna_block(kBlockSize, antenna_count);
    Eigen::MatrixXcd received_block(kBlockSize, location_count);

    for (Eigen::Index n0 = 0; n0 < ensemble_size; n0 += kBlockSize) {
        const Eigen::Index rows = std::min(kBlockSize, ensemble_size - n0);
        auto s = symbol_block.topRows(rows);
        auto x = antenna_block.topRows(rows);
        auto r = received_block.topRows(rows);

        fill_symbol_block(source, component_sigma, rows, s);
        x.noalias() = s * weights_t;
        amplify_in_place(x, pa);
        r.noalias() = x * channels.gains;

        cross.noalias() += r.transpose() * s.conjugate();
        power_acc.noalias() += r.colwise().squaredNorm().transpose();
    }

    const double inv_n = 1.0 / static_cast<double>(ensemble_size);
    BussgangResult result;
    result.gain.resize(location_count, user_count);
    result.signal_var.resize(location_count, user_count);
    result.distortion_var.resize(location_count, user_count);
    result.raw_distortion_var.resize(location_count, user_count);
    result.received_power = power_acc * inv_n;
    result.noise_var = noise_var;
    result.ensemble_size = ensemble_size;

    for (Eigen::Index k = 0; k < user_count; ++k) {
        for (Eigen::Index l = 0; l < location_count; ++l) {
            const cxd gain = cross(l, k) * inv_n / powers(k);
            // The spec estimator runs on the noiseless received signal;
            // sigma_v^2 enters the SNDR denominator analytically downstream.
            const auto est = finalize_distortion(result.received_power(l), gain, powers(k),
                                                 /*noise_var=*/0.0, ensemble_size);
            result.gain(l, k) = gain;
            result.signal_var(l, k) = std::norm(gain) * powers(k);
            result.distortion_var(l, k) = est.variance;
            result.raw_distortion_var(l, k) = est.raw;
            if (est.clamped) {
                ++result.clamp_count;
            }
        }
    }
    return result;
}

}  // namespace z3sim
