// SPDX-License-Identifier: Apache-2.0
#include "z3sim/precoding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "z3sim/errors.hpp"

namespace z3sim {

namespace {

void check_channels(std::span<const UserChannel> channels) {
    if (channels.empty()) {
        throw ValidationError("precoder needs at least one user channel");
    }
    const Eigen::Index antenna_count = channels[0].gains.size();
    if (antenna_count < 1) {
        throw ValidationError("user channel has no antennas");
    }
    for (std::size_t k = 0; k < channels.size(); ++k) {
        const auto& h = channels[k].gains;
        if (h.size() != antenna_count) {
            throw ValidationError("user channels disagree on antenna count");
        }
        if (!h.allFinite()) {
            throw ValidationError("user " + std::to_string(k) + " channel has a non-finite gain");
        }
        if (h.squaredNorm() == 0.0) {
            throw ValidationError("user " + std::to_string(k) + " channel is all-zero");
        }
    }
}

std::vector<Eigen::Index> pick_saturated_set(const Eigen::VectorXcd& h, Eigen::Index saturated_count,
                                             SaturatedSelection selection) {
    std::vector<Eigen::Index> indices(static_cast<std::size_t>(h.size()));
    std::iota(indices.begin(), indices.end(), Eigen::Index{0});
    if (selection == SaturatedSelection::SmallestGains) {
        // Stable sort keeps ties on the lower antenna index.
        std::stable_sort(indices.begin(), indices.end(), [&](Eigen::Index a, Eigen::Index b) {
            return std::abs(h(a)) < std::abs(h(b));
        });
    }
    indices.resize(static_cast<std::size_t>(saturated_count));
    std::sort(indices.begin(), indices.end());
    return indices;
}

}  // namespace

std::string to_string(PrecoderKind kind) {
    return kind == PrecoderKind::Mrt ? "mrt" : "z3ro";
}

std::string to_string(SaturatedSelection selection) {
    return selection == SaturatedSelection::FirstIndices ? "first" : "smallest";
}

void validate(const PowerBudget& budget) {
    if (budget.per_user_power.size() < 1) {
        throw ValidationError("power budget needs at least one user");
    }
    for (Eigen::Index k = 0; k < budget.per_user_power.size(); ++k) {
        if (!(budget.per_user_power(k) > 0.0) || !std::isfinite(budget.per_user_power(k))) {
            throw ValidationError("per-user power must be positive and finite");
        }
    }
    if (!(budget.saturation_power > 0.0) || !std::isfinite(budget.saturation_power)) {
        throw ValidationError("saturation power must be positive and finite");
    }
}

PowerBudget equal_power_budget(Eigen::Index user_count, double backoff_db,
                               double saturation_power) {
    if (user_count < 1) {
        throw ValidationError("power budget needs at least one user");
    }
    if (!std::isfinite(backoff_db)) {
        throw ValidationError("back-off must be finite");
    }
    const double input_power = saturation_power * from_db(backoff_db);
    PowerBudget budget;
    budget.per_user_power =
        Eigen::VectorXd::Constant(user_count, input_power / static_cast<double>(user_count));
    budget.saturation_power = saturation_power;
    validate(budget);
    return budget;
}

PrecoderWeights mrt_weights(std::span<const UserChannel> channels) {
    check_channels(channels);
    const Eigen::Index antenna_count = channels[0].gains.size();
    const Eigen::Index user_count = static_cast<Eigen::Index>(channels.size());

    PrecoderWeights out;
    out.kind = PrecoderKind::Mrt;
    out.weights.resize(antenna_count, user_count);
    out.per_user_alpha.resize(user_count);
    out.saturated_sets.assign(static_cast<std::size_t>(user_count), {});
    for (Eigen::Index k = 0; k < user_count; ++k) {
        const auto& h = channels[static_cast<std::size_t>(k)].gains;
        const double alpha = std::sqrt(static_cast<double>(antenna_count) / h.squaredNorm());
        out.per_user_alpha(k) = alpha;
        out.weights.col(k) = alpha * h.conjugate();
    }
    return out;
}

PrecoderWeights z3ro_weights(std::span<const UserChannel> channels, Eigen::Index saturated_count,
                             SaturatedSelection selection) {
    check_channels(channels);
    const Eigen::Index antenna_count = channels[0].gains.size();
    const Eigen::Index user_count = static_cast<Eigen::Index>(channels.size());
    if (saturated_count < 1 || saturated_count >= antenna_count) {
        throw ValidationError("saturated antenna count must satisfy 1 <= M_s < M, got M_s=" +
                              std::to_string(saturated_count) + " with M=" +
                              std::to_string(antenna_count));
    }

    PrecoderWeights out;
    out.kind = PrecoderKind::Z3ro;
    out.weights.resize(antenna_count, user_count);
    out.per_user_alpha.resize(user_count);
    out.saturated_sets.resize(static_cast<std::size_t>(user_count));

    std::vector<bool> saturated(static_cast<std::size_t>(antenna_count));
    for (Eigen::Index k = 0; k < user_count; ++k) {
        const auto& h = channels[static_cast<std::size_t>(k)].gains;
        auto set = pick_saturated_set(h, saturated_count, selection);
        saturated.assign(static_cast<std::size_t>(antenna_count), false);
        for (const Eigen::Index m : set) {
            saturated[static_cast<std::size_t>(m)] = true;
        }

        double quartic_in = 0.0, quartic_out = 0.0;
        double quadratic_in = 0.0, quadratic_out = 0.0;
        for (Eigen::Index m = 0; m < antenna_count; ++m) {
            const double g2 = std::norm(h(m));
            const double g4 = g2 * g2;
            if (saturated[static_cast<std::size_t>(m)]) {
                quartic_in += g4;
                quadratic_in += g2;
            } else {
                quartic_out += g4;
                quadratic_out += g2;
            }
        }
        if (quartic_in == 0.0) {
            throw SingularityError("user " + std::to_string(k) +
                                   ": saturated set carries zero channel energy");
        }
        const double gamma = std::cbrt(quartic_out / quartic_in);
        const double denom_sq = quadratic_out + gamma * gamma * quadratic_in;
        if (denom_sq == 0.0) {
            throw SingularityError("user " + std::to_string(k) +
                                   ": non-saturated antennas carry zero channel energy");
        }
        const double alpha = std::sqrt(static_cast<double>(antenna_count)) / std::sqrt(denom_sq);

        out.per_user_alpha(k) = alpha;
        for (Eigen::Index m = 0; m < antenna_count; ++m) {
            const double scale = saturated[static_cast<std::size_t>(m)] ? -gamma : 1.0;
            out.weights(m, k) = alpha * scale * std::conj(h(m));
        }
        out.saturated_sets[static_cast<std::size_t>(k)] = std::move(set);
    }
    return out;
}

Eigen::MatrixXcd precode_symbols(const PrecoderWeights& weights, const Eigen::MatrixXcd& symbols) {
    if (symbols.cols() != weights.user_count()) {
        throw ValidationError("symbol matrix has " + std::to_string(symbols.cols()) +
                              " columns, precoder expects " + std::to_string(weights.user_count()));
    }
    return symbols * weights.weights.transpose();
}

Eigen::MatrixXcd scale_to_backoff(const Eigen::MatrixXcd& x, const PowerBudget& budget) {
    validate(budget);
    const double total = x.squaredNorm();
    if (total == 0.0 || x.size() == 0) {
        throw ValidationError("cannot rescale a zero-power signal block");
    }
    const double target = budget.input_power() * static_cast<double>(x.rows()) *
                          static_cast<double>(x.cols());
    return x * std::sqrt(target / total);
}

cxd third_order_beam_sum(const UserChannel& channel, const Eigen::VectorXcd& weight_column) {
    if (channel.gains.size() != weight_column.size()) {
        throw ValidationError("channel and weight vector lengths differ");
    }
    cxd sum{0.0, 0.0};
    for (Eigen::Index m = 0; m < weight_column.size(); ++m) {
        sum += channel.gains(m) * weight_column(m) * std::norm(weight_column(m));
    }
    return sum;
}

}  // namespace z3sim
