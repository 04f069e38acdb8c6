// SPDX-License-Identifier: Apache-2.0
#include "z3sim/pa.hpp"

#include <cmath>

#include "z3sim/errors.hpp"

namespace z3sim {

namespace {

inline bool finite(cxd x) { return std::isfinite(x.real()) && std::isfinite(x.imag()); }

inline cxd rapp_apply(cxd x, double saturation_power, double smoothness) {
    const double q = std::norm(x) / saturation_power;  // (|x| / sqrt(p_sat))^2
    if (q == 0.0) {
        return x;
    }
    // S = 2 avoids pow() entirely: (1 + q^2)^(1/4).
    const double t = smoothness == 2.0 ? q * q : std::pow(q, smoothness);
    if (!std::isfinite(t)) {
        // Deep saturation limit: y -> x * sqrt(p_sat) / |x|.
        return x * std::sqrt(saturation_power / std::norm(x));
    }
    const double denom = smoothness == 2.0 ? std::sqrt(std::sqrt(1.0 + t))
                                           : std::pow(1.0 + t, 1.0 / (2.0 * smoothness));
    return x / denom;
}

template <typename Fn>
void for_each_coeff(Eigen::Ref<Eigen::MatrixXcd> x, Fn&& fn) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
        for (Eigen::Index r = 0; r < x.rows(); ++r) {
            x(r, c) = fn(x(r, c));
        }
    }
}

}  // namespace

void validate(const PaModel& model) {
    if (const auto* rapp = std::get_if<RappPa>(&model)) {
        if (!(rapp->saturation_power > 0.0) || !std::isfinite(rapp->saturation_power)) {
            throw ValidationError("Rapp saturation power must be positive and finite");
        }
        if (!(rapp->smoothness > 0.0) || !std::isfinite(rapp->smoothness)) {
            throw ValidationError("Rapp smoothness must be positive and finite");
        }
    } else if (const auto* poly = std::get_if<Polynomial3Pa>(&model)) {
        if (poly->linear_gain == cxd{0.0, 0.0}) {
            throw ValidationError("polynomial PA needs a non-zero linear gain");
        }
        if (!finite(poly->linear_gain) || !finite(poly->cubic_coeff)) {
            throw ValidationError("polynomial PA coefficients must be finite");
        }
    }
}

cxd amplify(cxd x, const PaModel& model) {
    if (!finite(x)) {
        throw ValidationError("amplify: non-finite input sample");
    }
    validate(model);
    return std::visit(
        [&](const auto& m) -> cxd {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, RappPa>) {
                return rapp_apply(x, m.saturation_power, m.smoothness);
            } else if constexpr (std::is_same_v<T, Polynomial3Pa>) {
                return m.linear_gain * x + m.cubic_coeff * x * std::norm(x);
            } else {
                return x;
            }
        },
        model);
}

void amplify_in_place(Eigen::Ref<Eigen::MatrixXcd> x, const PaModel& model) {
    if (!x.allFinite()) {
        throw ValidationError("amplify: non-finite input sample");
    }
    validate(model);
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, RappPa>) {
                const double psat = m.saturation_power;
                const double s = m.smoothness;
                for_each_coeff(x, [psat, s](cxd v) { return rapp_apply(v, psat, s); });
            } else if constexpr (std::is_same_v<T, Polynomial3Pa>) {
                const cxd a1 = m.linear_gain;
                const cxd a3 = m.cubic_coeff;
                for_each_coeff(x, [a1, a3](cxd v) { return a1 * v + a3 * v * std::norm(v); });
            }
        },
        model);
}

Eigen::MatrixXcd amplify(const Eigen::MatrixXcd& x, const PaModel& model) {
    Eigen::MatrixXcd y = x;
    amplify_in_place(y, model);
    return y;
}

cxd small_signal_gain(const PaModel& model) {
    validate(model);
    if (const auto* poly = std::get_if<Polynomial3Pa>(&model)) {
        return poly->linear_gain;
    }
    return {1.0, 0.0};
}

}  // namespace z3sim
