// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

namespace z3sim {

using cxd = std::complex<double>;

/// 10*log10(x) for power ratios. Zero (e.g. a clamped distortion estimate)
/// maps to -inf so it stays representable and sortable.
inline double to_db(double power) {
    if (power <= 0.0) {
        return -std::numeric_limits<double>::infinity();
    }
    return 10.0 * std::log10(power);
}

inline double from_db(double db) { return std::pow(10.0, db / 10.0); }

inline double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

}  // namespace z3sim
