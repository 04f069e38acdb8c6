// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>

#include "z3sim/math_util.hpp"

namespace z3sim {

/// splitmix64 finalizer, used to turn small human-chosen seeds into
/// well-distributed engine states.
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Per-task stream seed derived from (master seed, task index). Tasks draw
/// from private streams, so parallel and serial schedules produce identical
/// results.
constexpr std::uint64_t derive_stream_seed(std::uint64_t master_seed,
                                           std::uint64_t stream_index) noexcept {
    return splitmix64(master_seed ^ splitmix64(stream_index + 0x632BE59BD9B4E019ull));
}

/// Circularly-symmetric complex Gaussian source with a fixed draw order:
/// one (re, im) pair per sample, each component scaled by the requested sigma.
class ComplexGaussianSource {
  public:
    explicit ComplexGaussianSource(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    cxd draw(double component_sigma) {
        const double re = component_sigma * normal_(engine_);
        const double im = component_sigma * normal_(engine_);
        return {re, im};
    }

  private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace z3sim
