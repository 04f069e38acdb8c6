// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>

namespace z3sim {

/// Worker count to use: `requested` if positive, otherwise all hardware threads.
int resolve_thread_count(int requested);

/// Runs body(0..count-1) on up to `threads` workers. Bodies must be independent;
/// callers store results by index, so any schedule yields the same output.
/// The first exception thrown by a body is rethrown after all workers join.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

}  // namespace z3sim
