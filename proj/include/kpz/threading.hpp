#pragma once

#include <cstddef>
#include <functional>

namespace kpz {

// Worker cap: min(hardware_concurrency, KPZLDP_THREADS) with a floor of 1.
std::size_t thread_budget();

// Runs body(i) for i in [0, count), splitting the range over the thread
// budget.  Falls back to a plain loop when the budget is 1.  Exceptions
// from workers are rethrown on the calling thread.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

} // namespace kpz
