#pragma once

#include <cstddef>
#include <functional>

namespace ultraheat {

/// Worker count used by the Monte Carlo drivers; 0 selects hardware concurrency.
void set_thread_count(int threads);
int thread_count();

/// Calls body(i) for i in [0, count) on up to thread_count() threads. The
/// first exception thrown by any worker is rethrown on the caller.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

} // namespace ultraheat
