#pragma once

#include <cstddef>
#include <functional>

namespace confvisc {

/// Worker count used by parallel_for. 0 selects hardware concurrency.
void set_thread_count(int threads);
int thread_count();

/// Calls body(i) for i in [0, count) across the configured workers. Each index
/// is visited exactly once; bodies must only write to slot i of their outputs,
/// which keeps results independent of scheduling. The first exception thrown
/// by any body is rethrown on the calling thread.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace confvisc
