#pragma once

#include <cstddef>
#include <functional>

namespace rcov {

// Worker count used by parallel_for. 0 means hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

// Runs body(i) for every i in [0, n). Work items are claimed dynamically, so
// callers must write results into per-item slots and reduce them in index
// order afterwards. Nested calls run inline on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace rcov
