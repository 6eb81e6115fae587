#pragma once

#include <cstddef>
#include <functional>

namespace attrition {

// Hardware concurrency, capped by ATTRITION_LAB_THREADS when set.
unsigned worker_count();

// Runs body(n) for n in [0, count) on up to worker_count() threads. Each
// index runs exactly once; callers write results by index so the output
// order never depends on scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace attrition
