#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace platecont {

/// Thread budget: explicit value, else PLATECONT_THREADS, else the runtime default.
void set_thread_budget(int threads);
int thread_budget();

/// Runs fn(i) for i in [0, n). Iterations must be independent.
void parallel_for(std::ptrdiff_t n, const std::function<void(std::ptrdiff_t)>& fn);

/// Deterministic sum of fn(i): per-index partials, summed in index order.
double parallel_sum(std::ptrdiff_t n, const std::function<double(std::ptrdiff_t)>& fn);

}  // namespace platecont
