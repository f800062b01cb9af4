#include "platecont/parallel.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace platecont {

namespace {
int g_budget = 0;

int env_budget() {
  const char* v = std::getenv("PLATECONT_THREADS");
  if (!v) return 0;
  try {
    int n = std::stoi(v);
    return n > 0 ? n : 0;
  } catch (...) {
    return 0;
  }
}
}  // namespace

void set_thread_budget(int threads) { g_budget = threads > 0 ? threads : 0; }

int thread_budget() {
  if (g_budget > 0) return g_budget;
  if (int e = env_budget(); e > 0) return e;
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void parallel_for(std::ptrdiff_t n, const std::function<void(std::ptrdiff_t)>& fn) {
#ifdef _OPENMP
  const int nt = thread_budget();
#pragma omp parallel for schedule(static) num_threads(nt) if (nt > 1 && n > 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) fn(i);
#else
  for (std::ptrdiff_t i = 0; i < n; ++i) fn(i);
#endif
}

double parallel_sum(std::ptrdiff_t n, const std::function<double(std::ptrdiff_t)>& fn) {
  std::vector<double> part(static_cast<std::size_t>(n > 0 ? n : 0));
  parallel_for(n, [&](std::ptrdiff_t i) { part[static_cast<std::size_t>(i)] = fn(i); });
  double s = 0.0;
  for (double v : part) s += v;
  return s;
}

}  // namespace platecont
