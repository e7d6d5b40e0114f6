#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gas {

// Grid-point loops are data-parallel maps: every index writes only its own
// output slot, so results are identical for any thread count.
template <class F>
inline void parallel_for(std::size_t count, F&& body) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < static_cast<long long>(count); ++i)
    body(static_cast<std::size_t>(i));
#else
  for (std::size_t i = 0; i < count; ++i) body(i);
#endif
}

inline int worker_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline void cap_worker_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

// Honors the GAS_THREADS environment variable when set.
void apply_thread_cap_from_env();

}  // namespace gas
