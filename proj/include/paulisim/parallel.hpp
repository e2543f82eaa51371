#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace paulisim {

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// Deterministic parallel sum of f(0) + f(1) + ... + f(count-1).
//
// The index range is cut into fixed-width chunks; each chunk is left-folded
// on its own, then the chunk partials are left-folded in chunk order. The
// reduction tree depends only on count, never on the thread count, so the
// result is bit-identical whether it runs on one thread or many.
template <typename T, typename Fn>
T deterministic_sum(std::size_t count, Fn&& f) {
  constexpr std::size_t kChunk = 4096;
  if (count == 0) return T{};
  std::size_t chunks = (count + kChunk - 1) / kChunk;
  std::vector<T> partial(chunks, T{});
#pragma omp parallel for schedule(static)
  for (long long c = 0; c < static_cast<long long>(chunks); ++c) {
    std::size_t begin = static_cast<std::size_t>(c) * kChunk;
    std::size_t end = begin + kChunk < count ? begin + kChunk : count;
    T acc{};
    for (std::size_t i = begin; i < end; ++i) {
      acc += f(i);
    }
    partial[static_cast<std::size_t>(c)] = acc;
  }
  T total{};
  for (const T& p : partial) {
    total += p;
  }
  return total;
}

// Plain left fold over the same range. Reference implementation for tests
// and benchmarks; differs from deterministic_sum only in rounding.
template <typename T, typename Fn>
T serial_sum(std::size_t count, Fn&& f) {
  T acc{};
  for (std::size_t i = 0; i < count; ++i) {
    acc += f(i);
  }
  return acc;
}

}  // namespace paulisim
