#pragma once

// Data-parallel loops over independent work items (bootstrap replicates,
// Monte Carlo replicates, design grid points).
//
// Every work item writes only its own output slot and draws from its own
// random stream, so the OpenMP kernel and the serial reference produce
// bitwise-identical results; reductions happen afterwards in index order.

#include <cstddef>
#include <exception>
#include <span>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ssalt {

struct Execution {
  int threads = 0;  // 0 = OpenMP default, 1 = serial reference path
};

namespace kernels {

template <class Fn>
void for_each_index_serial(std::size_t n, Fn&& fn) {
  for (std::size_t i = 0; i < n; ++i) fn(i);
}

template <class Fn>
void for_each_index_omp(std::size_t n, Execution exec, Fn&& fn) {
#ifdef _OPENMP
  const int threads = exec.threads > 0 ? exec.threads : omp_get_max_threads();
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (long long i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  // Lowest failing index wins, independent of scheduling.
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
#else
  (void)exec;
  for_each_index_serial(n, fn);
#endif
}

}  // namespace kernels

template <class Fn>
void for_each_index(std::size_t n, Execution exec, Fn&& fn) {
  if (exec.threads == 1) {
    kernels::for_each_index_serial(n, fn);
  } else {
    kernels::for_each_index_omp(n, exec, fn);
  }
}

// Pairwise summation with a fixed reduction tree.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

}  // namespace ssalt
