#pragma once

// Subset-enumeration kernels. Each parallel kernel has a serial twin that the
// tests use as the reference; results are identical by construction because
// every subset writes to its own slot and reductions run in a fixed order.

#include <cstdint>
#include <exception>
#include <span>
#include <vector>

#include <omp.h>

namespace robustsum::kernels {

using Mask = std::uint64_t;

// Honors ROBUSTSUM_THREADS when set to a positive integer.
int thread_limit();

inline int popcount(Mask m) { return __builtin_popcountll(m); }

// Lexicographic order on the sorted index lists of two subsets.
bool lex_less(Mask a, Mask b);

// 1-based indices of the set bits.
std::vector<std::size_t> mask_indices(Mask m);
Mask indices_mask(std::span<const std::size_t> indices);

// All nonempty masks over n elements with at most max_card bits, ascending.
std::vector<Mask> subset_masks(unsigned n, unsigned max_card);

// max over nonempty J of the correctly rounded sum of terms[J].
double max_subset_sum(std::span<const double> terms);
double max_subset_sum_serial(std::span<const double> terms);

template <class R, class F>
std::vector<R> map_subsets(std::span<const Mask> masks, F&& fn) {
  std::vector<R> out(masks.size());
  std::exception_ptr error;
  const auto count = static_cast<std::int64_t>(masks.size());
#pragma omp parallel for schedule(dynamic, 16) num_threads(thread_limit())
  for (std::int64_t k = 0; k < count; ++k) {
    try {
      out[static_cast<std::size_t>(k)] = fn(masks[static_cast<std::size_t>(k)]);
    } catch (...) {
#pragma omp critical(robustsum_map_subsets_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

template <class R, class F>
std::vector<R> map_subsets_serial(std::span<const Mask> masks, F&& fn) {
  std::vector<R> out;
  out.reserve(masks.size());
  for (Mask m : masks) out.push_back(fn(m));
  return out;
}

}  // namespace robustsum::kernels
