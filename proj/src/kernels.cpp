#include "robustsum/kernels.hpp"

#include <cstdlib>

#include "robustsum/extended_real.hpp"

namespace robustsum::kernels {

int thread_limit() {
  static const int limit = [] {
    const int hw = omp_get_max_threads();
    if (const char* env = std::getenv("ROBUSTSUM_THREADS")) {
      const int v = std::atoi(env);
      if (v > 0) return v < hw ? v : hw;
    }
    return hw;
  }();
  return limit;
}

bool lex_less(Mask a, Mask b) {
  while (a != 0 && b != 0) {
    const int la = __builtin_ctzll(a);
    const int lb = __builtin_ctzll(b);
    if (la != lb) return la < lb;
    a &= a - 1;
    b &= b - 1;
  }
  return a == 0 && b != 0;
}

std::vector<std::size_t> mask_indices(Mask m) {
  std::vector<std::size_t> out;
  while (m != 0) {
    out.push_back(static_cast<std::size_t>(__builtin_ctzll(m)) + 1);
    m &= m - 1;
  }
  return out;
}

Mask indices_mask(std::span<const std::size_t> indices) {
  Mask m = 0;
  for (std::size_t i : indices) m |= Mask{1} << (i - 1);
  return m;
}

std::vector<Mask> subset_masks(unsigned n, unsigned max_card) {
  std::vector<Mask> out;
  const Mask end = Mask{1} << n;
  for (Mask m = 1; m < end; ++m) {
    if (static_cast<unsigned>(popcount(m)) <= max_card) out.push_back(m);
  }
  return out;
}

namespace {

double subset_sum(std::span<const double> terms, Mask m, ExactAccumulator& acc) {
  acc.clear();
  while (m != 0) {
    acc.add(terms[static_cast<std::size_t>(__builtin_ctzll(m))]);
    m &= m - 1;
  }
  return acc.value();
}

}  // namespace

double max_subset_sum(std::span<const double> terms) {
  const auto end = static_cast<std::int64_t>(Mask{1} << terms.size());
  double best = -kInf;
#pragma omp parallel num_threads(thread_limit())
  {
    ExactAccumulator acc;
#pragma omp for reduction(max : best) schedule(static)
    for (std::int64_t m = 1; m < end; ++m) {
      const double s = subset_sum(terms, static_cast<Mask>(m), acc);
      if (s > best) best = s;
    }
  }
  return best;
}

double max_subset_sum_serial(std::span<const double> terms) {
  const Mask end = Mask{1} << terms.size();
  double best = -kInf;
  ExactAccumulator acc;
  for (Mask m = 1; m < end; ++m) {
    const double s = subset_sum(terms, m, acc);
    if (s > best) best = s;
  }
  return best;
}

}  // namespace robustsum::kernels
