#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

inline constexpr double inf = std::numeric_limits<double>::infinity();

// Maximum subset sum by plain enumeration in long double.
inline long double max_subset_sum(const std::vector<double>& a) {
  long double best = -inf;
  const std::size_t n = a.size();
  for (std::size_t m = 1; m < (std::size_t{1} << n); ++m) {
    long double s = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (m >> i & 1) s += a[i];
    }
    best = std::max(best, s);
  }
  return best;
}

// sup over a grid of <y, x> - g(x), refined around the best point.
template <class G>
double grid_sup(G g, double y, double lo, double hi, int n = 4001) {
  double best = -inf;
  double arg = lo;
  for (int round = 0; round < 4; ++round) {
    const double h = (hi - lo) / (n - 1);
    for (int k = 0; k < n; ++k) {
      const double x = lo + h * k;
      const double v = y * x - g(x);
      if (v > best) {
        best = v;
        arg = x;
      }
    }
    lo = arg - 2 * h;
    hi = arg + 2 * h;
  }
  return best;
}

// min over a grid of g, refined around the best point.
template <class G>
double grid_min(G g, double lo, double hi, double* argmin = nullptr, int n = 2001) {
  double best = inf;
  double arg = lo;
  for (int round = 0; round < 6; ++round) {
    const double h = (hi - lo) / (n - 1);
    for (int k = 0; k < n; ++k) {
      const double x = lo + h * k;
      const double v = g(x);
      if (v < best) {
        best = v;
        arg = x;
      }
    }
    lo = arg - 2 * h;
    hi = arg + 2 * h;
  }
  if (argmin) *argmin = arg;
  return best;
}

inline std::vector<double> random_terms(std::mt19937_64& rng, std::size_t n, bool allow_inf) {
  std::uniform_int_distribution<int> pick(0, 9);
  std::uniform_int_distribution<int> small(-8, 8);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::vector<double> a(n);
  for (auto& v : a) {
    const int r = pick(rng);
    if (allow_inf && r == 0) v = inf;
    else if (r < 4) v = small(rng) / 4.0;
    else v = u(rng);
  }
  return a;
}

}  // namespace oracle
