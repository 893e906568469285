#include "robustsum/extended_real.hpp"

#include <algorithm>
#include <cstdio>

namespace robustsum {

std::string format_double(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  if (std::isnan(v)) return "nan";
  if (v == 0.0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double Bracket::width() const {
  if (lo == hi) return 0.0;
  return hi - lo;
}

double Bracket::mid() const {
  if (lo == hi) return lo;
  if (!std::isfinite(lo) || !std::isfinite(hi)) return std::isfinite(lo) ? hi : lo;
  return lo + (hi - lo) / 2;
}

double next_up(double v, int ulps) {
  for (int i = 0; i < ulps; ++i) v = std::nextafter(v, kInf);
  return v;
}

double next_down(double v, int ulps) {
  for (int i = 0; i < ulps; ++i) v = std::nextafter(v, -kInf);
  return v;
}

Bracket operator+(const Bracket& a, const Bracket& b) {
  if (a.is_plus_infinity() || b.is_plus_infinity()) return Bracket::plus_infinity();
  Bracket r{a.lo + b.lo, a.hi + b.hi};
  if (!(a.is_exact() && b.is_exact())) r = widen(r, 1);
  return r;
}

Bracket operator-(const Bracket& a) { return {-a.hi, -a.lo}; }

Bracket widen(const Bracket& b, int ulps) {
  return {std::isfinite(b.lo) ? next_down(b.lo, ulps) : b.lo,
          std::isfinite(b.hi) ? next_up(b.hi, ulps) : b.hi};
}

Bracket hull(const Bracket& a, const Bracket& b) {
  return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

void ExactAccumulator::add(double x) {
  std::size_t i = 0;
  for (double y : partials_) {
    if (std::fabs(x) < std::fabs(y)) std::swap(x, y);
    const double hi = x + y;
    const double lo = y - (hi - x);
    if (lo != 0.0) partials_[i++] = lo;
    x = hi;
  }
  partials_.resize(i);
  partials_.push_back(x);
}

double ExactAccumulator::value() const {
  std::size_t n = partials_.size();
  if (n == 0) return 0.0;
  double hi = partials_[--n];
  double lo = 0.0;
  while (n > 0) {
    const double x = hi;
    const double y = partials_[--n];
    hi = x + y;
    const double yr = hi - x;
    lo = y - yr;
    if (lo != 0.0) break;
  }
  // Round-half-even correction, as in CPython's math.fsum.
  if (n > 0 && ((lo < 0.0 && partials_[n - 1] < 0.0) || (lo > 0.0 && partials_[n - 1] > 0.0))) {
    const double y = lo * 2.0;
    const double x = hi + y;
    const double yr = x - hi;
    if (y == yr) hi = x;
  }
  return hi;
}

double exact_sum(std::span<const double> xs) {
  ExactAccumulator acc;
  for (double x : xs) acc.add(x);
  return acc.value();
}

double exact_dot(std::span<const double> a, std::span<const double> b) {
  ExactAccumulator acc;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    const double p = a[i] * b[i];
    acc.add(p);
    acc.add(std::fma(a[i], b[i], -p));
  }
  return acc.value();
}

}  // namespace robustsum
