#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace robustsum {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// A value of R ∪ {+inf}. Minus infinity only appears in classification
// outputs, never as a family term, and never enters arithmetic.
class ExtendedReal {
 public:
  constexpr ExtendedReal() = default;
  constexpr ExtendedReal(double v) : v_(v) {}  // NOLINT(google-explicit-constructor)

  static constexpr ExtendedReal plus_infinity() { return ExtendedReal(kInf); }
  static constexpr ExtendedReal minus_infinity() { return ExtendedReal(-kInf); }

  constexpr double value() const { return v_; }
  bool is_finite() const { return std::isfinite(v_); }
  constexpr bool is_plus_infinity() const { return v_ == kInf; }
  constexpr bool is_minus_infinity() const { return v_ == -kInf; }

  // +inf absorbs everything, including -inf.
  friend ExtendedReal operator+(ExtendedReal a, ExtendedReal b) {
    if (a.is_plus_infinity() || b.is_plus_infinity()) return plus_infinity();
    return ExtendedReal(a.v_ + b.v_);
  }
  friend constexpr auto operator<=>(ExtendedReal a, ExtendedReal b) { return a.v_ <=> b.v_; }
  friend constexpr bool operator==(ExtendedReal a, ExtendedReal b) { return a.v_ == b.v_; }

 private:
  double v_ = 0.0;
};

inline ExtendedReal positive_part(ExtendedReal a) {
  return a.value() > 0 ? a : ExtendedReal(0.0);
}
inline ExtendedReal negative_part(ExtendedReal a) {
  return a.value() < 0 ? ExtendedReal(-a.value()) : ExtendedReal(0.0);
}

std::string format_double(double v);

// Certified enclosure [lo, hi] of a value in R ∪ {±inf}.
struct Bracket {
  double lo = 0.0;
  double hi = 0.0;

  static Bracket exact(double v) { return {v, v}; }
  static Bracket plus_infinity() { return {kInf, kInf}; }
  static Bracket unbounded_below(double hi) { return {-kInf, hi}; }

  bool is_exact() const { return lo == hi; }
  bool is_plus_infinity() const { return lo == kInf; }
  double width() const;
  double mid() const;
  bool contains(double v, double slack = 0.0) const {
    return v >= lo - slack && v <= hi + slack;
  }
};

Bracket operator+(const Bracket& a, const Bracket& b);
Bracket operator-(const Bracket& a);
Bracket widen(const Bracket& b, int ulps = 2);
Bracket hull(const Bracket& a, const Bracket& b);

double next_up(double v, int ulps = 1);
double next_down(double v, int ulps = 1);

// Correctly rounded summation (Shewchuk partials, fsum-style final rounding).
class ExactAccumulator {
 public:
  void add(double x);
  double value() const;
  void clear() { partials_.clear(); }

 private:
  std::vector<double> partials_;
};

double exact_sum(std::span<const double> xs);
double exact_dot(std::span<const double> a, std::span<const double> b);

}  // namespace robustsum
