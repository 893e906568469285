#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "robustsum/multifunctions.hpp"

namespace robustsum {

enum class CheckStatus { Consistent, CounterexampleFound, Unknown };
std::string_view to_string(CheckStatus s);

struct Separation {
  Vector x;
  Vector xstar;
  double eps = 0;
  Verdict lhs = Verdict::Unknown;
  Verdict rhs = Verdict::Unknown;
};

struct TheoremCheck {
  CheckStatus status = CheckStatus::Unknown;
  Tri premise = Tri::Unknown;  // zero gap, stable zero gap, strong, stable strong
  std::size_t queries = 0;
  std::size_t unknown_queries = 0;
  std::optional<Separation> separation;
  std::optional<Decomposition> decomposition;  // the (J, parts) used for B^ε
  std::string detail;
};

// M^ε f(x*) = N^ε f(x*) for all ε  ⟺  zero gap at x*
TheoremCheck theorem1_verify(const DualityProblem& p, std::span<const double> xstar, std::span<const double> eps_grid,
                             std::span<const Vector> x_sample);
// ∂^ε f(x) = Π^ε f(x) for all x, ε  ⟺  zero gap at every x*
TheoremCheck theorem2_verify(const DualityProblem& p, std::span<const Vector> x_sample,
                             std::span<const Vector> xstar_sample, std::span<const double> eps_grid);
// M^ε f(x*) = B^ε_{(J, parts)} f(x*) for all ε, for one (J, parts)  ⟺  strong zero gap at x*
TheoremCheck theorem3_verify(const DualityProblem& p, std::span<const double> xstar, std::span<const double> eps_grid,
                             std::span<const Vector> x_sample);
// ∂^ε f(x) = Π_s^ε f(x) for all x, ε  ⟺  strong zero gap at every x*
TheoremCheck theorem4_verify(const DualityProblem& p, std::span<const Vector> x_sample,
                             std::span<const Vector> xstar_sample, std::span<const double> eps_grid);

struct IntervalEstimate {
  bool empty = true;
  double lo = 0;
  double hi = 0;
  bool clipped_lo = false;
  bool clipped_hi = false;
  bool inconclusive = false;
};

struct Lemma10Report {
  CheckStatus status = CheckStatus::Unknown;
  IntervalEstimate subdiff;  // ∂^ε f(x)
  IntervalEstimate pi;       // Π^ε f(x)
  IntervalEstimate pi_s;     // closure of Π_s^ε f(x)
  double hausdorff_subdiff = 0;
  double hausdorff_pi = 0;
  std::string detail;
};

// One-dimensional nonnegative families: compares ∂^ε f(x) and Π^ε f(x) with the
// closure of Π_s^ε f(x) inside [window_lo, window_hi].
Lemma10Report lemma10_theorem6_check(const DualityProblem& p, double x, double eps, double window_lo,
                                     double window_hi, std::size_t grid = 81, double tol = 1e-6);

double hausdorff(const IntervalEstimate& a, const IntervalEstimate& b);

}  // namespace robustsum
