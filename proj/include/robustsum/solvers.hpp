#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "robustsum/function_family.hpp"

namespace robustsum {

enum class StepRule { Auto, Armijo, Diminishing, Polyak };
std::string_view to_string(StepRule r);

struct SolveOptions {
  std::optional<Vector> init;
  StepRule rule = StepRule::Auto;  // Armijo for p > 1, diminishing c/sqrt(k) for p = 1
  double step = 1.0;
  std::size_t max_iter = 20000;
  double tol = 1e-8;       // objective
  double arg_tol = 1e-6;   // argument
  std::optional<double> optimal_value;  // needed by the Polyak rule
  double trunc_tol = 1e-13;  // tail bound targeted by the gradient truncation
  bool trace = false;
  ScalarOptions scalar;
};

struct TraceRow {
  std::size_t iteration = 0;
  Vector x;
  double objective = 0;
  double step = 0;
};

struct SolveResult {
  Vector x_opt;
  Bracket objective;  // Σᴿ f_i(x_opt)
  Bracket norm;       // objective^(1/p)
  std::size_t iterations = 0;
  bool converged = false;
  StepRule rule = StepRule::Auto;
  std::vector<std::string> domain_notes;
  std::vector<TraceRow> trace;
};

struct TruncatedGradient {
  Vector gradient;     // of Σ_{i<=N} f_i at x
  double value = 0;    // Σ_{i<=N} f_i(x)
  Bracket tail_error;  // Σ_{i>N} f_i(x)
  std::uint64_t terms = 0;
};

TruncatedGradient subgradient_of_truncation(const FunctionFamily& family, std::span<const double> x,
                                            std::uint64_t N);

// Minimizes Σᴿ |x1 + x2 t_i - s_i|^p over a (finite or named) point cloud family.
SolveResult robust_regression(const FunctionFamily& cloud, double p, const SolveOptions& opts = {});
// Minimizes Σᴿ max(<a_i, x> - b_i, 0)^p over a hinge family.
SolveResult best_approx_solution(const FunctionFamily& system, double p, const SolveOptions& opts = {});
// Shared driver for nonnegative families.
SolveResult minimize_nonneg(const FunctionFamily& family, double p, const SolveOptions& opts);

}  // namespace robustsum
