#pragma once

#include <vector>

namespace robustsum::lp {

enum class Status { Optimal, Infeasible, Unbounded };

struct Result {
  Status status = Status::Infeasible;
  double value = 0;
  std::vector<double> x;
};

// min c^T x  s.t.  A x = b, x >= 0. Dense two-phase simplex with Bland's rule;
// meant for the small hull problems of this library (a few rows, <= 4096 columns).
Result solve_standard(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                      const std::vector<double>& c, double eps = 1e-11);

}  // namespace robustsum::lp
