#include "robustsum/lp.hpp"

#include <cmath>
#include <limits>

#include "robustsum/errors.hpp"

namespace robustsum::lp {

namespace {

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : m_(rows), n_(cols), t_((rows + 1) * (cols + 1), 0.0) {}

  double& at(std::size_t r, std::size_t c) { return t_[r * (n_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, n_); }
  double& obj(std::size_t c) { return at(m_, c); }

  void pivot(std::size_t pr, std::size_t pc) {
    const double p = at(pr, pc);
    for (std::size_t c = 0; c <= n_; ++c) at(pr, c) /= p;
    for (std::size_t r = 0; r <= m_; ++r) {
      if (r == pr) continue;
      const double f = at(r, pc);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c <= n_; ++c) at(r, c) -= f * at(pr, c);
    }
  }

  std::size_t rows() const { return m_; }
  std::size_t cols() const { return n_; }

 private:
  std::size_t m_;
  std::size_t n_;
  std::vector<double> t_;
};

// Minimizes the objective row over columns < allowed. Returns false if unbounded.
bool run_simplex(Tableau& t, std::vector<std::size_t>& basis, std::size_t allowed, double eps) {
  for (int iter = 0; iter < 100000; ++iter) {
    std::size_t enter = allowed;
    for (std::size_t c = 0; c < allowed; ++c) {
      if (t.obj(c) < -eps) {
        enter = c;  // Bland: smallest index
        break;
      }
    }
    if (enter == allowed) return true;
    std::size_t leave = t.rows();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < t.rows(); ++r) {
      const double a = t.at(r, enter);
      if (a > eps) {
        const double ratio = t.rhs(r) / a;
        if (ratio < best - eps || (std::fabs(ratio - best) <= eps && basis[r] < basis[leave])) {
          best = ratio;
          leave = r;
        }
      }
    }
    if (leave == t.rows()) return false;
    t.pivot(leave, enter);
    basis[leave] = enter;
  }
  fail(ErrorCode::NoConvergence, "simplex iteration limit");
}

}  // namespace

Result solve_standard(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                      const std::vector<double>& c, double eps) {
  const std::size_t m = A.size();
  const std::size_t n = c.size();
  for (const auto& row : A) {
    if (row.size() != n) fail(ErrorCode::DimensionMismatch, "LP row size mismatch");
  }
  if (b.size() != m) fail(ErrorCode::DimensionMismatch, "LP rhs size mismatch");
  // Columns: n structural, m artificial.
  Tableau t(m, n + m);
  std::vector<std::size_t> basis(m + 1);
  for (std::size_t r = 0; r < m; ++r) {
    const double sign = b[r] < 0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n; ++j) t.at(r, j) = sign * A[r][j];
    t.at(r, n + r) = 1.0;
    t.rhs(r) = sign * b[r];
    basis[r] = n + r;
  }
  basis[m] = n + m;  // sentinel for tie-breaking
  // Phase one: minimize the sum of artificials.
  for (std::size_t j = 0; j <= n + m; ++j) {
    double s = 0;
    if (j < n || j == n + m) {
      for (std::size_t r = 0; r < m; ++r) s += (j == n + m) ? t.rhs(r) : t.at(r, j);
      t.obj(j) = -s;
    }
  }
  run_simplex(t, basis, n + m, eps);
  Result res;
  if (-t.obj(n + m) > 1e-9) {
    res.status = Status::Infeasible;
    return res;
  }
  // Drive artificials out of the basis where possible.
  for (std::size_t r = 0; r < m; ++r) {
    if (basis[r] < n) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (std::fabs(t.at(r, j)) > eps) {
        t.pivot(r, j);
        basis[r] = j;
        break;
      }
    }
  }
  // Phase two objective in terms of the current basis.
  for (std::size_t j = 0; j <= n + m; ++j) t.obj(j) = 0.0;
  for (std::size_t j = 0; j < n; ++j) t.obj(j) = c[j];
  for (std::size_t r = 0; r < m; ++r) {
    if (basis[r] >= n) continue;
    const double f = t.obj(basis[r]);
    if (f == 0.0) continue;
    for (std::size_t j = 0; j <= n + m; ++j) t.obj(j) -= f * t.at(r, j);
  }
  // Artificial columns stay excluded from entering.
  if (!run_simplex(t, basis, n, eps)) {
    res.status = Status::Unbounded;
    return res;
  }
  res.status = Status::Optimal;
  res.x.assign(n, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    if (basis[r] < n) res.x[basis[r]] = t.rhs(r);
  }
  double v = 0;
  for (std::size_t j = 0; j < n; ++j) v += c[j] * res.x[j];
  res.value = v;
  return res;
}

}  // namespace robustsum::lp
