#include "robustsum/theorems.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "robustsum/errors.hpp"

namespace robustsum {

std::string_view to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Consistent: return "consistent";
    case CheckStatus::CounterexampleFound: return "counterexample_found";
    case CheckStatus::Unknown: return "unknown";
  }
  return "?";
}

namespace {

std::string point(std::span<const double> v) {
  std::string s = "(";
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + format_double(v[k]);
  return s + ")";
}

Separation make_sep(std::span<const double> x, std::span<const double> xstar, double eps, Verdict l, Verdict r) {
  return Separation{Vector(x.begin(), x.end()), Vector(xstar.begin(), xstar.end()), eps, l, r};
}

std::string describe(const Separation& s, const char* lhs, const char* rhs) {
  return std::string("x = ") + point(s.x) + ", x* = " + point(s.xstar) + ", eps = " + format_double(s.eps) + ": " +
         lhs + " " + std::string(to_string(s.lhs)) + ", " + rhs + " " + std::string(to_string(s.rhs));
}

// Walks the grid comparing a larger set (lhs) against a smaller one (rhs).
struct Comparison {
  std::size_t queries = 0;
  std::size_t unknown = 0;
  std::optional<Separation> separation;   // lhs member, rhs not
  std::optional<Separation> containment;  // rhs member, lhs not: an implementation bug
};

using Oracle = std::function<Verdict(std::span<const double> x, std::span<const double> xstar, double eps)>;

void compare(Comparison& c, const Oracle& lhs, const Oracle& rhs, std::span<const double> x,
             std::span<const double> xstar, double eps) {
  const Verdict l = lhs(x, xstar, eps);
  const Verdict r = rhs(x, xstar, eps);
  ++c.queries;
  if (l == Verdict::Unknown || r == Verdict::Unknown) ++c.unknown;
  if (is_member(l) && r == Verdict::NotMember && !c.separation) c.separation = make_sep(x, xstar, eps, l, r);
  if (is_member(r) && l == Verdict::NotMember && !c.containment) c.containment = make_sep(x, xstar, eps, l, r);
}

TheoremCheck grade(const Comparison& c, Tri premise, const char* lhs, const char* rhs) {
  TheoremCheck t;
  t.premise = premise;
  t.queries = c.queries;
  t.unknown_queries = c.unknown;
  if (c.containment) {
    t.status = CheckStatus::CounterexampleFound;
    t.separation = c.containment;
    t.detail = std::string(rhs) + " not contained in " + lhs + " at " + describe(*c.containment, lhs, rhs);
    return t;
  }
  t.separation = c.separation;
  if (premise == Tri::Yes) {
    if (c.separation) {
      t.status = CheckStatus::CounterexampleFound;
      t.detail = "premise holds but the sets differ at " + describe(*c.separation, lhs, rhs);
    } else if (c.unknown > 0) {
      t.detail = std::to_string(c.unknown) + " undecided queries";
    } else {
      t.status = CheckStatus::Consistent;
      t.detail = std::string(lhs) + " = " + rhs + " on all " + std::to_string(c.queries) + " sampled queries";
    }
  } else if (premise == Tri::No) {
    if (c.separation) {
      t.status = CheckStatus::Consistent;
      t.detail = "premise fails and the sets differ at " + describe(*c.separation, lhs, rhs);
    } else {
      t.detail = "premise fails but no separating point on the grid";
    }
  } else {
    t.detail = "premise undecided";
  }
  return t;
}

Tri all_of(const DualityProblem& p, std::span<const Vector> xstars, bool strong) {
  Tri out = Tri::Yes;
  for (const auto& y : xstars) {
    const GapReport g = gap_report(p, y);
    const Tri t = strong ? g.strong_gap : g.zero_gap;
    if (t == Tri::No) return Tri::No;
    if (t == Tri::Unknown) out = Tri::Unknown;
  }
  return out;
}

Verdict subdiff(const DualityProblem& p, std::span<const double> x, std::span<const double> y, double e) {
  return eps_subdiff_membership(p, x, y, e).verdict;
}

}  // namespace

TheoremCheck theorem1_verify(const DualityProblem& p, std::span<const double> xstar, std::span<const double> eps_grid,
                             std::span<const Vector> x_sample) {
  Comparison c;
  const Oracle m = [&](auto x, auto y, double e) { return M_eps_membership(p, y, x, e).verdict; };
  const Oracle n = [&](auto x, auto y, double e) { return N_eps_membership(p, y, x, e).verdict; };
  for (double e : eps_grid) {
    for (const auto& x : x_sample) compare(c, m, n, x, xstar, e);
  }
  return grade(c, gap_report(p, xstar).zero_gap, "M^eps", "N^eps");
}

TheoremCheck theorem2_verify(const DualityProblem& p, std::span<const Vector> x_sample,
                             std::span<const Vector> xstar_sample, std::span<const double> eps_grid) {
  Comparison c;
  const Oracle d = [&](auto x, auto y, double e) { return subdiff(p, x, y, e); };
  const Oracle pi = [&](auto x, auto y, double e) { return Pi_eps_membership(p, x, y, e).verdict; };
  for (double e : eps_grid) {
    for (const auto& x : x_sample) {
      for (const auto& y : xstar_sample) compare(c, d, pi, x, y, e);
    }
  }
  return grade(c, all_of(p, xstar_sample, false), "subdiff^eps", "Pi^eps");
}

TheoremCheck theorem3_verify(const DualityProblem& p, std::span<const double> xstar, std::span<const double> eps_grid,
                             std::span<const Vector> x_sample) {
  const GapReport g = gap_report(p, xstar);
  // B^ε_{(J, parts)} depends on (J, parts) only through Σ f_i*(parts_i), and shrinks as
  // that value grows, so the best decomposition found is the only candidate to test.
  std::optional<Decomposition> d = g.strong_gap == Tri::Yes ? g.witness : p.phi(xstar).best;
  Comparison c;
  const Oracle m = [&](auto x, auto y, double e) { return M_eps_membership(p, y, x, e).verdict; };
  const Oracle b = [&](auto x, auto y, double e) {
    if (!d) return Verdict::NotMember;
    return B_eps_membership(p, y, *d, x, e).verdict;
  };
  Comparison reverse;
  for (double e : eps_grid) {
    for (const auto& x : x_sample) {
      compare(c, m, b, x, xstar, e);
      compare(reverse, b, m, x, xstar, e);
    }
  }
  TheoremCheck t = grade(c, g.strong_gap, "M^eps", "B^eps");
  t.decomposition = d;
  if (g.strong_gap == Tri::Yes && reverse.separation && t.status != CheckStatus::CounterexampleFound) {
    t.status = CheckStatus::CounterexampleFound;
    t.separation = reverse.separation;
    t.detail = "B^eps exceeds M^eps at " + describe(*reverse.separation, "B^eps", "M^eps");
  }
  if (!d && g.strong_gap == Tri::No) t.detail += "; x* has no decomposition, so every B^eps is empty";
  return t;
}

TheoremCheck theorem4_verify(const DualityProblem& p, std::span<const Vector> x_sample,
                             std::span<const Vector> xstar_sample, std::span<const double> eps_grid) {
  Comparison c;
  const Oracle d = [&](auto x, auto y, double e) { return subdiff(p, x, y, e); };
  const Oracle s = [&](auto x, auto y, double e) { return Ns_Pis_membership(p, x, y, e).verdict; };
  for (double e : eps_grid) {
    for (const auto& x : x_sample) {
      for (const auto& y : xstar_sample) compare(c, d, s, x, y, e);
    }
  }
  return grade(c, all_of(p, xstar_sample, true), "subdiff^eps", "Pi_s^eps");
}

double hausdorff(const IntervalEstimate& a, const IntervalEstimate& b) {
  if (a.empty && b.empty) return 0.0;
  if (a.empty || b.empty) return kInf;
  return std::max(std::fabs(a.lo - b.lo), std::fabs(a.hi - b.hi));
}

namespace {

IntervalEstimate locate(const std::function<Verdict(double)>& oracle, const std::vector<double>& grid) {
  IntervalEstimate iv;
  std::vector<int> in(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Verdict v = oracle(grid[k]);
    if (v == Verdict::Unknown) iv.inconclusive = true;
    in[k] = is_member(v) ? 1 : 0;
  }
  const auto first = std::find(in.begin(), in.end(), 1);
  if (first == in.end()) return iv;
  const auto last = std::find(in.rbegin(), in.rend(), 1);
  const std::size_t i0 = static_cast<std::size_t>(first - in.begin());
  const std::size_t i1 = grid.size() - 1 - static_cast<std::size_t>(last - in.rbegin());
  iv.empty = false;
  auto bisect = [&](double inside, double outside) {
    for (int it = 0; it < 60 && std::fabs(outside - inside) > 1e-12; ++it) {
      const double mid = 0.5 * (inside + outside);
      const Verdict v = oracle(mid);
      if (v == Verdict::Unknown) iv.inconclusive = true;
      (is_member(v) ? inside : outside) = mid;
    }
    return inside;
  };
  if (i0 == 0) {
    iv.lo = grid.front();
    iv.clipped_lo = true;
  } else {
    iv.lo = bisect(grid[i0], grid[i0 - 1]);
  }
  if (i1 + 1 == grid.size()) {
    iv.hi = grid.back();
    iv.clipped_hi = true;
  } else {
    iv.hi = bisect(grid[i1], grid[i1 + 1]);
  }
  return iv;
}

}  // namespace

Lemma10Report lemma10_theorem6_check(const DualityProblem& p, double x, double eps, double window_lo,
                                     double window_hi, std::size_t grid, double tol) {
  if (p.dimension() != 1) fail(ErrorCode::PreconditionViolated, "lemma10 check is one-dimensional");
  if (!p.family().all_nonnegative()) fail(ErrorCode::PreconditionViolated, "atoms must be nonnegative");
  if (!(window_lo < window_hi) || grid < 2) fail(ErrorCode::PreconditionViolated, "bad window");
  std::vector<double> ys(grid);
  for (std::size_t k = 0; k < grid; ++k) {
    ys[k] = window_lo + (window_hi - window_lo) * static_cast<double>(k) / static_cast<double>(grid - 1);
  }
  const Vector xv{x};
  Lemma10Report r;
  r.subdiff = locate([&](double y) { return eps_subdiff_membership(p, xv, Vector{y}, eps).verdict; }, ys);
  r.pi = locate([&](double y) { return Pi_eps_membership(p, xv, Vector{y}, eps).verdict; }, ys);
  r.pi_s = locate([&](double y) { return Ns_Pis_membership(p, xv, Vector{y}, eps).verdict; }, ys);
  r.hausdorff_subdiff = hausdorff(r.subdiff, r.pi_s);
  r.hausdorff_pi = hausdorff(r.pi, r.pi_s);
  const bool inconclusive = r.subdiff.inconclusive || r.pi.inconclusive || r.pi_s.inconclusive;
  if (r.hausdorff_subdiff <= tol && r.hausdorff_pi <= tol) {
    r.status = CheckStatus::Consistent;
    r.detail = "intervals agree within " + format_double(std::max(r.hausdorff_subdiff, r.hausdorff_pi));
  } else if (inconclusive) {
    r.detail = "some memberships undecided";
  } else {
    r.status = CheckStatus::CounterexampleFound;
    r.detail = "Hausdorff distances " + format_double(r.hausdorff_subdiff) + ", " + format_double(r.hausdorff_pi);
  }
  return r;
}

}  // namespace robustsum
