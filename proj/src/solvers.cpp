#include "robustsum/solvers.hpp"

#include <algorithm>
#include <cmath>

#include "robustsum/errors.hpp"

namespace robustsum {

std::string_view to_string(StepRule r) {
  switch (r) {
    case StepRule::Auto: return "auto";
    case StepRule::Armijo: return "armijo";
    case StepRule::Diminishing: return "diminishing";
    case StepRule::Polyak: return "polyak";
  }
  return "?";
}

namespace {

// The limit atom must vanish on dom f: an equality for power residuals, a
// half-space for hinge residuals.
struct Constraint {
  Vector a;
  double b = 0;
  bool equality = true;
};

double norm2(std::span<const double> v) { return std::sqrt(exact_dot(v, v)); }

void project(std::optional<Constraint> const& c, Vector& x) {
  if (!c) return;
  const double r = affine_value(c->a, x, -c->b);
  if (!c->equality && r <= 0) return;
  const double aa = exact_dot(c->a, c->a);
  for (std::size_t k = 0; k < x.size(); ++k) x[k] -= r / aa * c->a[k];
  // Land exactly on the constraint when it pins a single coordinate.
  std::size_t nonzero = 0;
  std::size_t idx = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (c->a[k] != 0.0) {
      ++nonzero;
      idx = k;
    }
  }
  if (nonzero == 1) x[idx] = c->b / c->a[idx];
}

std::string coord(std::size_t k) { return "x" + std::to_string(k + 1); }

std::optional<Constraint> domain_constraint(const FunctionFamily& fam, std::vector<std::string>& notes) {
  const auto lim = fam.limit_atom();
  if (!lim || (lim->kind() != AtomKind::PowerResidual && lim->kind() != AtomKind::HingeResidual)) {
    return std::nullopt;
  }
  Constraint c{lim->slope(), lim->offset(), lim->kind() == AtomKind::PowerResidual};
  std::size_t nonzero = 0;
  std::size_t idx = 0;
  for (std::size_t k = 0; k < c.a.size(); ++k) {
    if (c.a[k] != 0.0) {
      ++nonzero;
      idx = k;
    }
  }
  if (nonzero == 0) return std::nullopt;
  std::string what;
  if (nonzero == 1 && c.equality) {
    what = "pinned " + coord(idx) + " = " + format_double(c.b / c.a[idx]);
  } else {
    what = "restricted to <a, x> " + std::string(c.equality ? "=" : "<=") + " " + format_double(c.b) + " with a = (";
    for (std::size_t k = 0; k < c.a.size(); ++k) what += (k ? ", " : "") + format_double(c.a[k]);
    what += ")";
  }
  notes.push_back(what + ": the residuals accumulate to " + lim->describe() + ", so the robust sum diverges elsewhere");
  return c;
}

std::uint64_t terms_needed(const FunctionFamily& fam, std::span<const double> x, double trunc_tol) {
  if (fam.is_finite()) return fam.size();
  const TailCertificate t = fam.generator()->pointwise_tail(x);
  if (t.pos_divergent) return 0;
  std::uint64_t n = 32;
  while (n < (std::uint64_t{1} << 12) && t.pos_tail(n).hi > trunc_tol) n *= 2;
  return n;
}

double truncated_value(const FunctionFamily& fam, std::span<const double> x, std::uint64_t N) {
  ExactAccumulator acc;
  for (std::uint64_t i = 1; i <= N; ++i) acc.add(fam.atom(i).eval(x));
  return acc.value();
}

Bracket power_root(const Bracket& v, double p) {
  if (v.is_plus_infinity()) return v;
  auto root = [p](double s) { return s <= 0 ? 0.0 : (p == 1.0 ? s : std::pow(s, 1.0 / p)); };
  const Bracket r{root(v.lo), root(v.hi)};
  return p == 1.0 ? r : widen(r, 2);
}

}  // namespace

TruncatedGradient subgradient_of_truncation(const FunctionFamily& family, std::span<const double> x,
                                            std::uint64_t N) {
  if (x.size() != family.dimension()) fail(ErrorCode::DimensionMismatch, "point has wrong dimension");
  TruncatedGradient tg;
  const std::uint64_t n = family.is_finite() ? std::min<std::uint64_t>(N, family.size()) : N;
  tg.terms = n;
  std::vector<ExactAccumulator> g(family.dimension());
  ExactAccumulator value;
  for (std::uint64_t i = 1; i <= n; ++i) {
    const FunctionAtom a = family.atom(i);
    value.add(a.eval(x));
    const Vector s = a.subgradient(x);
    for (std::size_t k = 0; k < s.size(); ++k) g[k].add(s[k]);
  }
  tg.value = value.value();
  for (auto& acc : g) tg.gradient.push_back(acc.value());
  if (family.is_finite()) {
    ExactAccumulator rest;
    for (std::uint64_t i = n + 1; i <= family.size(); ++i) rest.add(family.atom(i).eval(x));
    tg.tail_error = Bracket::exact(rest.value());
  } else {
    const TailCertificate t = family.generator()->pointwise_tail(x);
    if (t.pos_divergent) {
      tg.tail_error = Bracket::plus_infinity();
    } else {
      const Bracket pos = t.pos_tail(n);
      const Bracket neg = t.neg_tail ? t.neg_tail(n) : Bracket::exact(0.0);
      tg.tail_error = Bracket{pos.lo - neg.hi, pos.hi - neg.lo};
    }
  }
  return tg;
}

SolveResult minimize_nonneg(const FunctionFamily& fam, double p, const SolveOptions& opts) {
  if (!fam.all_nonnegative()) fail(ErrorCode::PreconditionViolated, "solver needs nonnegative atoms");
  if (!(p >= 1.0)) fail(ErrorCode::PreconditionViolated, "p must be at least 1");
  const std::size_t n = fam.dimension();
  SolveResult res;
  res.rule = opts.rule == StepRule::Auto ? (p > 1.0 ? StepRule::Armijo : StepRule::Diminishing) : opts.rule;
  if (res.rule == StepRule::Polyak && !opts.optimal_value) {
    fail(ErrorCode::PreconditionViolated, "the Polyak rule needs the optimal value");
  }
  const auto constraint = domain_constraint(fam, res.domain_notes);
  const RobustSumFunction f(std::make_shared<const FunctionFamily>(fam), opts.scalar);

  // Starting point: the requested one, then the declared domain sample.
  std::vector<Vector> starts;
  if (opts.init) {
    if (opts.init->size() != n) fail(ErrorCode::DimensionMismatch, "init has wrong dimension");
    starts.push_back(*opts.init);
  }
  if (!fam.is_finite()) {
    for (const auto& s : fam.domain_sample()) starts.push_back(s);
  }
  starts.push_back(Vector(n, 0.0));
  std::optional<Vector> x0;
  for (auto s : starts) {
    project(constraint, s);
    if (terms_needed(fam, s, opts.trunc_tol) != 0 && f.eval(s).lo < kInf) {
      x0 = s;
      break;
    }
  }
  if (!x0) fail(ErrorCode::EmptyDomain, "no sampled point has a finite objective");

  for (std::size_t k = 0; k < n; ++k) {
    for (double d : {-1e-3, 1e-3}) {
      Vector y = *x0;
      y[k] += d;
      if (terms_needed(fam, y, opts.trunc_tol) == 0 || f.eval(y).lo == kInf) {
        res.domain_notes.push_back("perturbing " + coord(k) + " by " + format_double(d) + " leaves dom f");
        break;
      }
    }
  }

  Vector x = *x0;
  Vector best = x;
  double best_value = kInf;
  double s = opts.step;
  for (std::size_t it = 1; it <= opts.max_iter; ++it) {
    res.iterations = it;
    const std::uint64_t N = terms_needed(fam, x, opts.trunc_tol);
    if (N == 0) fail(ErrorCode::EmptyDomain, "iterate left dom f");
    const TruncatedGradient tg = subgradient_of_truncation(fam, x, N);
    if (tg.value < best_value) {
      best_value = tg.value;
      best = x;
    }
    if (opts.trace) res.trace.push_back({it, x, tg.value, s});
    const double gnorm = norm2(tg.gradient);
    if (gnorm == 0.0) {
      res.converged = true;
      break;
    }
    if (res.rule == StepRule::Armijo) {
      Vector xn;
      double fn = 0;
      bool accepted = false;
      double moved = 0;
      for (; s > 1e-30; s /= 2) {
        xn = x;
        for (std::size_t k = 0; k < n; ++k) xn[k] -= s * tg.gradient[k];
        project(constraint, xn);
        Vector d(n);
        for (std::size_t k = 0; k < n; ++k) d[k] = x[k] - xn[k];
        moved = norm2(d);
        if (moved == 0.0) break;
        if (terms_needed(fam, xn, opts.trunc_tol) == 0) continue;
        fn = truncated_value(fam, xn, N);
        if (fn <= tg.value - 1e-4 * exact_dot(tg.gradient, d)) {
          accepted = true;
          break;
        }
      }
      if (!accepted || moved <= 1e-15 * (1.0 + norm2(x))) {
        res.converged = true;
        break;
      }
      const double drop = tg.value - fn;
      x = xn;
      s = std::min(2 * s, 1e6);
      if (drop <= 1e-300) {
        res.converged = true;
        break;
      }
    } else {
      double step = 0;
      if (res.rule == StepRule::Polyak) {
        const double gap = tg.value - *opts.optimal_value;
        if (gap <= opts.tol) {
          res.converged = true;
          break;
        }
        step = gap / (gnorm * gnorm);
      } else {
        step = opts.step / std::sqrt(static_cast<double>(it)) / gnorm;
      }
      for (std::size_t k = 0; k < n; ++k) x[k] -= step * tg.gradient[k];
      project(constraint, x);
      if (terms_needed(fam, x, opts.trunc_tol) == 0) x = best;
    }
  }
  if (res.rule == StepRule::Armijo && !res.converged) {
    fail(ErrorCode::NoConvergence, "no convergence after " + std::to_string(opts.max_iter) + " iterations");
  }
  if (res.rule == StepRule::Armijo) {
    best = x;
  } else {
    const std::uint64_t N = terms_needed(fam, x, opts.trunc_tol);
    if (N != 0 && truncated_value(fam, x, N) < best_value) best = x;
  }
  res.x_opt = best;
  res.objective = f.eval(best, std::min(opts.scalar.tol, 1e-12));
  res.norm = power_root(res.objective, p);
  return res;
}

SolveResult robust_regression(const FunctionFamily& cloud, double p, const SolveOptions& opts) {
  if (cloud.dimension() != 2) fail(ErrorCode::PreconditionViolated, "a regression line has two coefficients");
  const FunctionAtom first = cloud.atom(1);
  if (first.kind() != AtomKind::PowerResidual || first.power() != p) {
    fail(ErrorCode::PreconditionViolated, "cloud residuals must be |x1 + x2 t - s|^p");
  }
  return minimize_nonneg(cloud, p, opts);
}

SolveResult best_approx_solution(const FunctionFamily& system, double p, const SolveOptions& opts) {
  const FunctionAtom first = system.atom(1);
  if (first.kind() != AtomKind::HingeResidual || first.power() != p) {
    fail(ErrorCode::PreconditionViolated, "system residuals must be max(<a, x> - b, 0)^p");
  }
  return minimize_nonneg(system, p, opts);
}

}  // namespace robustsum
