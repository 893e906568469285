#include "robustsum/multifunctions.hpp"

#include <algorithm>
#include <cmath>

#include "robustsum/errors.hpp"

namespace robustsum {

namespace {

void check_dims(const DualityProblem& p, std::span<const double> x, std::span<const double> xstar) {
  if (x.size() != p.dimension() || xstar.size() != p.dimension()) {
    fail(ErrorCode::DimensionMismatch, "query point has wrong dimension");
  }
}

bool origin(std::span<const double> y, double tol_eq) {
  return std::all_of(y.begin(), y.end(), [&](double v) { return std::fabs(v) <= tol_eq; });
}

double sum3(double a, double b, double c) {
  if (a == kInf || b == kInf || c == kInf) return kInf;
  if (a == -kInf || b == -kInf || c == -kInf) return -kInf;
  ExactAccumulator acc;
  acc.add(a);
  acc.add(b);
  acc.add(c);
  return acc.value();
}

Certificate verdict_only(Verdict v, std::string reason) {
  Certificate c;
  c.verdict = v;
  c.reason = std::move(reason);
  return c;
}

// f(x) + h - <x*, x> as a bracket, for h in [h.lo, h.hi].
Bracket excess(const Bracket& fx, const Bracket& h, double lin) {
  return Bracket{sum3(fx.lo, h.lo, -lin), sum3(fx.hi, h.hi, -lin)};
}

Witness split_witness(const DualityProblem& p, const Decomposition& d, std::span<const double> x,
                      double eps, double eta) {
  Witness w;
  w.J = d.J;
  w.parts = d.parts;
  EpsSplit s;
  s.eta = eta;
  ExactAccumulator total;
  for (std::size_t k = 0; k < d.J.size(); ++k) {
    const double g = p.family().atom(d.J[k]).fenchel_young_gap(x, d.parts[k], p.options().tol_eq);
    s.eps_i.push_back(g);
    total.add(-g);
  }
  total.add(eps);
  total.add(eta);
  s.alpha = std::max(0.0, total.value());
  w.split = std::move(s);
  return w;
}

Certificate subdiff_core(const DualityProblem& p, std::span<const double> x, std::span<const double> xstar,
                         double eps) {
  check_dims(p, x, xstar);
  if (eps < 0) fail(ErrorCode::PreconditionViolated, "eps must be nonnegative");
  const double tol = p.options().tol;
  const Bracket fx = p.f_value(x);
  if (fx.lo == kInf) return verdict_only(Verdict::NotMember, "x is outside dom f");
  const Bracket fs = p.conjugate(xstar).value;
  if (fs.lo == kInf) return verdict_only(Verdict::NotMember, "f*(x*) = +inf");
  const Bracket g = excess(fx, fs, exact_dot(xstar, x));
  if (g.hi <= eps + tol) return verdict_only(Verdict::Member, "f(x) + f*(x*) - <x*,x> <= " + format_double(g.hi));
  if (g.lo > eps + tol) {
    return verdict_only(Verdict::NotMember, "f(x) + f*(x*) - <x*,x> >= " + format_double(g.lo));
  }
  return verdict_only(Verdict::Unknown, "bracket [" + format_double(g.lo) + ", " + format_double(g.hi) +
                                            "] straddles eps");
}

Certificate n_core(const DualityProblem& p, std::span<const double> xstar, std::span<const double> x, double eps) {
  check_dims(p, x, xstar);
  if (eps < 0) fail(ErrorCode::PreconditionViolated, "eps must be nonnegative");
  const double tol = p.options().tol;
  const Bracket fx = p.f_value(x);
  if (fx.lo == kInf) return verdict_only(Verdict::NotMember, "x is outside dom f, so every T_f^alpha(J) misses it");
  const PhiResult phi = p.phi(xstar);
  if (phi.value.lo == kInf) return verdict_only(Verdict::NotMember, "phi(x*) = +inf: x* has no decomposition");
  const double lin = exact_dot(xstar, x);
  const Bracket val = excess(fx, phi.value, lin);
  if (val.lo > eps + tol) {
    return verdict_only(Verdict::NotMember, "f(x) + phi(x*) - <x*,x> >= " + format_double(val.lo));
  }
  if (auto d = find_decomposition(p, xstar, sum3(eps + tol, -fx.hi, lin))) {
    const double need = sum3(fx.hi, d->value, -lin);
    Certificate c;
    c.verdict = Verdict::Member;
    c.witness = split_witness(p, *d, x, eps, std::max(0.0, need - eps));
    return c;
  }
  const auto etas = eta_schedule(eps, p.options().eta_steps);
  std::optional<Decomposition> last;
  for (double eta : etas) {
    last = find_decomposition(p, xstar, sum3(eps + eta, -fx.hi, lin));
    if (!last) {
      Certificate c = verdict_only(Verdict::Unknown, "no witness found at eta = " + format_double(eta));
      c.eta_floor = eta;
      return c;
    }
  }
  Certificate c;
  c.verdict = Verdict::MemberUpTo;
  c.eta_floor = etas.empty() ? 0.0 : etas.back();
  c.witness = split_witness(p, *last, x, eps, c.eta_floor);
  c.reason = "witnesses found for every scheduled eta";
  return c;
}

}  // namespace

std::vector<double> eta_schedule(double eps, unsigned steps) {
  std::vector<double> etas;
  const double scale = std::max(eps, 1.0);
  for (unsigned k = 1; k <= steps; ++k) etas.push_back(std::ldexp(scale, -static_cast<int>(k)));
  return etas;
}

Certificate eps_subdiff_membership(const FunctionAtom& h, std::span<const double> x, std::span<const double> xstar,
                                   double eps, double tol) {
  if (x.size() != h.dimension() || xstar.size() != h.dimension()) {
    fail(ErrorCode::DimensionMismatch, "query point has wrong dimension");
  }
  if (eps < 0) fail(ErrorCode::PreconditionViolated, "eps must be nonnegative");
  const double g = h.fenchel_young_gap(x, xstar);
  if (g == kInf) return verdict_only(Verdict::NotMember, "h*(x*) = +inf");
  if (g <= eps + tol) return verdict_only(Verdict::Member, "h(x) + h*(x*) - <x*,x> = " + format_double(g));
  return verdict_only(Verdict::NotMember, "h(x) + h*(x*) - <x*,x> = " + format_double(g));
}

Certificate eps_subdiff_membership(const DualityProblem& p, std::span<const double> x,
                                   std::span<const double> xstar, double eps) {
  return subdiff_core(p, x, xstar, eps);
}

Certificate M_eps_membership(const DualityProblem& p, std::span<const double> xstar, std::span<const double> x,
                             double eps) {
  return subdiff_core(p, x, xstar, eps);
}

std::vector<std::vector<std::size_t>> S_alpha(const DualityProblem& p, std::span<const double> x, double alpha) {
  if (x.size() != p.dimension()) fail(ErrorCode::DimensionMismatch, "query point has wrong dimension");
  if (alpha < 0) fail(ErrorCode::PreconditionViolated, "alpha must be nonnegative");
  std::vector<std::vector<std::size_t>> out;
  const Bracket fx = p.f_value(x);
  if (fx.lo == kInf) return out;
  const unsigned n = p.enumerable_size();
  if (n > 20) fail(ErrorCode::SizeLimit, "subset enumeration is capped at 20 indices");
  for (kernels::Mask m : kernels::subset_masks(n, p.options().max_card)) {
    if (fx.hi <= p.subset_primal_sum(m, x) + alpha + p.options().tol) out.push_back(kernels::mask_indices(m));
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool T_alpha_membership(const DualityProblem& p, std::span<const std::size_t> J, std::span<const double> x,
                        double alpha) {
  if (x.size() != p.dimension()) fail(ErrorCode::DimensionMismatch, "query point has wrong dimension");
  if (J.empty()) fail(ErrorCode::PreconditionViolated, "J must be nonempty");
  for (std::size_t k = 0; k < J.size(); ++k) {
    if (J[k] == 0 || (k > 0 && J[k] <= J[k - 1])) fail(ErrorCode::PreconditionViolated, "J must be increasing");
  }
  const Bracket fx = p.f_value(x);
  if (fx.lo == kInf) return false;
  ExactAccumulator acc;
  for (std::size_t j : J) acc.add(p.family().atom(j).eval(x));
  return fx.hi <= acc.value() + alpha + p.options().tol;
}

Certificate N_eps_membership(const DualityProblem& p, std::span<const double> xstar, std::span<const double> x,
                             double eps) {
  return n_core(p, xstar, x, eps);
}

Certificate Pi_eps_membership(const DualityProblem& p, std::span<const double> x, std::span<const double> xstar,
                              double eps) {
  return n_core(p, xstar, x, eps);
}

std::optional<Decomposition> find_decomposition(const DualityProblem& p, std::span<const double> y, double target) {
  const PhiResult phi = p.phi(y);
  if (phi.best && phi.best->value <= target) return phi.best;
  const FunctionFamily& fam = p.family();
  if (fam.is_finite() || !fam.all_constant() || !origin(y, p.options().tol_eq)) return std::nullopt;
  // Σ_J f_i*(0) = -Σ_J c_i, so we need Σ_J c_i >= -target.
  const double need = -target;
  const auto ca = p.constants_analysis();
  if (!(need < ca.theta.lo)) return std::nullopt;
  const Vector zero(p.dimension(), 0.0);
  const ScalarFamily values = fam.pointwise(zero);
  Decomposition d;
  ExactAccumulator acc;
  double best = -kInf;
  std::size_t arg = 1;
  for (std::uint64_t i = 1; i <= p.options().budget; ++i) {
    const double v = values.term(i).value();
    if (v > best) {
      best = v;
      arg = i;
    }
    if (v > 0) {
      d.J.push_back(i);
      acc.add(v);
      if (acc.value() >= need) {
        d.parts.assign(d.J.size(), zero);
        d.value = -acc.value();
        return d;
      }
    }
    if (best >= need && acc.value() <= 0) {
      d.J = {arg};
      d.parts = {zero};
      d.value = -best;
      return d;
    }
  }
  return std::nullopt;
}

Certificate B_eps_membership(const DualityProblem& p, std::span<const double> xstar, const Decomposition& d,
                             std::span<const double> x, double eps) {
  check_dims(p, x, xstar);
  if (eps < 0) fail(ErrorCode::PreconditionViolated, "eps must be nonnegative");
  if (d.J.empty() || d.parts.size() != d.J.size()) fail(ErrorCode::PreconditionViolated, "malformed decomposition");
  const double tol = p.options().tol;
  const double tol_eq = p.options().tol_eq;
  if (!sums_to(d.parts, xstar, tol_eq)) return verdict_only(Verdict::NotMember, "parts do not sum to x*");
  const Bracket fx = p.f_value(x);
  if (fx.lo == kInf) return verdict_only(Verdict::NotMember, "x is outside dom f");
  ExactAccumulator acc;
  for (std::size_t k = 0; k < d.J.size(); ++k) {
    const double c = p.family().atom(d.J[k]).conjugate(d.parts[k], tol_eq);
    if (c == kInf) {
      return verdict_only(Verdict::NotMember, "part " + std::to_string(d.J[k]) + " lies outside dom f_i*");
    }
    acc.add(c);
  }
  Decomposition fixed = d;
  fixed.value = acc.value();
  const Bracket need = excess(fx, Bracket::exact(fixed.value), exact_dot(xstar, x));
  if (need.hi <= eps + tol) {
    Certificate c;
    c.verdict = Verdict::Member;
    c.witness = split_witness(p, fixed, x, eps, 0.0);
    return c;
  }
  if (need.lo > eps + tol) {
    return verdict_only(Verdict::NotMember, "minimal split needs " + format_double(need.lo) + " > eps");
  }
  return verdict_only(Verdict::Unknown, "f(x) bracket straddles the threshold");
}

Certificate Ns_Pis_membership(const DualityProblem& p, std::span<const double> x, std::span<const double> xstar,
                              double eps) {
  check_dims(p, x, xstar);
  if (eps < 0) fail(ErrorCode::PreconditionViolated, "eps must be nonnegative");
  const double tol = p.options().tol;
  const FunctionFamily& fam = p.family();
  const Bracket fx = p.f_value(x);
  if (fx.lo == kInf) return verdict_only(Verdict::NotMember, "x is outside dom f");
  const double lin = exact_dot(xstar, x);
  auto member = [&](const Decomposition& d) {
    Certificate c;
    c.verdict = Verdict::Member;
    const double need = sum3(fx.hi, d.value, -lin);
    c.witness = split_witness(p, d, x, eps, std::max(0.0, need - eps));
    return c;
  };
  if (!fam.is_finite() && fam.all_constant()) {
    if (!origin(xstar, p.options().tol_eq)) return verdict_only(Verdict::NotMember, "every part is forced to 0");
    if (auto d = find_decomposition(p, xstar, sum3(eps + tol, -fx.hi, lin))) return member(*d);
    const auto ca = p.constants_analysis();
    if (fx.lo - ca.theta.hi > eps + tol) {
      return verdict_only(Verdict::NotMember, "f(x) - sup_J Σ_J c_i exceeds eps");
    }
    if (ca.attained == Tri::No && std::fabs(fx.lo - eps - ca.theta.hi) <= tol) {
      return verdict_only(Verdict::NotMember, "needs a J attaining the robust sum of the constants; none among "
                                              "indices 1.." + std::to_string(p.options().scan_limit) +
                                                  " (gap >= " + format_double(ca.resolution) + ")");
    }
    return verdict_only(Verdict::Unknown, "attainment undecided");
  }
  if (fam.is_finite() && fam.size() > 20) return verdict_only(Verdict::Unknown, "more than 20 atoms");
  const auto values = p.subset_values(xstar);
  std::optional<std::pair<kernels::Mask, SubsetValue>> best;
  bool undecided = false;
  for (const auto& [m, v] : values) {
    if (v.parts && sum3(fx.hi, v.value.hi, -lin) <= eps + tol) {
      if (!best || v.value.hi < best->second.value.hi) best = std::make_pair(m, v);
    } else if (sum3(fx.lo, v.value.lo, -lin) <= eps + tol) {
      undecided = true;
    }
  }
  if (best) {
    Decomposition d;
    d.J = kernels::mask_indices(best->first);
    d.parts = *best->second.parts;
    d.value = best->second.value.hi;
    return member(d);
  }
  if (!undecided && p.enumeration_exhaustive()) {
    return verdict_only(Verdict::NotMember, "exhaustive enumeration: no (J, parts) fits within eps");
  }
  return verdict_only(Verdict::Unknown,
                      p.enumeration_exhaustive() ? "subset values straddle the threshold" : "enumeration not exhaustive");
}

bool verify_witness(const DualityProblem& p, std::span<const double> x, std::span<const double> xstar, double eps,
                    const Witness& w) {
  const double tol = p.options().tol;
  const double tol_eq = p.options().tol_eq;
  if (w.J.empty() || w.parts.size() != w.J.size() || !w.split || w.split->eps_i.size() != w.J.size()) return false;
  for (std::size_t k = 0; k < w.J.size(); ++k) {
    if (w.J[k] == 0 || (k > 0 && w.J[k] <= w.J[k - 1])) return false;
  }
  if (p.family().is_finite() && w.J.back() > p.family().size()) return false;
  for (const auto& part : w.parts) {
    if (part.size() != p.dimension()) return false;
  }
  if (!sums_to(w.parts, xstar, tol_eq)) return false;
  const EpsSplit& s = *w.split;
  if (s.alpha < -tol || s.eta < 0) return false;
  ExactAccumulator budget;
  budget.add(s.alpha);
  for (double e : s.eps_i) {
    if (e < -tol) return false;
    budget.add(e);
  }
  budget.add(-eps);
  budget.add(-s.eta);
  if (std::fabs(budget.value()) > tol_eq * std::max(1.0, eps + s.eta)) return false;
  const Bracket fx = p.f_value(x);
  if (fx.lo == kInf) return false;
  ExactAccumulator primal;
  for (std::size_t k = 0; k < w.J.size(); ++k) {
    const FunctionAtom atom = p.family().atom(w.J[k]);
    const double fi = atom.eval(x);
    primal.add(fi);
    // ε_i-subdifferential inequality, recomputed without the fast paths.
    const double c = atom.conjugate(w.parts[k], tol_eq);
    if (c == kInf) return false;
    if (sum3(fi, c, -exact_dot(w.parts[k], x)) > s.eps_i[k] + tol) {
      if (!atom.forced_conjugate()) return false;
      if (atom.fenchel_young_gap(x, w.parts[k], tol_eq) > s.eps_i[k] + tol) return false;
    }
  }
  return fx.hi <= primal.value() + s.alpha + tol;
}

}  // namespace robustsum
