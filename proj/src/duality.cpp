#include "robustsum/duality.hpp"

#include <algorithm>
#include <cmath>

#include "robustsum/errors.hpp"
#include "robustsum/lp.hpp"

namespace robustsum {

std::string_view to_string(Tri t) {
  switch (t) {
    case Tri::Yes: return "yes";
    case Tri::No: return "no";
    case Tri::Unknown: return "unknown";
  }
  return "?";
}

bool decomposition_valid(const Decomposition& d, std::span<const double> xstar, double tol_eq) {
  if (d.J.empty() || d.J.size() != d.parts.size()) return false;
  for (std::size_t k = 1; k < d.J.size(); ++k) {
    if (d.J[k] <= d.J[k - 1]) return false;
  }
  return sums_to(d.parts, xstar, tol_eq);
}

namespace {

// f = max over nonempty J of <A_J, x> - T_J, so f*(y) is the least T-combination
// of generators whose A-combination is y.
ConjugateEstimate polyhedral_conjugate(const FunctionFamily& fam, std::span<const double> y) {
  const std::size_t n = fam.dimension();
  const auto masks = kernels::subset_masks(static_cast<unsigned>(fam.size()), 64);
  std::vector<std::vector<double>> A(n + 1, std::vector<double>(masks.size()));
  std::vector<double> b(y.begin(), y.end());
  b.push_back(1.0);
  std::vector<double> c(masks.size());
  for (std::size_t j = 0; j < masks.size(); ++j) {
    std::vector<ExactAccumulator> a(n);
    ExactAccumulator t;
    for (std::size_t i : kernels::mask_indices(masks[j])) {
      const FunctionAtom& atom = fam.atoms()[i - 1];
      const Vector p = atom.forced_point();
      for (std::size_t k = 0; k < n; ++k) a[k].add(p[k]);
      t.add(atom.conjugate(p));
    }
    for (std::size_t k = 0; k < n; ++k) A[k][j] = a[k].value();
    A[n][j] = 1.0;
    c[j] = t.value();
  }
  const lp::Result res = lp::solve_standard(A, b, c);
  ConjugateEstimate e;
  e.mode = "polyhedral";
  if (res.status == lp::Status::Infeasible) {
    e.value = Bracket::plus_infinity();
    e.status = SupStatus::Escape;
    e.lower = kInf;
    return e;
  }
  const double slack = 1e-12 * (1.0 + std::fabs(res.value));
  e.value = Bracket{res.value - slack, res.value + slack};
  e.lower = e.value.lo;
  return e;
}

bool is_origin(std::span<const double> y, double tol_eq) {
  return std::all_of(y.begin(), y.end(), [&](double v) { return std::fabs(v) <= tol_eq; });
}

std::string fmt(double v) { return format_double(v); }

}  // namespace

DualityProblem::DualityProblem(std::shared_ptr<const FunctionFamily> family, DualityOptions opts)
    : family_(std::move(family)), opts_(opts), f_(family_, ScalarOptions{opts.tol, opts.budget}) {
  opts_.infconv.tol_eq = opts_.tol_eq;
}

unsigned DualityProblem::enumerable_size() const {
  if (family_->is_finite()) return static_cast<unsigned>(family_->size());
  return std::min(opts_.scan_limit, 16u);
}

bool DualityProblem::enumeration_exhaustive() const {
  return family_->is_finite() && opts_.max_card >= family_->size();
}

std::vector<FunctionAtom> DualityProblem::subset_atoms(kernels::Mask m) const {
  std::vector<FunctionAtom> atoms;
  for (std::size_t i : kernels::mask_indices(m)) atoms.push_back(family_->atom(i));
  return atoms;
}

SubsetValue DualityProblem::subset_value(kernels::Mask m, std::span<const double> y) const {
  std::pair<kernels::Mask, Vector> key{m, Vector(y.begin(), y.end())};
  {
    std::lock_guard lock(mu_);
    if (auto it = subset_cache_.find(key); it != subset_cache_.end()) return it->second;
  }
  const auto atoms = subset_atoms(m);
  SubsetValue v = inf_convolution(atoms, y, opts_.infconv);
  std::lock_guard lock(mu_);
  if (subset_cache_.size() > 500000) subset_cache_.clear();
  subset_cache_.emplace(std::move(key), v);
  return v;
}

std::vector<std::pair<kernels::Mask, SubsetValue>> DualityProblem::subset_values(
    std::span<const double> y, bool parallel) const {
  const unsigned n = enumerable_size();
  if (n > 20) fail(ErrorCode::SizeLimit, "subset enumeration is capped at 20 indices");
  const auto masks = kernels::subset_masks(n, opts_.max_card);
  const Vector yv(y.begin(), y.end());
  auto fn = [&](kernels::Mask m) { return subset_value(m, yv); };
  const auto values = parallel ? kernels::map_subsets<SubsetValue>(masks, fn)
                               : kernels::map_subsets_serial<SubsetValue>(masks, fn);
  std::vector<std::pair<kernels::Mask, SubsetValue>> out;
  out.reserve(masks.size());
  for (std::size_t k = 0; k < masks.size(); ++k) out.emplace_back(masks[k], values[k]);
  return out;
}

double DualityProblem::subset_primal_sum(kernels::Mask m, std::span<const double> x) const {
  ExactAccumulator acc;
  for (std::size_t i : kernels::mask_indices(m)) acc.add(family_->atom(i).eval(x));
  return acc.value();
}

DualityProblem::ConstantsAnalysis DualityProblem::constants_analysis() const {
  {
    std::lock_guard lock(mu_);
    if (constants_) return *constants_;
  }
  if (!family_->all_constant()) fail(ErrorCode::PreconditionViolated, "family is not constant");
  const Vector zero(dimension(), 0.0);
  ConstantsAnalysis ca;
  ca.theta = f_.eval(zero);
  const ScalarFamily values = family_->pointwise(zero);
  const std::size_t K = family_->is_finite() ? family_->size() : opts_.scan_limit;
  std::vector<double> v(K);
  for (std::size_t i = 1; i <= K; ++i) v[i - 1] = values.term(i).value();
  const std::size_t arg = static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin()) + 1;
  const SupResult sup = sup_scalar(values, ScalarOptions{opts_.tol, opts_.budget});
  ExactAccumulator acc;
  if (sup.sign != SignVerdict::NonPositive) {
    for (std::size_t i = 1; i <= K; ++i) {
      if (v[i - 1] > 0) {
        ca.best_J.push_back(i);
        acc.add(v[i - 1]);
      }
    }
  }
  if (ca.best_J.empty()) {
    ca.best_J = {arg};
    acc.add(v[arg - 1]);
  }
  ca.best_sum = acc.value();
  if (family_->is_finite()) {
    ca.attained = Tri::Yes;
  } else if (ca.theta.is_exact() && ca.best_sum == ca.theta.lo) {
    ca.attained = Tri::Yes;
  } else if (values.tail()) {
    const TailCertificate& t = *values.tail();
    if (sup.sign != SignVerdict::NonPositive && t.pos_tail && !t.pos_divergent) {
      const Bracket rest = t.pos_tail(K);
      if (rest.hi == 0.0) {
        ca.attained = Tri::Yes;
      } else if (rest.lo > opts_.attain_tol) {
        ca.attained = Tri::No;
        ca.resolution = rest.lo;
      }
    } else if (sup.sign == SignVerdict::NonPositive && t.tail_sup) {
      const Bracket rest = t.tail_sup(K);
      if (rest.hi <= v[arg - 1]) {
        ca.attained = Tri::Yes;
      } else if (rest.lo > v[arg - 1] + opts_.attain_tol) {
        ca.attained = Tri::No;
        ca.resolution = rest.lo - v[arg - 1];
      }
    }
  }
  std::lock_guard lock(mu_);
  constants_ = ca;
  return ca;
}

ConjugateEstimate DualityProblem::conjugate(std::span<const double> y) const {
  if (y.size() != dimension()) fail(ErrorCode::DimensionMismatch, "dual point has wrong dimension");
  const Vector key(y.begin(), y.end());
  {
    std::lock_guard lock(mu_);
    if (auto it = conj_cache_.find(key); it != conj_cache_.end()) return it->second;
  }
  ConjugateEstimate e;
  if (family_->all_constant()) {
    e.mode = "analytic";
    if (!is_origin(y, opts_.tol_eq)) {
      e.value = Bracket::plus_infinity();
      e.status = SupStatus::Escape;
    } else {
      const Bracket theta = constants_analysis().theta;
      e.value = -theta;
      e.lower = e.value.lo;
      e.argmax = Vector(dimension(), 0.0);
    }
  } else if (family_->is_finite() && family_->all_forced() && family_->size() <= 12) {
    e = polyhedral_conjugate(*family_, y);
  } else {
    e = conjugate_numeric(f_, y, opts_.conj);
  }
  std::lock_guard lock(mu_);
  conj_cache_.emplace(key, e);
  return e;
}

PhiResult DualityProblem::phi(std::span<const double> y) const {
  if (y.size() != dimension()) fail(ErrorCode::DimensionMismatch, "dual point has wrong dimension");
  const Vector key(y.begin(), y.end());
  {
    std::lock_guard lock(mu_);
    if (auto it = phi_cache_.find(key); it != phi_cache_.end()) return it->second;
  }
  PhiResult r = phi_uncached(y);
  std::lock_guard lock(mu_);
  phi_cache_.emplace(key, r);
  return r;
}

PhiResult DualityProblem::phi_uncached(std::span<const double> y) const {
  PhiResult r;
  if (family_->all_constant()) {
    r.mode = "constants";
    r.exhaustive = true;
    if (!is_origin(y, opts_.tol_eq)) {
      r.value = Bracket::plus_infinity();
      r.attained = Tri::Yes;
      r.note = "every part of a constant atom is 0, so no decomposition reaches x*";
      return r;
    }
    const ConstantsAnalysis ca = constants_analysis();
    r.value = -ca.theta;
    Decomposition d;
    d.J = ca.best_J;
    d.parts.assign(d.J.size(), Vector(dimension(), 0.0));
    d.value = -ca.best_sum;
    r.best = d;
    r.attained = ca.attained;
    r.resolution = ca.resolution;
    r.exhaustive = family_->is_finite();
    if (!family_->is_finite()) {
      r.note = "phi(0) = -(robust sum of the constants); attainment checked over indices 1.." +
               std::to_string(opts_.scan_limit);
    }
    return r;
  }
  const unsigned n = enumerable_size();
  if (family_->is_finite() && n > 20) {
    r.mode = "budget";
    r.value = Bracket{-kInf, kInf};
    r.note = "more than 20 atoms: subset enumeration skipped";
    return r;
  }
  r.mode = family_->is_finite() ? "enumeration" : "scan";
  r.exhaustive = enumeration_exhaustive();
  const auto values = subset_values(y);
  double lo = kInf;
  double hi = kInf;
  std::optional<std::pair<kernels::Mask, SubsetValue>> best;
  for (const auto& [m, v] : values) {
    lo = std::min(lo, v.value.lo);
    if (!v.parts) continue;
    if (!best || v.value.hi < best->second.value.hi ||
        (v.value.hi == best->second.value.hi &&
         (kernels::popcount(m) < kernels::popcount(best->first) ||
          (kernels::popcount(m) == kernels::popcount(best->first) && kernels::lex_less(m, best->first))))) {
      best = std::make_pair(m, v);
    }
  }
  if (best) hi = best->second.value.hi;
  for (const auto& [m, v] : values) {
    if (!v.parts) hi = std::min(hi, v.value.hi);
  }
  if (!r.exhaustive) lo = -kInf;
  r.value = Bracket{std::min(lo, hi), hi};
  if (best) {
    Decomposition d;
    d.J = kernels::mask_indices(best->first);
    d.parts = *best->second.parts;
    d.value = best->second.value.hi;
    r.best = d;
  }
  if (r.exhaustive) {
    r.attained = (r.value.is_plus_infinity() || best) ? Tri::Yes : Tri::Unknown;
  } else {
    r.note = family_->is_finite()
                 ? "subsets larger than max_card were not examined"
                 : "countable family: subsets of the first " + std::to_string(n) +
                       " indices scanned; lower bound not certified";
  }
  return r;
}

PhiResult phi_eval(const DualityProblem& problem, std::span<const double> xstar) {
  return problem.phi(xstar);
}

GapReport gap_report(const DualityProblem& problem, std::span<const double> xstar) {
  const double tol = problem.options().tol;
  GapReport g;
  g.xstar.assign(xstar.begin(), xstar.end());
  const ConjugateEstimate conj = problem.conjugate(xstar);
  const PhiResult phi = problem.phi(xstar);
  g.conjugate = conj.value;
  g.conjugate_status = conj.mode == "numeric" ? std::string(to_string(conj.status)) : conj.mode;
  g.phi = phi.value;
  g.phi_mode = phi.mode;
  g.primal = -conj.value;
  g.dual = -phi.value;
  const double a = conj.value.lo;
  const double b = conj.value.hi;
  const double c = phi.value.lo;
  const double d = phi.value.hi;
  if (conj.status == SupStatus::Plateau && conj.mode == "numeric") {
    g.certificates.push_back("f* upper bound limited to the search box (plateau)");
  }
  if (a == kInf) {
    g.zero_gap = Tri::Yes;
    g.certificates.push_back(conj.mode == "numeric" ? "f*(x*) = +inf (linear growth), hence phi(x*) = +inf"
                                                    : "f*(x*) = +inf (" + conj.mode + "), hence phi(x*) = +inf");
  } else if (b < kInf && c == kInf) {
    g.zero_gap = Tri::No;
    g.certificates.push_back("phi(x*) = +inf while f*(x*) <= " + fmt(b));
  } else if (b < kInf && d < kInf && d - a <= tol) {
    g.zero_gap = Tri::Yes;
    g.certificates.push_back("|phi(x*) - f*(x*)| <= " + fmt(d - a));
  } else if (b < kInf && c > -kInf && c - b > tol) {
    g.zero_gap = Tri::No;
    g.certificates.push_back("phi(x*) - f*(x*) >= " + fmt(c - b));
  }
  if (g.zero_gap == Tri::No) {
    g.strong_gap = Tri::No;
  } else if (g.zero_gap == Tri::Yes) {
    if (a == kInf) {
      Decomposition w;
      w.J = {1};
      w.parts = {g.xstar};
      w.value = problem.family().atom(1).conjugate(g.xstar, problem.options().tol_eq);
      g.witness = w;
      g.strong_gap = Tri::Yes;
    } else if (phi.attained == Tri::No) {
      g.strong_gap = Tri::No;
      g.certificates.push_back("no subset of indices 1.." + std::to_string(problem.options().scan_limit) +
                               " attains phi(x*); attainment gap >= " + fmt(phi.resolution));
    } else if (phi.best && phi.best->value <= b + problem.options().attain_tol) {
      g.witness = phi.best;
      g.strong_gap = Tri::Yes;
      g.certificates.push_back("decomposition attains f*(x*) within " + fmt(std::max(0.0, phi.best->value - a)));
    } else if (phi.exhaustive && phi.attained == Tri::Yes && phi.best && phi.best->value > b + tol) {
      g.strong_gap = Tri::No;
      g.certificates.push_back("exhaustive enumeration: best decomposition misses f*(x*) by " +
                               fmt(phi.best->value - b));
    }
  }
  if (!phi.note.empty()) g.certificates.push_back(phi.note);
  return g;
}

bool weak_duality_check(const GapReport& report, double tol) {
  if (report.conjugate.hi == -kInf) return false;
  return !(report.conjugate.lo > report.phi.hi + tol);
}

}  // namespace robustsum
