#include "robustsum/epi_union.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "robustsum/errors.hpp"
#include "robustsum/lp.hpp"

namespace robustsum {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Member: return "member";
    case Verdict::MemberUpTo: return "member_up_to";
    case Verdict::NotMember: return "not_member";
    case Verdict::Unknown: return "unknown";
  }
  return "?";
}

std::string_view to_string(EpiUnionSet::Mode m) {
  switch (m) {
    case EpiUnionSet::Mode::FiniteAffine: return "finite_affine";
    case EpiUnionSet::Mode::Constants: return "constants";
    case EpiUnionSet::Mode::General: return "general";
  }
  return "?";
}

std::string_view to_string(Closedness c) {
  switch (c) {
    case Closedness::Holds: return "holds";
    case Closedness::Fails: return "fails";
    case Closedness::Unknown: return "unknown";
  }
  return "?";
}

EpiUnionSet::EpiUnionSet(const DualityProblem& problem) : problem_(problem) {
  const FunctionFamily& fam = problem.family();
  if (fam.is_finite() && fam.all_forced() && fam.size() <= 20) {
    mode_ = Mode::FiniteAffine;
  } else if (fam.all_constant()) {
    mode_ = Mode::Constants;
  }
  if (mode_ == Mode::FiniteAffine && fam.size() <= 12) {
    const std::size_t n = fam.dimension();
    for (kernels::Mask m : kernels::subset_masks(static_cast<unsigned>(fam.size()), 64)) {
      Generator g;
      g.J = m;
      g.A.assign(n, 0.0);
      ExactAccumulator t;
      std::vector<ExactAccumulator> a(n);
      for (std::size_t i : kernels::mask_indices(m)) {
        const FunctionAtom& atom = fam.atoms()[i - 1];
        const Vector p = atom.forced_point();
        for (std::size_t k = 0; k < n; ++k) a[k].add(p[k]);
        t.add(atom.conjugate(p));
      }
      for (std::size_t k = 0; k < n; ++k) g.A[k] = a[k].value();
      g.T = t.value();
      generators_.push_back(std::move(g));
    }
  }
}

std::optional<double> EpiUnionSet::hull_min(std::span<const double> y) const {
  if (mode_ != Mode::FiniteAffine || generators_.empty()) return std::nullopt;
  const std::size_t n = problem_.dimension();
  std::vector<std::vector<double>> A(n + 1, std::vector<double>(generators_.size()));
  std::vector<double> b(n + 1);
  std::vector<double> c(generators_.size());
  for (std::size_t j = 0; j < generators_.size(); ++j) {
    for (std::size_t k = 0; k < n; ++k) A[k][j] = generators_[j].A[k];
    A[n][j] = 1.0;
    c[j] = generators_[j].T;
  }
  for (std::size_t k = 0; k < n; ++k) b[k] = y[k];
  b[n] = 1.0;
  const lp::Result res = lp::solve_standard(A, b, c);
  if (res.status == lp::Status::Infeasible) return kInf;
  if (res.status == lp::Status::Unbounded) return -kInf;
  return res.value;
}

std::optional<double> EpiUnionSet::phi_conjugate(std::span<const double> x) const {
  if (mode_ != Mode::FiniteAffine || generators_.empty()) return std::nullopt;
  double best = -kInf;
  for (const auto& g : generators_) best = std::max(best, affine_value(g.A, x, -g.T));
  return best;
}

namespace {

Witness epi_witness(const DualityProblem& p, const Decomposition& d, double r) {
  Witness w;
  w.J = d.J;
  w.parts = d.parts;
  const double share = (r - d.value) / static_cast<double>(d.J.size());
  for (std::size_t k = 0; k < d.J.size(); ++k) {
    w.r_parts.push_back(p.family().atom(d.J[k]).conjugate(d.parts[k], p.options().tol_eq) + share);
  }
  return w;
}

bool origin(std::span<const double> y, double tol_eq) {
  return std::all_of(y.begin(), y.end(), [&](double v) { return std::fabs(v) <= tol_eq; });
}

Certificate constants_membership(const DualityProblem& p, std::span<const double> y, double r) {
  Certificate c;
  if (!origin(y, p.options().tol_eq)) {
    c.verdict = Verdict::NotMember;
    c.reason = "every epi f_i* lies over x* = 0";
    return c;
  }
  const auto ca = p.constants_analysis();
  const double need = -r;  // some J with Σ_J f_i >= -r
  if (need > ca.theta.hi) {
    c.verdict = Verdict::NotMember;
    c.reason = "-r exceeds the robust sum of the constants";
    return c;
  }
  auto member = [&](std::vector<std::size_t> J, double sum) {
    Decomposition d;
    d.J = std::move(J);
    d.parts.assign(d.J.size(), Vector(p.dimension(), 0.0));
    d.value = -sum;
    c.verdict = Verdict::Member;
    c.witness = epi_witness(p, d, r);
    return c;
  };
  if (ca.best_sum >= need) return member(ca.best_J, ca.best_sum);
  if (need < ca.theta.lo) {
    // Some finite J gets past -r; grow the positive prefix until it does.
    const Vector zero(p.dimension(), 0.0);
    const ScalarFamily values = p.family().pointwise(zero);
    std::vector<std::size_t> J;
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
        J.push_back(i);
        acc.add(v);
        if (acc.value() >= need) return member(J, acc.value());
      }
      if (best >= need) return member({arg}, best);
    }
    c.reason = "term budget exhausted";
    return c;
  }
  if (ca.attained == Tri::No) {
    c.verdict = Verdict::NotMember;
    c.reason = "-r equals the unattained robust sum; no subset of indices 1.." +
               std::to_string(p.options().scan_limit) + " reaches it (gap >= " +
               format_double(ca.resolution) + ")";
    return c;
  }
  c.reason = "attainment of the robust sum undecided";
  return c;
}

}  // namespace

Certificate epi_union_membership(const EpiUnionSet& A, std::span<const double> y, double r) {
  const DualityProblem& p = A.problem();
  if (A.mode() == EpiUnionSet::Mode::Constants) return constants_membership(p, y, r);
  Certificate c;
  if (p.family().is_finite() && p.family().size() > 20) {
    c.reason = "more than 20 atoms";
    return c;
  }
  const auto values = p.subset_values(y);
  bool undecided = false;
  std::optional<std::pair<kernels::Mask, SubsetValue>> best;
  for (const auto& [m, v] : values) {
    if (v.parts && v.value.hi <= r) {
      if (!best || v.value.hi < best->second.value.hi) best = std::make_pair(m, v);
    } else if (v.value.lo <= r) {
      undecided = true;
    }
  }
  if (best) {
    Decomposition d;
    d.J = kernels::mask_indices(best->first);
    d.parts = *best->second.parts;
    d.value = best->second.value.hi;
    c.verdict = Verdict::Member;
    c.witness = epi_witness(p, d, r);
    return c;
  }
  if (!undecided && p.enumeration_exhaustive()) {
    c.verdict = Verdict::NotMember;
    c.reason = "exhaustive enumeration: every subset has phi_J(x*) > r";
    return c;
  }
  c.reason = p.enumeration_exhaustive() ? "subset values straddle r" : "enumeration not exhaustive";
  return c;
}

ClosedRegardingResult closed_convex_regarding(const EpiUnionSet& A, std::span<const double> y, double tol) {
  const DualityProblem& p = A.problem();
  ClosedRegardingResult res;
  if (A.mode() == EpiUnionSet::Mode::Constants) {
    if (!origin(y, p.options().tol_eq)) {
      res.verdict = Closedness::Holds;
      res.hull_min = kInf;
      res.phi = Bracket::plus_infinity();
      res.note = "the vertical line misses both A and its closed convex hull";
      return res;
    }
    const auto ca = p.constants_analysis();
    res.phi = -ca.theta;
    res.hull_min = -ca.theta.hi;
    if (ca.attained == Tri::Yes) {
      res.verdict = Closedness::Holds;
      res.note = "the robust sum of the constants is attained by a finite J";
    } else if (ca.attained == Tri::No) {
      res.verdict = Closedness::Fails;
      res.note = "robust sum not attained by any J within indices 1.." +
                 std::to_string(p.options().scan_limit) + " (gap >= " + format_double(ca.resolution) + ")";
    } else {
      res.note = "attainment undecided";
    }
    return res;
  }
  const auto hm = A.hull_min(y);
  if (!hm || !p.enumeration_exhaustive()) {
    res.note = "closed convex hull only computed for finite affine families with at most 12 atoms";
    return res;
  }
  res.hull_min = *hm;
  res.phi = p.phi(y).value;
  if (*hm == kInf) {
    res.verdict = res.phi.is_plus_infinity() ? Closedness::Holds : Closedness::Unknown;
    res.note = "the vertical line misses the closed convex hull";
    return res;
  }
  if (res.phi.hi <= *hm + tol) {
    res.verdict = Closedness::Holds;
    res.note = "the lowest hull point over x* belongs to A";
  } else if (res.phi.lo > *hm + tol) {
    res.verdict = Closedness::Fails;
    res.note = "hull reaches " + format_double(*hm) + " over x* but A only reaches " +
               format_double(res.phi.lo);
  }
  return res;
}

Lemma7Report lemma7_check(const EpiUnionSet& A, std::span<const Vector> dual_samples,
                          std::span<const Vector> primal_samples, double tol) {
  const DualityProblem& p = A.problem();
  if (A.mode() != EpiUnionSet::Mode::FiniteAffine || A.generators().empty() || p.dimension() > 2) {
    fail(ErrorCode::PreconditionViolated, "lemma7_check needs a finite affine family on R or R^2");
  }
  Lemma7Report rep;
  rep.dual_samples = dual_samples.size();
  rep.primal_samples = primal_samples.size();
  const double delta = std::max(1e-6, 10 * tol);
  for (const auto& y : dual_samples) {
    const double hm = *A.hull_min(y);
    const Bracket fs = conjugate_numeric(p.f(), y, p.options().conj).value;
    double gap = 0;
    if (hm == kInf || fs.lo == kInf) {
      gap = (hm == kInf && fs.lo == kInf) ? 0.0 : kInf;
    } else {
      gap = std::max({0.0, fs.lo - hm, hm - fs.hi});
    }
    rep.max_conjugate_gap = std::max(rep.max_conjugate_gap, gap);
    // (y, r) ∈ cl co A  ⟺  f*(y) <= r, probed just above and below.
    if (hm < kInf) {
      for (double r : {hm - delta, hm + delta}) {
        const bool in_hull = r >= hm;
        const bool in_epi = fs.hi <= r + tol;
        const bool out_epi = fs.lo > r + tol;
        if ((in_hull && out_epi) || (!in_hull && in_epi)) ++rep.membership_mismatches;
      }
    }
    // strict epi phi ⊂ A ⊂ epi phi
    const PhiResult ph = p.phi(y);
    if (ph.value.is_plus_infinity()) {
      if (epi_union_membership(A, y, 0.0).verdict != Verdict::NotMember) ++rep.sandwich_violations;
    } else {
      if (epi_union_membership(A, y, ph.value.hi + delta).verdict != Verdict::Member) ++rep.sandwich_violations;
      if (epi_union_membership(A, y, ph.value.lo - delta).verdict != Verdict::NotMember) ++rep.sandwich_violations;
    }
  }
  for (const auto& x : primal_samples) {
    const double pc = *A.phi_conjugate(x);
    const Bracket fx = p.f_value(x);
    const double gap = std::max({0.0, fx.lo - pc, pc - fx.hi});
    rep.max_primal_gap = std::max(rep.max_primal_gap, gap);
  }
  rep.passed = rep.max_conjugate_gap <= tol && rep.max_primal_gap <= tol && rep.sandwich_violations == 0 &&
               rep.membership_mismatches == 0;
  return rep;
}

namespace {

Vector random_dual_point(const FunctionAtom& a, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t n = a.dimension();
  Vector y(n, 0.0);
  switch (a.kind()) {
    case AtomKind::Affine:
    case AtomKind::Constant:
      return a.forced_point();
    case AtomKind::DiagonalQuadratic:
      for (std::size_t k = 0; k < n; ++k) {
        y[k] = a.slope()[k] + (a.curvature()[k] > 0 ? 4 * unit(rng) - 2 : 0.0);
      }
      return y;
    case AtomKind::PowerResidual:
    case AtomKind::HingeResidual: {
      const double span = a.power() == 1.0 ? 1.0 : 2.0;
      const double lambda = a.kind() == AtomKind::PowerResidual ? span * (2 * unit(rng) - 1) : span * unit(rng);
      for (std::size_t k = 0; k < n; ++k) y[k] = lambda * a.slope()[k];
      return y;
    }
  }
  return y;
}

}  // namespace

ConvexityReport convexity_witness_nonneg(const EpiUnionSet& A, std::size_t samples, std::uint64_t seed,
                                         double tol) {
  const DualityProblem& p = A.problem();
  const FunctionFamily& fam = p.family();
  if (!fam.all_nonnegative()) fail(ErrorCode::PreconditionViolated, "atoms must be nonnegative");
  ConvexityReport rep;
  if (!fam.is_finite()) {
    if (fam.all_constant()) {
      const auto ca = p.constants_analysis();
      rep.convex = true;
      rep.note = "A = {0} x " + std::string(ca.attained == Tri::Yes ? "[" : "(") +
                 format_double(-ca.theta.hi) + ", inf): a half-line";
      return rep;
    }
    rep.note = "midpoint search needs a finite family";
    return rep;
  }
  const auto n = static_cast<unsigned>(fam.size());
  if (n > 20) fail(ErrorCode::SizeLimit, "convexity check is capped at 20 atoms");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<kernels::Mask> pick(1, (kernels::Mask{1} << n) - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t dim = p.dimension();
  const double tol_eq = p.options().tol_eq;
  for (std::size_t s = 0; s < samples; ++s) {
    kernels::Mask masks[2] = {pick(rng), pick(rng)};
    // Per-atom parts and epigraph levels; atoms outside a subset contribute (0, 0).
    std::vector<Vector> parts[2];
    std::vector<double> levels[2];
    Vector y[2];
    double r[2];
    for (int side = 0; side < 2; ++side) {
      parts[side].assign(n, Vector(dim, 0.0));
      levels[side].assign(n, 0.0);
      y[side].assign(dim, 0.0);
      ExactAccumulator total;
      for (std::size_t i : kernels::mask_indices(masks[side])) {
        const FunctionAtom& a = fam.atoms()[i - 1];
        parts[side][i - 1] = random_dual_point(a, rng);
        levels[side][i - 1] = a.conjugate(parts[side][i - 1], tol_eq) + unit(rng);
        total.add(levels[side][i - 1]);
        for (std::size_t k = 0; k < dim; ++k) y[side][k] += parts[side][i - 1][k];
      }
      r[side] = total.value();
    }
    ++rep.pairs;
    // Direct witness on L = J ∪ K.
    const kernels::Mask L = masks[0] | masks[1];
    bool ok = true;
    for (std::size_t i : kernels::mask_indices(L)) {
      Vector mid(dim);
      for (std::size_t k = 0; k < dim; ++k) mid[k] = (parts[0][i - 1][k] + parts[1][i - 1][k]) / 2;
      const double level = (levels[0][i - 1] + levels[1][i - 1]) / 2;
      if (fam.atoms()[i - 1].conjugate(mid, tol_eq) > level + tol) ok = false;
    }
    if (!ok) ++rep.witness_failures;
    Vector ym(dim);
    for (std::size_t k = 0; k < dim; ++k) ym[k] = (y[0][k] + y[1][k]) / 2;
    const double rm = (r[0] + r[1]) / 2;
    const Verdict v = epi_union_membership(A, ym, rm + tol).verdict;
    if (v == Verdict::NotMember) ++rep.search_failures;
    if (v == Verdict::Unknown) ++rep.search_unknown;
    const Bracket p0 = p.phi(y[0]).value;
    const Bracket p1 = p.phi(y[1]).value;
    const Bracket pm = p.phi(ym).value;
    if (p0.hi < kInf && p1.hi < kInf && pm.lo > (p0.hi + p1.hi) / 2 + tol) ++rep.phi_violations;
  }
  rep.convex = rep.witness_failures == 0 && rep.search_failures == 0 && rep.phi_violations == 0;
  return rep;
}

}  // namespace robustsum
