#include "robustsum/scalar_calculus.hpp"

#include <algorithm>
#include <optional>

#include "robustsum/errors.hpp"
#include "robustsum/kernels.hpp"

namespace robustsum {

std::string_view to_string(SignVerdict v) {
  switch (v) {
    case SignVerdict::NonNegative: return "nonnegative";
    case SignVerdict::NonPositive: return "nonpositive";
    case SignVerdict::Zero: return "zero";
  }
  return "?";
}

std::string_view to_string(Finiteness v) {
  switch (v) {
    case Finiteness::Finite: return "finite";
    case Finiteness::Infinite: return "infinite";
    case Finiteness::Unknown: return "unknown";
  }
  return "?";
}

std::string_view to_string(SumKind v) {
  switch (v) {
    case SumKind::ExistsFinite: return "exists_finite";
    case SumKind::MinusInfinity: return "minus_infinity";
    case SumKind::PlusInfinityUnconditional: return "plus_infinity";
    case SumKind::Undefined: return "undefined";
    case SumKind::Unknown: return "unknown";
  }
  return "?";
}

namespace {

constexpr std::uint64_t kFirstCut = 64;

// Running statistics of the prefix 1..n of a countable family.
class Prefix {
 public:
  explicit Prefix(const ScalarFamily& f) : f_(f) {}

  void extend_to(std::uint64_t n) {
    for (std::uint64_t i = n_ + 1; i <= n; ++i) {
      const ExtendedReal t = f_.term(i);
      if (t.is_plus_infinity()) {
        has_inf_ = true;
      } else if (t.value() > 0) {
        pos_.add(t.value());
      } else if (t.value() < 0) {
        neg_.add(-t.value());
      }
      max_ = std::max(max_, t.value());
    }
    n_ = std::max(n_, n);
  }

  std::uint64_t n() const { return n_; }
  bool has_inf() const { return has_inf_; }
  double pos() const { return pos_.value(); }
  double neg() const { return neg_.value(); }
  double max() const { return max_; }

 private:
  const ScalarFamily& f_;
  std::uint64_t n_ = 0;
  bool has_inf_ = false;
  ExactAccumulator pos_;
  ExactAccumulator neg_;
  double max_ = -kInf;
};

std::vector<std::uint64_t> cut_schedule(std::uint64_t budget) {
  std::vector<std::uint64_t> cuts;
  std::uint64_t n = std::min(kFirstCut, budget);
  while (true) {
    cuts.push_back(n);
    if (n >= budget) break;
    n = std::min(budget, n * 2);
  }
  return cuts;
}

std::optional<Bracket> part_bracket(const Prefix& p, const TailCertificate& t, bool positive) {
  if (positive ? t.pos_divergent : t.neg_divergent) return Bracket::plus_infinity();
  const auto& tail = positive ? t.pos_tail : t.neg_tail;
  if (!tail) return std::nullopt;
  const double s = positive ? p.pos() : p.neg();
  const Bracket b = tail(p.n());
  Bracket r{s + std::max(0.0, b.lo), s + b.hi};
  if (!r.is_exact()) r = widen(r, 1);
  return r;
}

Bracket sup_bracket(const Prefix& p, const TailCertificate& t) {
  const double m = p.max();
  if (t.tail_sup) {
    const Bracket s = t.tail_sup(p.n());
    return {std::max(m, s.lo), std::max(m, s.hi)};
  }
  if (t.pos_divergent) return {m, kInf};
  if (t.pos_tail) {
    const Bracket s = t.pos_tail(p.n());
    return {m, std::max(m, s.hi > 0 ? s.hi : 0.0)};
  }
  return {m, kInf};
}

std::optional<SignVerdict> sign_of(const Bracket& sup) {
  if (sup.lo == 0.0 && sup.hi == 0.0) return SignVerdict::Zero;
  if (sup.lo >= 0.0) return SignVerdict::NonNegative;
  if (sup.hi <= 0.0) return SignVerdict::NonPositive;
  return std::nullopt;
}

[[noreturn]] void budget_exceeded(const ScalarFamily& f, const char* what) {
  fail(ErrorCode::UnknownBudgetExceeded,
       std::string(what) + " of countable family '" + f.name() +
           "' not certified within the term budget");
}

// Finite-family helpers; exact via correctly rounded sums.
double finite_part(const ScalarFamily& f, bool positive) {
  ExactAccumulator acc;
  for (const auto& t : f.terms()) {
    if (t.is_plus_infinity()) return positive ? kInf : acc.value();
    const double v = t.value();
    if (positive && v > 0) acc.add(v);
    if (!positive && v < 0) acc.add(-v);
  }
  return acc.value();
}

double finite_max(const ScalarFamily& f) {
  if (f.size() == 0) fail(ErrorCode::InvalidFamily, "empty family");
  double m = -kInf;
  for (const auto& t : f.terms()) m = std::max(m, t.value());
  return m;
}

Bracket countable_part(const ScalarFamily& f, const ScalarOptions& opts, bool positive) {
  Prefix p(f);
  for (std::uint64_t cut : cut_schedule(opts.budget)) {
    p.extend_to(cut);
    if (positive && p.has_inf()) return Bracket::plus_infinity();
    if (!f.tail()) continue;
    const auto b = part_bracket(p, *f.tail(), positive);
    if (!b) break;
    if (b->is_plus_infinity() || b->width() <= opts.tol) return *b;
  }
  budget_exceeded(f, positive ? "positive part" : "negative part");
}

}  // namespace

Bracket positive_part_sum(const ScalarFamily& family, const ScalarOptions& opts) {
  if (family.is_finite()) {
    const double v = finite_part(family, true);
    return v == kInf ? Bracket::plus_infinity() : Bracket::exact(v);
  }
  return countable_part(family, opts, true);
}

Bracket negative_part_sum(const ScalarFamily& family, const ScalarOptions& opts) {
  if (family.is_finite()) return Bracket::exact(finite_part(family, false));
  return countable_part(family, opts, false);
}

SupResult sup_scalar(const ScalarFamily& family, const ScalarOptions& opts) {
  if (family.is_finite()) {
    const double m = finite_max(family);
    return {Bracket::exact(m), *sign_of(Bracket::exact(m))};
  }
  Prefix p(family);
  for (std::uint64_t cut : cut_schedule(opts.budget)) {
    p.extend_to(cut);
    if (p.has_inf()) return {Bracket::plus_infinity(), SignVerdict::NonNegative};
    if (!family.tail()) continue;
    const Bracket s = sup_bracket(p, *family.tail());
    const auto sign = sign_of(s);
    if (sign && (s.width() <= opts.tol || s.hi == kInf)) return {s, *sign};
  }
  budget_exceeded(family, "supremum");
}

Bracket robust_sum_scalar(const ScalarFamily& family, const ScalarOptions& opts) {
  if (family.is_finite()) {
    const double m = finite_max(family);
    if (m == kInf) return Bracket::plus_infinity();
    if (m >= 0) return Bracket::exact(finite_part(family, true));
    return Bracket::exact(m);
  }
  Prefix p(family);
  for (std::uint64_t cut : cut_schedule(opts.budget)) {
    p.extend_to(cut);
    if (p.has_inf()) return Bracket::plus_infinity();
    if (!family.tail()) continue;
    const TailCertificate& t = *family.tail();
    const Bracket s = sup_bracket(p, t);
    const auto pos = part_bracket(p, t, true);
    const auto sign = sign_of(s);
    if (sign == SignVerdict::NonNegative || sign == SignVerdict::Zero) {
      if (!pos) continue;
      if (pos->is_plus_infinity() || pos->width() <= opts.tol) return *pos;
    } else if (sign == SignVerdict::NonPositive) {
      if (s.width() <= opts.tol) return s;
    } else if (pos && !pos->is_plus_infinity()) {
      // Sign still open: the value lies in pos when sup >= 0, in [s.lo, 0) otherwise.
      const Bracket both = hull(*pos, Bracket{s.lo, std::min(s.hi, 0.0)});
      if (both.width() <= opts.tol) return both;
    }
  }
  budget_exceeded(family, "robust sum");
}

Finiteness is_finite_robust_sum(const ScalarFamily& family, const ScalarOptions& opts) {
  if (family.is_finite()) {
    return finite_part(family, true) == kInf ? Finiteness::Infinite : Finiteness::Finite;
  }
  if (family.tail() && family.tail()->pos_divergent) return Finiteness::Infinite;
  Prefix p(family);
  if (family.tail() && family.tail()->pos_tail) {
    p.extend_to(std::min(kFirstCut, opts.budget));
    if (p.has_inf()) return Finiteness::Infinite;
    const Bracket t = family.tail()->pos_tail(p.n());
    return t.hi < kInf ? Finiteness::Finite : Finiteness::Unknown;
  }
  p.extend_to(opts.budget);
  return p.has_inf() ? Finiteness::Infinite : Finiteness::Unknown;
}

SumClassification infinite_sum_classify(const ScalarFamily& family, const ScalarOptions& opts) {
  if (family.is_finite()) {
    if (finite_part(family, true) == kInf) return {SumKind::PlusInfinityUnconditional, {}};
    std::vector<double> vs;
    for (const auto& t : family.terms()) vs.push_back(t.value());
    return {SumKind::ExistsFinite, Bracket::exact(exact_sum(vs))};
  }
  if (!family.tail()) {
    Prefix p(family);
    p.extend_to(opts.budget);
    if (p.has_inf()) return {SumKind::PlusInfinityUnconditional, {}};
    return {SumKind::Unknown, {}};
  }
  const TailCertificate& t = *family.tail();
  const Finiteness fin = is_finite_robust_sum(family, opts);
  if (fin == Finiteness::Unknown) return {SumKind::Unknown, {}};
  if (fin == Finiteness::Infinite) {
    if (!t.pos_divergent) return {SumKind::PlusInfinityUnconditional, {}};
    if (t.neg_divergent) return {SumKind::Undefined, {}};
    if (t.neg_tail) return {SumKind::PlusInfinityUnconditional, {}};
    return {SumKind::Unknown, {}};
  }
  if (t.neg_divergent) return {SumKind::MinusInfinity, {}};
  if (!t.neg_tail) return {SumKind::Unknown, {}};
  ScalarOptions half = opts;
  half.tol = opts.tol / 2;
  try {
    const Bracket pos = positive_part_sum(family, half);
    const Bracket neg = negative_part_sum(family, half);
    return {SumKind::ExistsFinite, widen(Bracket{pos.lo - neg.hi, pos.hi - neg.lo}, 1)};
  } catch (const Error& e) {
    if (e.code() == ErrorCode::UnknownBudgetExceeded) return {SumKind::Unknown, {}};
    throw;
  }
}

namespace {

ExtendedReal brute_force_impl(const ScalarFamily& family, bool parallel) {
  if (!family.is_finite()) fail(ErrorCode::SizeLimit, "brute force needs a finite family");
  if (family.size() > 20) fail(ErrorCode::SizeLimit, "brute force is capped at 20 terms");
  if (family.size() == 0) fail(ErrorCode::InvalidFamily, "empty family");
  std::vector<double> vs;
  for (const auto& t : family.terms()) {
    if (t.is_plus_infinity()) return ExtendedReal::plus_infinity();
    vs.push_back(t.value());
  }
  return parallel ? kernels::max_subset_sum(vs) : kernels::max_subset_sum_serial(vs);
}

}  // namespace

ExtendedReal brute_force_robust_sum(const ScalarFamily& family) {
  return brute_force_impl(family, true);
}

ExtendedReal brute_force_robust_sum_serial(const ScalarFamily& family) {
  return brute_force_impl(family, false);
}

}  // namespace robustsum
