#include "robustsum/function_family.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "robustsum/errors.hpp"

namespace robustsum {

FunctionFamily FunctionFamily::finite(std::vector<FunctionAtom> atoms, std::string name) {
  if (atoms.empty()) fail(ErrorCode::InvalidFamily, "a family needs at least one atom");
  const std::size_t dim = atoms.front().dimension();
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    if (atoms[k].dimension() != dim) {
      fail(ErrorCode::DimensionMismatch, "atom " + std::to_string(k + 1) + " has dimension " +
                                             std::to_string(atoms[k].dimension()) + ", expected " +
                                             std::to_string(dim));
    }
  }
  FunctionFamily f;
  f.name_ = std::move(name);
  f.dim_ = dim;
  f.atoms_ = std::move(atoms);
  f.sample_ = {Vector(dim, 0.0)};
  return f;
}

FunctionFamily FunctionFamily::countable(std::size_t dim, CountableAtoms gen, std::string name,
                                         std::vector<Vector> domain_sample) {
  if (!gen.atom) fail(ErrorCode::InvalidFamily, "countable family needs an atom generator");
  if (domain_sample.empty()) fail(ErrorCode::InvalidFamily, "countable family needs a domain sample");
  FunctionFamily f;
  f.name_ = std::move(name);
  f.dim_ = dim;
  f.finite_ = false;
  f.gen_ = std::move(gen);
  f.sample_ = std::move(domain_sample);
  for (const auto& x : f.sample_) {
    if (x.size() != dim) fail(ErrorCode::DimensionMismatch, "domain sample has wrong dimension");
  }
  // Properness: the robust sum must be finite somewhere on the declared sample.
  bool proper = false;
  for (const auto& x : f.sample_) {
    try {
      if (robust_sum_scalar(f.pointwise(x)).hi < kInf) {
        proper = true;
        break;
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::UnknownBudgetExceeded) throw;
    }
  }
  if (!proper) fail(ErrorCode::InvalidFamily, "robust sum is not finite on the domain sample");
  return f;
}

FunctionAtom FunctionFamily::atom(std::uint64_t i) const {
  if (i == 0) fail(ErrorCode::InvalidFamily, "family indices start at 1");
  if (finite_) {
    if (i > atoms_.size()) fail(ErrorCode::InvalidFamily, "index beyond finite family");
    return atoms_[i - 1];
  }
  return gen_.atom(i);
}

bool FunctionFamily::all_nonnegative() const {
  if (!finite_) return gen_.all_nonnegative;
  return std::all_of(atoms_.begin(), atoms_.end(), [](const auto& a) { return a.nonnegative(); });
}

bool FunctionFamily::all_constant() const {
  if (!finite_) return gen_.all_constant;
  return std::all_of(atoms_.begin(), atoms_.end(), [](const auto& a) {
    return a.forced_conjugate() &&
           std::all_of(a.slope().begin(), a.slope().end(), [](double v) { return v == 0.0; });
  });
}

bool FunctionFamily::all_forced() const {
  if (!finite_) return gen_.all_constant;
  return std::all_of(atoms_.begin(), atoms_.end(), [](const auto& a) { return a.forced_conjugate(); });
}

std::optional<FunctionAtom> FunctionFamily::limit_atom() const {
  if (finite_) return std::nullopt;
  return gen_.limit_atom;
}

ScalarFamily FunctionFamily::pointwise(std::span<const double> x) const {
  if (x.size() != dim_) {
    fail(ErrorCode::DimensionMismatch, "point of dimension " + std::to_string(x.size()) +
                                           " for a family on R^" + std::to_string(dim_));
  }
  if (finite_) {
    std::vector<ExtendedReal> vs;
    vs.reserve(atoms_.size());
    for (const auto& a : atoms_) vs.emplace_back(a.eval(x));
    return ScalarFamily::finite(std::move(vs));
  }
  Vector xs(x.begin(), x.end());
  auto gen = gen_.atom;
  std::optional<TailCertificate> tail;
  if (gen_.pointwise_tail) tail = gen_.pointwise_tail(xs);
  return ScalarFamily::countable(
      [gen, xs](std::uint64_t i) { return ExtendedReal(gen(i).eval(xs)); }, std::move(tail), name_);
}

FunctionFamily affine_family(const std::vector<Vector>& rows) {
  std::vector<FunctionAtom> atoms;
  for (const auto& r : rows) {
    if (r.size() < 2) fail(ErrorCode::InvalidFamily, "affine rows need [a..., t]");
    atoms.push_back(FunctionAtom::affine(Vector(r.begin(), r.end() - 1), r.back()));
  }
  return FunctionFamily::finite(std::move(atoms), "affine");
}

FunctionFamily hinge_family(const std::vector<Vector>& rows, double p) {
  std::vector<FunctionAtom> atoms;
  for (const auto& r : rows) {
    if (r.size() < 2) fail(ErrorCode::InvalidFamily, "hinge rows need [a..., b]");
    atoms.push_back(FunctionAtom::hinge_residual(Vector(r.begin(), r.end() - 1), r.back(), p));
  }
  return FunctionFamily::finite(std::move(atoms), "hinge");
}

FunctionFamily power_family(const std::vector<Vector>& rows, double p) {
  std::vector<FunctionAtom> atoms;
  for (const auto& r : rows) {
    if (r.size() < 2) fail(ErrorCode::InvalidFamily, "power rows need [a..., b]");
    atoms.push_back(FunctionAtom::power_residual(Vector(r.begin(), r.end() - 1), r.back(), p));
  }
  return FunctionFamily::finite(std::move(atoms), "power");
}

FunctionFamily cloud_family(const std::vector<Vector>& points, double p) {
  std::vector<FunctionAtom> atoms;
  for (const auto& pt : points) {
    if (pt.size() != 2) fail(ErrorCode::InvalidFamily, "cloud points are pairs [t, s]");
    atoms.push_back(FunctionAtom::power_residual({1.0, pt[0]}, pt[1], p));
  }
  return FunctionFamily::finite(std::move(atoms), "cloud");
}

namespace {

double param(const std::map<std::string, double>& params, const std::string& key, double fallback) {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

void allow_params(const std::string& name, const std::map<std::string, double>& params,
                  std::initializer_list<const char*> keys) {
  for (const auto& [k, v] : params) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* key) { return k == key; })) {
      fail(ErrorCode::InvalidFamily, "unknown parameter '" + k + "' for " + name);
    }
  }
}

double two_pow(double e) { return std::ldexp(1.0, static_cast<int>(e)); }

// Tail of Σ_{i>n} c^p 2^{-ip} for c >= 0.
TailCertificate geometric_power_tail(double c, double p) {
  TailCertificate t;
  const double cp = std::pow(c, p);
  const double ratio = std::pow(2.0, -p);
  t.pos_tail = [cp, ratio, p](std::uint64_t n) {
    const double first = cp * std::pow(2.0, -p * static_cast<double>(n + 1));
    return widen(Bracket::exact(first / (1.0 - ratio)), 4);
  };
  t.neg_tail = [](std::uint64_t) { return Bracket::exact(0.0); };
  t.tail_sup = [cp, p](std::uint64_t n) {
    return widen(Bracket::exact(cp * std::pow(2.0, -p * static_cast<double>(n + 1))), 2);
  };
  return t;
}

FunctionFamily geometric_cloud(double p) {
  CountableAtoms gen;
  gen.atom = [p](std::uint64_t i) {
    const double w = two_pow(-static_cast<double>(i));
    return FunctionAtom::power_residual({1.0, w}, w, p);
  };
  gen.pointwise_tail = [p](std::span<const double> x) {
    if (x[0] != 0.0) {
      TailCertificate t;
      t.pos_divergent = true;
      t.neg_tail = [](std::uint64_t) { return Bracket::exact(0.0); };
      const double lim = std::pow(std::fabs(x[0]), p);
      t.tail_sup = [lim](std::uint64_t) { return Bracket{lim, kInf}; };
      return t;
    }
    return geometric_power_tail(std::fabs(x[1] - 1.0), p);
  };
  gen.all_nonnegative = true;
  gen.limit_atom = FunctionAtom::power_residual({1.0, 0.0}, 0.0, p);
  return FunctionFamily::countable(2, std::move(gen), "geometric_cloud", {{0.0, 0.0}, {0.0, 1.0}});
}

FunctionFamily geometric_constants(std::size_t dim) {
  CountableAtoms gen;
  gen.atom = [dim](std::uint64_t i) {
    return FunctionAtom::affine(Vector(dim, 0.0), -two_pow(-static_cast<double>(i)));
  };
  gen.pointwise_tail = [](std::span<const double>) {
    TailCertificate t;
    t.pos_tail = [](std::uint64_t n) { return Bracket::exact(two_pow(-static_cast<double>(n))); };
    t.neg_tail = [](std::uint64_t) { return Bracket::exact(0.0); };
    t.tail_sup = [](std::uint64_t n) {
      return Bracket::exact(two_pow(-static_cast<double>(n + 1)));
    };
    return t;
  };
  gen.all_nonnegative = true;
  gen.all_constant = true;
  return FunctionFamily::countable(dim, std::move(gen), "geometric_constants", {Vector(dim, 0.0)});
}

FunctionFamily geometric_residuals(double p) {
  CountableAtoms gen;
  gen.atom = [p](std::uint64_t i) {
    return FunctionAtom::power_residual({two_pow(-static_cast<double>(i))}, 0.0, p);
  };
  gen.pointwise_tail = [p](std::span<const double> x) {
    return geometric_power_tail(std::fabs(x[0]), p);
  };
  gen.all_nonnegative = true;
  return FunctionFamily::countable(1, std::move(gen), "geometric_residuals", {{0.0}});
}

// Enclosure of Σ_{j>m} j^{-p}, p > 1.
Bracket zeta_tail(std::uint64_t m, double p) {
  const double lo = std::pow(static_cast<double>(m + 1), 1.0 - p) / (p - 1.0);
  const double hi = m == 0 ? kInf : std::pow(static_cast<double>(m), 1.0 - p) / (p - 1.0);
  return widen(Bracket{lo, hi}, 4);
}

FunctionFamily harmonic_mix(double p) {
  CountableAtoms gen;
  gen.atom = [p](std::uint64_t i) {
    if (i == 1) return FunctionAtom::hinge_residual({-1.0}, -1.0, p);
    return FunctionAtom::hinge_residual({1.0}, -1.0 / static_cast<double>(i - 1), p);
  };
  gen.pointwise_tail = [p](std::span<const double> xs) {
    const double x = xs[0];
    TailCertificate t;
    t.neg_tail = [](std::uint64_t) { return Bracket::exact(0.0); };
    if (x > 0.0) {
      t.pos_divergent = true;
      const double lim = std::pow(x, p);
      t.tail_sup = [lim](std::uint64_t) { return Bracket{lim, kInf}; };
      return t;
    }
    if (x == 0.0 && p == 1.0) {
      t.pos_divergent = true;
      t.tail_sup = [](std::uint64_t) { return Bracket{0.0, 1.0}; };
      return t;
    }
    // Rows i > n are max(x + 1/j, 0)^p with j = i - 1 > n - 1.
    t.pos_tail = [x, p](std::uint64_t n) {
      const std::uint64_t m = n == 0 ? 0 : n - 1;
      if (x == 0.0) return zeta_tail(m, p);
      const double last = std::floor(-1.0 / x);  // largest j with 1/j >= -x
      if (static_cast<double>(m) >= last) return Bracket::exact(0.0);
      if (p == 1.0) {
        const double hi = m == 0 ? kInf : std::log(last / static_cast<double>(m)) + 1.0 / (m + 1.0);
        return Bracket{0.0, hi};
      }
      return Bracket{0.0, zeta_tail(m, p).hi};
    };
    t.tail_sup = [x, p](std::uint64_t n) {
      const double j = static_cast<double>(n == 0 ? 1 : n);
      return Bracket{0.0, std::pow(std::max(x + 1.0 / j, 0.0), p)};
    };
    return t;
  };
  gen.all_nonnegative = true;
  gen.limit_atom = FunctionAtom::hinge_residual({1.0}, 0.0, p);
  return FunctionFamily::countable(1, std::move(gen), "harmonic_mix", {{-1.0}});
}

}  // namespace

FunctionFamily named_family(const std::string& name, const std::map<std::string, double>& params) {
  if (name == "geometric_cloud") {
    allow_params(name, params, {"p"});
    return geometric_cloud(param(params, "p", 2.0));
  }
  if (name == "geometric_constants") {
    allow_params(name, params, {"dim"});
    const double dim = param(params, "dim", 1.0);
    if (dim < 1 || dim > 3 || dim != std::floor(dim)) {
      fail(ErrorCode::InvalidFamily, "geometric_constants: dim must be 1, 2 or 3");
    }
    return geometric_constants(static_cast<std::size_t>(dim));
  }
  if (name == "geometric_residuals") {
    allow_params(name, params, {"p"});
    return geometric_residuals(param(params, "p", 2.0));
  }
  if (name == "harmonic_mix") {
    allow_params(name, params, {"p"});
    return harmonic_mix(param(params, "p", 2.0));
  }
  fail(ErrorCode::InvalidFamily, "unknown named family: " + name);
}

std::vector<std::string> named_family_names() {
  return {"geometric_cloud", "geometric_constants", "geometric_residuals", "harmonic_mix"};
}

RobustSumFunction::RobustSumFunction(std::shared_ptr<const FunctionFamily> family, ScalarOptions opts)
    : family_(std::move(family)), opts_(opts) {
  if (!family_) fail(ErrorCode::InvalidFamily, "null family");
}

Bracket RobustSumFunction::eval(std::span<const double> x, double tol) const {
  if (family_->is_finite()) {
    ScalarOptions o = opts_;
    o.tol = tol;
    return robust_sum_scalar(family_->pointwise(x), o);
  }
  std::pair<Vector, double> key{Vector(x.begin(), x.end()), tol};
  {
    std::shared_lock lock(mu_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  ScalarOptions o = opts_;
  o.tol = tol;
  const Bracket v = robust_sum_scalar(family_->pointwise(x), o);
  std::unique_lock lock(mu_);
  if (cache_.size() > 200000) cache_.clear();
  cache_.emplace(std::move(key), v);
  return v;
}

Bracket robust_sum_eval(const RobustSumFunction& f, std::span<const double> x, double tol) {
  return f.eval(x, tol);
}

Bracket robust_lp_norm(const FunctionFamily& residuals, std::span<const double> x, double p,
                       const ScalarOptions& opts) {
  const auto check = [&](const FunctionAtom& a) {
    if ((a.kind() != AtomKind::PowerResidual && a.kind() != AtomKind::HingeResidual) || a.power() != p) {
      fail(ErrorCode::PreconditionViolated, "robust L_p norm needs power or hinge residuals with exponent p");
    }
  };
  if (residuals.is_finite()) {
    for (const auto& a : residuals.atoms()) check(a);
  } else {
    check(residuals.atom(1));
  }
  const Bracket s = robust_sum_scalar(residuals.pointwise(x), opts);
  if (s.is_plus_infinity()) return s;
  auto root = [p](double v) { return v <= 0 ? 0.0 : (p == 1.0 ? v : std::pow(v, 1.0 / p)); };
  Bracket r{root(s.lo), root(s.hi)};
  return p == 1.0 ? r : widen(r, 2);
}

Bracket nonneg_infinite_sum_eval(const RobustSumFunction& f, std::span<const double> x, double tol) {
  if (!f.family().all_nonnegative()) {
    fail(ErrorCode::PreconditionViolated, "family has atoms that are not nonnegative");
  }
  return f.eval(x, tol);
}

}  // namespace robustsum
