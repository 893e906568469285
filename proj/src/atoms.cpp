#include "robustsum/atoms.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "robustsum/errors.hpp"

namespace robustsum {

std::string_view to_string(AtomKind k) {
  switch (k) {
    case AtomKind::Affine: return "affine";
    case AtomKind::Constant: return "constant";
    case AtomKind::DiagonalQuadratic: return "quadratic";
    case AtomKind::PowerResidual: return "power";
    case AtomKind::HingeResidual: return "hinge";
  }
  return "?";
}

double affine_value(std::span<const double> a, std::span<const double> x, double c) {
  ExactAccumulator acc;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double p = a[k] * x[k];
    acc.add(p);
    acc.add(std::fma(a[k], x[k], -p));
  }
  acc.add(c);
  return acc.value();
}

namespace {

void require_finite(const Vector& v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) fail(ErrorCode::InvalidFamily, std::string(what) + " must be finite");
  }
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) fail(ErrorCode::InvalidFamily, std::string(what) + " must be finite");
}

void require_power(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) fail(ErrorCode::InvalidFamily, "exponent p must be >= 1");
}

bool is_zero(const Vector& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

// sup_s λ s - |s|^p for p > 1.
double power_conjugate(double lambda, double p) {
  const double m = std::fabs(lambda) / p;
  return (p - 1.0) * std::pow(m, p / (p - 1.0));
}

}  // namespace

FunctionAtom FunctionAtom::affine(Vector a, double t) {
  require_finite(a, "slope");
  require_finite(t, "offset");
  FunctionAtom f;
  f.kind_ = AtomKind::Affine;
  f.a_ = std::move(a);
  f.t_ = t;
  f.finish();
  return f;
}

FunctionAtom FunctionAtom::constant(double c, std::size_t dim) {
  require_finite(c, "constant");
  FunctionAtom f;
  f.kind_ = AtomKind::Constant;
  f.a_.assign(dim, 0.0);
  f.t_ = c;
  f.finish();
  return f;
}

FunctionAtom FunctionAtom::diagonal_quadratic(Vector q, Vector a, double t) {
  require_finite(q, "curvature");
  require_finite(a, "slope");
  require_finite(t, "offset");
  if (q.size() != a.size()) fail(ErrorCode::DimensionMismatch, "curvature and slope sizes differ");
  for (double v : q) {
    if (v < 0) fail(ErrorCode::InvalidFamily, "curvature must be nonnegative");
  }
  FunctionAtom f;
  f.kind_ = AtomKind::DiagonalQuadratic;
  f.q_ = std::move(q);
  f.a_ = std::move(a);
  f.t_ = t;
  f.finish();
  return f;
}

FunctionAtom FunctionAtom::power_residual(Vector a, double b, double p) {
  require_finite(a, "slope");
  require_finite(b, "target");
  require_power(p);
  FunctionAtom f;
  f.kind_ = AtomKind::PowerResidual;
  f.a_ = std::move(a);
  f.t_ = b;
  f.p_ = p;
  f.finish();
  return f;
}

FunctionAtom FunctionAtom::hinge_residual(Vector a, double b, double p) {
  require_finite(a, "slope");
  require_finite(b, "target");
  require_power(p);
  FunctionAtom f;
  f.kind_ = AtomKind::HingeResidual;
  f.a_ = std::move(a);
  f.t_ = b;
  f.p_ = p;
  f.finish();
  return f;
}

void FunctionAtom::finish() {
  switch (kind_) {
    case AtomKind::Affine:
      nonnegative_ = is_zero(a_) && t_ <= 0;
      break;
    case AtomKind::Constant:
      nonnegative_ = t_ >= 0;
      break;
    case AtomKind::DiagonalQuadratic: {
      bool bounded = true;
      double min = -t_;
      for (std::size_t k = 0; k < a_.size(); ++k) {
        if (q_[k] == 0.0) {
          if (a_[k] != 0.0) bounded = false;
        } else {
          min -= a_[k] * a_[k] / (4 * q_[k]);
        }
      }
      nonnegative_ = bounded && min >= 0;
      break;
    }
    case AtomKind::PowerResidual:
    case AtomKind::HingeResidual:
      nonnegative_ = true;
      break;
  }
}

void FunctionAtom::check_dim(std::size_t n) const {
  if (n != a_.size()) {
    fail(ErrorCode::DimensionMismatch, "atom of dimension " + std::to_string(a_.size()) +
                                           " evaluated at a point of dimension " + std::to_string(n));
  }
}

double FunctionAtom::residual(std::span<const double> x) const { return affine_value(a_, x, -t_); }

bool FunctionAtom::forced_conjugate() const {
  return kind_ == AtomKind::Affine || kind_ == AtomKind::Constant ||
         (kind_ == AtomKind::DiagonalQuadratic && is_zero(q_));
}

Vector FunctionAtom::forced_point() const {
  if (kind_ == AtomKind::Constant) return Vector(a_.size(), 0.0);
  return a_;
}

double FunctionAtom::eval(std::span<const double> x) const {
  check_dim(x.size());
  switch (kind_) {
    case AtomKind::Affine:
      return affine_value(a_, x, -t_);
    case AtomKind::Constant:
      return t_;
    case AtomKind::DiagonalQuadratic: {
      ExactAccumulator acc;
      for (std::size_t k = 0; k < x.size(); ++k) acc.add(q_[k] * x[k] * x[k]);
      acc.add(affine_value(a_, x, -t_));
      return acc.value();
    }
    case AtomKind::PowerResidual: {
      const double r = std::fabs(residual(x));
      return p_ == 1.0 ? r : (p_ == 2.0 ? r * r : std::pow(r, p_));
    }
    case AtomKind::HingeResidual: {
      const double r = std::max(residual(x), 0.0);
      return p_ == 1.0 ? r : (p_ == 2.0 ? r * r : std::pow(r, p_));
    }
  }
  return kInf;
}

std::optional<double> FunctionAtom::multiplier(std::span<const double> y, double tol_eq) const {
  const double aa = dot(a_, a_);
  const double lambda = dot(y, a_) / aa;
  for (std::size_t k = 0; k < y.size(); ++k) {
    if (std::fabs(y[k] - lambda * a_[k]) > tol_eq * std::max(1.0, std::fabs(y[k]))) return std::nullopt;
  }
  return lambda;
}

double FunctionAtom::conjugate(std::span<const double> y, double tol_eq) const {
  check_dim(y.size());
  auto near = [&](std::span<const double> u, std::span<const double> v) {
    for (std::size_t k = 0; k < u.size(); ++k) {
      if (std::fabs(u[k] - v[k]) > tol_eq) return false;
    }
    return true;
  };
  const Vector zero(y.size(), 0.0);
  switch (kind_) {
    case AtomKind::Affine:
      return near(y, a_) ? t_ : kInf;
    case AtomKind::Constant:
      return near(y, zero) ? -t_ : kInf;
    case AtomKind::DiagonalQuadratic: {
      ExactAccumulator acc;
      for (std::size_t k = 0; k < y.size(); ++k) {
        const double d = y[k] - a_[k];
        if (q_[k] == 0.0) {
          if (std::fabs(d) > tol_eq) return kInf;
        } else {
          acc.add(d * d / (4 * q_[k]));
        }
      }
      acc.add(t_);
      return acc.value();
    }
    case AtomKind::PowerResidual: {
      if (is_zero(a_)) return near(y, zero) ? -std::pow(std::fabs(t_), p_) : kInf;
      const auto lambda = multiplier(y, tol_eq);
      if (!lambda) return kInf;
      if (p_ == 1.0) return std::fabs(*lambda) <= 1.0 + tol_eq ? *lambda * t_ : kInf;
      return *lambda * t_ + power_conjugate(*lambda, p_);
    }
    case AtomKind::HingeResidual: {
      if (is_zero(a_)) return near(y, zero) ? -std::pow(std::max(-t_, 0.0), p_) : kInf;
      const auto lambda = multiplier(y, tol_eq);
      if (!lambda || *lambda < -tol_eq) return kInf;
      const double l = std::max(*lambda, 0.0);
      if (p_ == 1.0) return l <= 1.0 + tol_eq ? l * t_ : kInf;
      return l * t_ + power_conjugate(l, p_);
    }
  }
  return kInf;
}

Vector FunctionAtom::subgradient(std::span<const double> x) const {
  check_dim(x.size());
  Vector g(x.size(), 0.0);
  double scale = 0.0;
  switch (kind_) {
    case AtomKind::Affine:
      return a_;
    case AtomKind::Constant:
      return g;
    case AtomKind::DiagonalQuadratic:
      for (std::size_t k = 0; k < x.size(); ++k) g[k] = 2 * q_[k] * x[k] + a_[k];
      return g;
    case AtomKind::PowerResidual: {
      const double r = residual(x);
      if (r == 0.0) return g;
      const double s = r > 0 ? 1.0 : -1.0;
      scale = p_ == 1.0 ? s : p_ * std::pow(std::fabs(r), p_ - 1) * s;
      break;
    }
    case AtomKind::HingeResidual: {
      const double r = residual(x);
      if (r <= 0.0) return g;
      scale = p_ == 1.0 ? 1.0 : p_ * std::pow(r, p_ - 1);
      break;
    }
  }
  for (std::size_t k = 0; k < x.size(); ++k) g[k] = scale * a_[k];
  return g;
}

double FunctionAtom::fenchel_young_gap(std::span<const double> x, std::span<const double> y,
                                       double tol_eq) const {
  const double c = conjugate(y, tol_eq);
  if (c == kInf) return kInf;
  // Dual points within tol_eq of the forced point count as the forced point.
  const Vector ref = forced_conjugate() ? forced_point() : Vector(y.begin(), y.end());
  ExactAccumulator acc;
  acc.add(eval(x));
  acc.add(c);
  acc.add(-affine_value(ref, x, 0.0));
  return std::max(acc.value(), 0.0);
}

Bracket FunctionAtom::derivative_range(double x) const {
  if (a_.size() != 1) fail(ErrorCode::DimensionMismatch, "derivative_range needs a 1-D atom");
  const double a = a_[0];
  switch (kind_) {
    case AtomKind::Affine:
      return Bracket::exact(a);
    case AtomKind::Constant:
      return Bracket::exact(0.0);
    case AtomKind::DiagonalQuadratic:
      return Bracket::exact(2 * q_[0] * x + a);
    case AtomKind::PowerResidual: {
      const double r = a * x - t_;
      if (r == 0.0) {
        return p_ == 1.0 ? Bracket{-std::fabs(a), std::fabs(a)} : Bracket::exact(0.0);
      }
      const double s = r > 0 ? 1.0 : -1.0;
      return Bracket::exact((p_ == 1.0 ? s : p_ * std::pow(std::fabs(r), p_ - 1) * s) * a);
    }
    case AtomKind::HingeResidual: {
      const double r = a * x - t_;
      if (r < 0.0) return Bracket::exact(0.0);
      if (r == 0.0) {
        if (p_ > 1.0) return Bracket::exact(0.0);
        return {std::min(0.0, a), std::max(0.0, a)};
      }
      return Bracket::exact((p_ == 1.0 ? 1.0 : p_ * std::pow(r, p_ - 1)) * a);
    }
  }
  return Bracket::exact(0.0);
}

Bracket FunctionAtom::slope_limits() const {
  if (a_.size() != 1) fail(ErrorCode::DimensionMismatch, "slope_limits needs a 1-D atom");
  const double a = a_[0];
  switch (kind_) {
    case AtomKind::Affine:
      return Bracket::exact(a);
    case AtomKind::Constant:
      return Bracket::exact(0.0);
    case AtomKind::DiagonalQuadratic:
      return q_[0] > 0 ? Bracket{-kInf, kInf} : Bracket::exact(a);
    case AtomKind::PowerResidual:
      if (a == 0.0) return Bracket::exact(0.0);
      return p_ == 1.0 ? Bracket{-std::fabs(a), std::fabs(a)} : Bracket{-kInf, kInf};
    case AtomKind::HingeResidual:
      if (a == 0.0) return Bracket::exact(0.0);
      if (p_ == 1.0) return {std::min(0.0, a), std::max(0.0, a)};
      return a > 0 ? Bracket{0.0, kInf} : Bracket{-kInf, 0.0};
  }
  return Bracket::exact(0.0);
}

std::optional<double> FunctionAtom::kink() const {
  if (a_.size() != 1) return std::nullopt;
  if ((kind_ == AtomKind::PowerResidual || kind_ == AtomKind::HingeResidual) && a_[0] != 0.0) {
    return t_ / a_[0];
  }
  return std::nullopt;
}

std::string FunctionAtom::describe() const {
  std::ostringstream os;
  auto vec = [&](const Vector& v) {
    os << '[';
    for (std::size_t k = 0; k < v.size(); ++k) os << (k ? "," : "") << format_double(v[k]);
    os << ']';
  };
  os << to_string(kind_) << '(';
  switch (kind_) {
    case AtomKind::Constant:
      os << format_double(t_);
      break;
    case AtomKind::Affine:
      os << "a=";
      vec(a_);
      os << ", t=" << format_double(t_);
      break;
    case AtomKind::DiagonalQuadratic:
      os << "q=";
      vec(q_);
      os << ", a=";
      vec(a_);
      os << ", t=" << format_double(t_);
      break;
    case AtomKind::PowerResidual:
    case AtomKind::HingeResidual:
      os << "a=";
      vec(a_);
      os << ", b=" << format_double(t_) << ", p=" << format_double(p_);
      break;
  }
  os << ')';
  return os.str();
}

double eval_atom(const FunctionAtom& atom, std::span<const double> x) { return atom.eval(x); }

}  // namespace robustsum
