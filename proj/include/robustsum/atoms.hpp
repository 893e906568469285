#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "robustsum/extended_real.hpp"

namespace robustsum {

using Vector = std::vector<double>;

enum class AtomKind { Affine, Constant, DiagonalQuadratic, PowerResidual, HingeResidual };

std::string_view to_string(AtomKind k);

// Proper convex lsc function on R^n:
//   Affine             <a, x> - t
//   Constant           c
//   DiagonalQuadratic  Σ q_k x_k^2 + <a, x> - t     (q >= 0)
//   PowerResidual      |<a, x> - b|^p              (p >= 1)
//   HingeResidual      max(<a, x> - b, 0)^p        (p >= 1)
class FunctionAtom {
 public:
  static FunctionAtom affine(Vector a, double t);
  static FunctionAtom constant(double c, std::size_t dim);
  static FunctionAtom diagonal_quadratic(Vector q, Vector a, double t);
  static FunctionAtom power_residual(Vector a, double b, double p);
  static FunctionAtom hinge_residual(Vector a, double b, double p);

  AtomKind kind() const { return kind_; }
  std::size_t dimension() const { return a_.size(); }
  const Vector& slope() const { return a_; }
  const Vector& curvature() const { return q_; }
  // t for Affine/DiagonalQuadratic, c for Constant, b for the residuals.
  double offset() const { return t_; }
  double power() const { return p_; }

  bool nonnegative() const { return nonnegative_; }
  bool convex() const { return true; }
  bool has_closed_form_conjugate() const { return true; }
  // The conjugate is finite at exactly one dual point.
  bool forced_conjugate() const;
  Vector forced_point() const;

  double eval(std::span<const double> x) const;
  double conjugate(std::span<const double> y, double tol_eq = 1e-9) const;
  // Picks 0 whenever the subdifferential contains it.
  Vector subgradient(std::span<const double> x) const;
  double fenchel_young_gap(std::span<const double> x, std::span<const double> y,
                           double tol_eq = 1e-9) const;

  // One-dimensional helpers.
  Bracket derivative_range(double x) const;
  Bracket slope_limits() const;
  std::optional<double> kink() const;

  std::string describe() const;

 private:
  FunctionAtom() = default;
  void check_dim(std::size_t n) const;
  double residual(std::span<const double> x) const;
  // λ with y = λ a, or nullopt when y is off the line (a != 0 assumed).
  std::optional<double> multiplier(std::span<const double> y, double tol_eq) const;
  void finish();

  AtomKind kind_ = AtomKind::Constant;
  Vector a_;
  Vector q_;
  double t_ = 0.0;
  double p_ = 1.0;
  bool nonnegative_ = false;
};

double eval_atom(const FunctionAtom& atom, std::span<const double> x);

// Correctly rounded <a, x> + c.
double affine_value(std::span<const double> a, std::span<const double> x, double c);

}  // namespace robustsum
