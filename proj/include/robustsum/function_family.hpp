#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "robustsum/atoms.hpp"
#include "robustsum/scalar_calculus.hpp"
#include "robustsum/scalar_family.hpp"

namespace robustsum {

struct CountableAtoms {
  std::function<FunctionAtom(std::uint64_t)> atom;
  // Tail facts for the scalar family (f_i(x))_i at a given x.
  std::function<TailCertificate(std::span<const double>)> pointwise_tail;
  bool all_nonnegative = false;
  bool all_constant = false;
  // Pointwise limit of the atoms as i -> inf; the robust sum diverges where it is positive.
  std::optional<FunctionAtom> limit_atom;
};

class FunctionFamily {
 public:
  static FunctionFamily finite(std::vector<FunctionAtom> atoms, std::string name = {});
  static FunctionFamily countable(std::size_t dim, CountableAtoms gen, std::string name,
                                  std::vector<Vector> domain_sample);

  const std::string& name() const { return name_; }
  std::size_t dimension() const { return dim_; }
  bool is_finite() const { return finite_; }
  std::size_t size() const { return atoms_.size(); }
  const std::vector<FunctionAtom>& atoms() const { return atoms_; }
  // Indices start at 1.
  FunctionAtom atom(std::uint64_t i) const;
  const CountableAtoms* generator() const { return finite_ ? nullptr : &gen_; }
  const std::vector<Vector>& domain_sample() const { return sample_; }

  bool all_nonnegative() const;
  bool all_constant() const;
  // Every conjugate is finite at a single point (affine / constant atoms).
  bool all_forced() const;
  bool all_affine_finite() const { return finite_ && all_forced(); }
  std::optional<FunctionAtom> limit_atom() const;

  ScalarFamily pointwise(std::span<const double> x) const;

 private:
  std::string name_;
  std::size_t dim_ = 0;
  bool finite_ = true;
  std::vector<FunctionAtom> atoms_;
  CountableAtoms gen_;
  std::vector<Vector> sample_;
};

// Rows are [a..., t] (affine), [a..., b] (hinge / power) and [t, s] (cloud).
FunctionFamily affine_family(const std::vector<Vector>& rows);
FunctionFamily hinge_family(const std::vector<Vector>& rows, double p);
FunctionFamily power_family(const std::vector<Vector>& rows, double p);
FunctionFamily cloud_family(const std::vector<Vector>& points, double p);

// Named countable constructions:
//   geometric_cloud      |x1 + x2 t_i - s_i|^p with t_i = s_i = 2^-i
//   geometric_constants  f_i = 2^-i (affine atoms with zero slope), dimension "dim"
//   geometric_residuals  |x 2^-i|^p on R
//   harmonic_mix         max(1 - x, 0)^p and max(x + 1/i, 0)^p, i >= 1, on R
FunctionFamily named_family(const std::string& name, const std::map<std::string, double>& params);
std::vector<std::string> named_family_names();

class RobustSumFunction {
 public:
  explicit RobustSumFunction(std::shared_ptr<const FunctionFamily> family, ScalarOptions opts = {});

  const FunctionFamily& family() const { return *family_; }
  std::shared_ptr<const FunctionFamily> family_ptr() const { return family_; }
  const ScalarOptions& options() const { return opts_; }

  Bracket eval(std::span<const double> x) const { return eval(x, opts_.tol); }
  Bracket eval(std::span<const double> x, double tol) const;

 private:
  std::shared_ptr<const FunctionFamily> family_;
  ScalarOptions opts_;
  mutable std::shared_mutex mu_;
  mutable std::map<std::pair<Vector, double>, Bracket> cache_;
};

Bracket robust_sum_eval(const RobustSumFunction& f, std::span<const double> x, double tol);
Bracket robust_lp_norm(const FunctionFamily& residuals, std::span<const double> x, double p,
                       const ScalarOptions& opts = {});
Bracket nonneg_infinite_sum_eval(const RobustSumFunction& f, std::span<const double> x, double tol);

}  // namespace robustsum
