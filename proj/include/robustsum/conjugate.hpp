#pragma once

#include <span>
#include <string>

#include "robustsum/atoms.hpp"
#include "robustsum/concave_max.hpp"
#include "robustsum/function_family.hpp"

namespace robustsum {

// Closed-form conjugate of an atom, evaluable at any dual vector.
class ConjugateDescriptor {
 public:
  ConjugateDescriptor(FunctionAtom atom, double tol_eq) : atom_(std::move(atom)), tol_eq_(tol_eq) {}
  double operator()(std::span<const double> y) const { return atom_.conjugate(y, tol_eq_); }
  std::string describe() const;
  const FunctionAtom& atom() const { return atom_; }

 private:
  FunctionAtom atom_;
  double tol_eq_;
};

ConjugateDescriptor conjugate_atom(const FunctionAtom& atom, double tol_eq = 1e-9);

struct ConjugateOptions {
  ConcaveMaxOptions search;
};

struct ConjugateEstimate {
  Bracket value;
  SupStatus status = SupStatus::Interior;
  Vector argmax;
  double lower = 0;
  std::string mode;  // "numeric" or "analytic"
};

// f*(y) = sup_x <y, x> - f(x) by concave maximization.
ConjugateEstimate conjugate_numeric(const RobustSumFunction& f, std::span<const double> y,
                                    const ConjugateOptions& opts = {});

}  // namespace robustsum
