#pragma once

#include <optional>
#include <span>
#include <vector>

#include "robustsum/atoms.hpp"
#include "robustsum/concave_max.hpp"

namespace robustsum {

struct InfConvOptions {
  double tol_eq = 1e-9;
  ConcaveMaxOptions search;
};

// inf { Σ f_i*(y_i) : Σ y_i = y } for the atoms of one subset J.
struct SubsetValue {
  Bracket value;
  std::optional<std::vector<Vector>> parts;  // attains value.hi when present
  bool exact = false;
};

SubsetValue inf_convolution(std::span<const FunctionAtom> atoms, std::span<const double> y,
                            const InfConvOptions& opts = {});

// Σ_k forced points equals y coordinatewise within tol_eq.
bool sums_to(std::span<const Vector> parts, std::span<const double> y, double tol_eq);

}  // namespace robustsum
