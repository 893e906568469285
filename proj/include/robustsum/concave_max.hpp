#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>

#include "robustsum/atoms.hpp"
#include "robustsum/extended_real.hpp"

namespace robustsum {

// Enclosure-valued concave function, -inf outside its (convex) domain.
using ConcaveFn = std::function<Bracket(std::span<const double>)>;

struct ConcaveMaxOptions {
  double radius = 4.0;
  double tol = 1e-9;
  std::size_t max_evals = 100000;
  std::size_t face_evals = 20000;
  int max_doublings = 30;
  double escape_slope = 1e-6;
  int escape_confirmations = 3;
  Vector center;  // defaults to the origin
};

enum class SupStatus { Interior, Plateau, Escape };
std::string_view to_string(SupStatus s);

struct ConcaveMaxResult {
  Bracket value;       // [+inf, +inf] for Escape
  Vector argmax;       // best point found
  SupStatus status = SupStatus::Interior;
  double radius = 0;   // half-width of the last box
  double lower = 0;    // best value found, also for Escape
  std::size_t evals = 0;
};

// Branch and bound on boxes with the reflection bound
//   max_B g <= 2 g(c) - min_{vertices} g
// valid for concave g, plus radius doubling until the box faces are certified
// below the incumbent (Interior), the incumbent stalls (Plateau) or grows
// linearly (Escape). Throws InconclusiveGrowth otherwise.
ConcaveMaxResult maximize_concave(const ConcaveFn& g, std::size_t n, const ConcaveMaxOptions& opts);

}  // namespace robustsum
