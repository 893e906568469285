#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "robustsum/certificate.hpp"
#include "robustsum/duality.hpp"

namespace robustsum {

// The union over finite J of Σ_{i∈J} epi f_i*.
class EpiUnionSet {
 public:
  enum class Mode { FiniteAffine, Constants, General };

  struct Generator {
    kernels::Mask J = 0;
    Vector A;   // Σ_J a_i*
    double T;   // Σ_J t_i
  };

  explicit EpiUnionSet(const DualityProblem& problem);

  Mode mode() const { return mode_; }
  const DualityProblem& problem() const { return problem_; }
  // Finite affine families with at most 12 atoms.
  const std::vector<Generator>& generators() const { return generators_; }
  // min { r : (y, r) ∈ cl co A }; +inf when the vertical line misses the hull.
  // Only in FiniteAffine mode.
  std::optional<double> hull_min(std::span<const double> y) const;
  // sup_J <A_J, x> - T_J, the conjugate of phi in FiniteAffine mode.
  std::optional<double> phi_conjugate(std::span<const double> x) const;

 private:
  const DualityProblem& problem_;
  Mode mode_ = Mode::General;
  std::vector<Generator> generators_;
};

std::string_view to_string(EpiUnionSet::Mode m);

Certificate epi_union_membership(const EpiUnionSet& A, std::span<const double> y, double r);

enum class Closedness { Holds, Fails, Unknown };
std::string_view to_string(Closedness c);

struct ClosedRegardingResult {
  Closedness verdict = Closedness::Unknown;
  double hull_min = 0;
  Bracket phi;
  std::string note;
};

ClosedRegardingResult closed_convex_regarding(const EpiUnionSet& A, std::span<const double> y, double tol);

struct Lemma7Report {
  bool passed = false;
  std::size_t dual_samples = 0;
  std::size_t primal_samples = 0;
  double max_conjugate_gap = 0;   // |hull_min - f*| over dual samples
  double max_primal_gap = 0;      // |phi* - f| over primal samples
  std::size_t sandwich_violations = 0;
  std::size_t membership_mismatches = 0;  // (y, r) in cl co A vs f*(y) <= r
};

Lemma7Report lemma7_check(const EpiUnionSet& A, std::span<const Vector> dual_samples,
                          std::span<const Vector> primal_samples, double tol);

struct ConvexityReport {
  bool convex = false;
  std::size_t pairs = 0;
  std::size_t witness_failures = 0;
  std::size_t search_failures = 0;
  std::size_t search_unknown = 0;
  std::size_t phi_violations = 0;
  std::string note;
};

ConvexityReport convexity_witness_nonneg(const EpiUnionSet& A, std::size_t samples, std::uint64_t seed,
                                         double tol = 1e-9);

}  // namespace robustsum
