#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "robustsum/conjugate.hpp"
#include "robustsum/function_family.hpp"
#include "robustsum/inf_convolution.hpp"
#include "robustsum/kernels.hpp"

namespace robustsum {

enum class Tri { Yes, No, Unknown };
std::string_view to_string(Tri t);

struct DualityOptions {
  double tol = 1e-9;
  double tol_eq = 1e-9;
  unsigned max_card = 20;
  unsigned eta_steps = 20;
  std::uint64_t budget = 1'000'000;
  double attain_tol = 1e-10;
  unsigned scan_limit = 30;  // index cutoff K for countable families
  ConjugateOptions conj;
  InfConvOptions infconv;
};

struct Decomposition {
  std::vector<std::size_t> J;  // 1-based, increasing
  std::vector<Vector> parts;
  double value = 0;  // Σ f_i*(parts_i)
};

bool decomposition_valid(const Decomposition& d, std::span<const double> xstar, double tol_eq);

struct PhiResult {
  Bracket value;
  std::optional<Decomposition> best;
  Tri attained = Tri::Unknown;
  bool exhaustive = false;
  double resolution = 0;  // attainment gap bound behind a "No" for countable families
  std::string mode;
  std::string note;
};

struct GapReport {
  Vector xstar;
  Bracket conjugate;  // f*(x*)
  Bracket phi;
  Bracket primal;     // inf(RP) = -f*(x*)
  Bracket dual;       // sup(RD) = -phi(x*)
  Tri zero_gap = Tri::Unknown;
  Tri strong_gap = Tri::Unknown;
  std::optional<Decomposition> witness;
  std::vector<std::string> certificates;
  std::string conjugate_status;
  std::string phi_mode;
};

// Shared state for all dual-side queries on one family.
class DualityProblem {
 public:
  explicit DualityProblem(std::shared_ptr<const FunctionFamily> family, DualityOptions opts = {});

  const FunctionFamily& family() const { return *family_; }
  const RobustSumFunction& f() const { return f_; }
  const DualityOptions& options() const { return opts_; }
  std::size_t dimension() const { return family_->dimension(); }

  Bracket f_value(std::span<const double> x) const { return f_.eval(x); }
  ConjugateEstimate conjugate(std::span<const double> y) const;
  PhiResult phi(std::span<const double> y) const;

  // Subsets that the enumeration covers: finite I, or the first scan_limit
  // indices of a countable family (at most 16 of them).
  unsigned enumerable_size() const;
  bool enumeration_exhaustive() const;
  std::vector<FunctionAtom> subset_atoms(kernels::Mask m) const;
  SubsetValue subset_value(kernels::Mask m, std::span<const double> y) const;
  // One entry per mask with |J| <= max_card, ascending mask order.
  std::vector<std::pair<kernels::Mask, SubsetValue>> subset_values(std::span<const double> y,
                                                                   bool parallel = true) const;
  // f_i(x) for i in J, correctly rounded sum.
  double subset_primal_sum(kernels::Mask m, std::span<const double> x) const;

  // Constant families: theta = f(.) and the analysis of its attainment.
  struct ConstantsAnalysis {
    Bracket theta;
    std::vector<std::size_t> best_J;  // best subset among the first scan_limit indices
    double best_sum = 0;              // Σ_{best_J} f_i
    Tri attained = Tri::Unknown;
    double resolution = 0;
  };
  ConstantsAnalysis constants_analysis() const;

 private:
  PhiResult phi_uncached(std::span<const double> y) const;

  std::shared_ptr<const FunctionFamily> family_;
  DualityOptions opts_;
  RobustSumFunction f_;
  mutable std::mutex mu_;
  mutable std::map<Vector, ConjugateEstimate> conj_cache_;
  mutable std::map<Vector, PhiResult> phi_cache_;
  mutable std::map<std::pair<kernels::Mask, Vector>, SubsetValue> subset_cache_;
  mutable std::optional<ConstantsAnalysis> constants_;
};

PhiResult phi_eval(const DualityProblem& problem, std::span<const double> xstar);
GapReport gap_report(const DualityProblem& problem, std::span<const double> xstar);
bool weak_duality_check(const GapReport& report, double tol = 1e-9);

}  // namespace robustsum
