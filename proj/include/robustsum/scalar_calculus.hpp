#pragma once

#include <cstdint>
#include <string_view>

#include "robustsum/extended_real.hpp"
#include "robustsum/scalar_family.hpp"

namespace robustsum {

struct ScalarOptions {
  double tol = 1e-9;
  std::uint64_t budget = 1'000'000;
};

enum class SignVerdict { NonNegative, NonPositive, Zero };
enum class Finiteness { Finite, Infinite, Unknown };
enum class SumKind { ExistsFinite, MinusInfinity, PlusInfinityUnconditional, Undefined, Unknown };

struct SupResult {
  Bracket value;
  SignVerdict sign = SignVerdict::Zero;
};

struct SumClassification {
  SumKind kind = SumKind::Unknown;
  Bracket value;  // meaningful for ExistsFinite only
};

std::string_view to_string(SignVerdict v);
std::string_view to_string(Finiteness v);
std::string_view to_string(SumKind v);

// Exact for finite families; a bracket of width <= tol for countable ones,
// or [+inf, +inf].
Bracket robust_sum_scalar(const ScalarFamily& family, const ScalarOptions& opts = {});
Bracket positive_part_sum(const ScalarFamily& family, const ScalarOptions& opts = {});
Bracket negative_part_sum(const ScalarFamily& family, const ScalarOptions& opts = {});
SupResult sup_scalar(const ScalarFamily& family, const ScalarOptions& opts = {});
Finiteness is_finite_robust_sum(const ScalarFamily& family, const ScalarOptions& opts = {});
SumClassification infinite_sum_classify(const ScalarFamily& family, const ScalarOptions& opts = {});

// Maximum over all nonempty subsets; |I| <= 20.
ExtendedReal brute_force_robust_sum(const ScalarFamily& family);
ExtendedReal brute_force_robust_sum_serial(const ScalarFamily& family);

}  // namespace robustsum
