#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "robustsum/errors.hpp"
#include "robustsum/kernels.hpp"
#include "robustsum/scalar_calculus.hpp"

using namespace robustsum;

TEST_SUITE("scalar") {

TEST_CASE("finite family examples") {
  const auto fam = ScalarFamily::finite(std::vector<double>{2, -3, 1, -0.5});
  CHECK(robust_sum_scalar(fam).lo == 3);
  CHECK(robust_sum_scalar(fam).hi == 3);
  CHECK(positive_part_sum(fam).lo == 3);
  CHECK(negative_part_sum(fam).lo == 3.5);
  const SupResult s = sup_scalar(fam);
  CHECK(s.value.lo == 2);
  CHECK(s.sign == SignVerdict::NonNegative);
  CHECK(brute_force_robust_sum(fam).value() == 3);
  CHECK(brute_force_robust_sum(ScalarFamily::finite(std::vector<double>{-1})).value() == -1);
  CHECK(brute_force_robust_sum(ScalarFamily::finite(std::vector<double>{0, 0, 0})).value() == 0);
  CHECK(is_finite_robust_sum(ScalarFamily::finite(std::vector<double>{2, -3})) == Finiteness::Finite);
}

TEST_CASE("all-zero family") {
  const auto fam = ScalarFamily::finite(std::vector<double>{0, 0, 0, 0});
  CHECK(positive_part_sum(fam).lo == 0);
  CHECK(negative_part_sum(fam).lo == 0);
  CHECK(sup_scalar(fam).sign == SignVerdict::Zero);
}

TEST_CASE("even squares against odd harmonics") {
  const auto fam = builtin_scalar_family("example1");
  ScalarOptions o;
  o.tol = 1e-8;
  const double target = M_PI * M_PI / 24;
  const Bracket r = robust_sum_scalar(fam, o);
  CHECK(r.hi - r.lo <= 1e-8);
  CHECK(r.contains(target, 1e-12));
  CHECK(positive_part_sum(fam, o).contains(target, 1e-12));
  CHECK(negative_part_sum(fam, o).is_plus_infinity());
  CHECK(is_finite_robust_sum(fam, o) == Finiteness::Finite);
  CHECK(infinite_sum_classify(fam, o).kind == SumKind::MinusInfinity);
}

TEST_CASE("alternating families") {
  for (const char* name : {"alternating", "alternating_harmonic"}) {
    const auto fam = builtin_scalar_family(name);
    CHECK(robust_sum_scalar(fam).is_plus_infinity());
    CHECK(is_finite_robust_sum(fam) == Finiteness::Infinite);
    CHECK(infinite_sum_classify(fam).kind == SumKind::Undefined);
  }
}

TEST_CASE("nonpositive branch of the dichotomy") {
  const auto fam = builtin_scalar_family("shifted_harmonic");
  const Bracket r = robust_sum_scalar(fam);
  CHECK(r.contains(-1.0, 1e-9));
  const SupResult s = sup_scalar(fam);
  CHECK(s.sign == SignVerdict::NonPositive);
  CHECK(s.value.contains(-1.0, 1e-9));

  const auto neg = builtin_scalar_family("negative_harmonic");
  CHECK(sup_scalar(neg).sign == SignVerdict::Zero);
  CHECK(robust_sum_scalar(neg).contains(0.0, 1e-12));
}

TEST_CASE("geometric series") {
  const auto fam = builtin_scalar_family("geometric(0.5)");
  const SumClassification c = infinite_sum_classify(fam);
  CHECK(c.kind == SumKind::ExistsFinite);
  CHECK(c.value.contains(1.0, 1e-9));
  CHECK(robust_sum_scalar(fam).contains(1.0, 1e-9));
}

TEST_CASE("countable family without a tail certificate") {
  const auto fam = builtin_scalar_family("example1", false);
  ScalarOptions o;
  o.budget = 1000;
  CHECK_THROWS_AS(robust_sum_scalar(fam, o), Error);
}

TEST_CASE("minus infinity terms are rejected") {
  CHECK_THROWS_AS(ScalarFamily::finite(std::vector<ExtendedReal>{1.0, ExtendedReal::minus_infinity()}), Error);
}

TEST_CASE("size limit of the brute force oracle") {
  const auto fam = ScalarFamily::finite(std::vector<double>(21, 1.0));
  CHECK_THROWS_AS(brute_force_robust_sum(fam), Error);
}

TEST_CASE("dichotomy matches exhaustive enumeration on random families") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> size(1, 12);
  for (int trial = 0; trial < 400; ++trial) {
    const auto a = oracle::random_terms(rng, size(rng), trial % 3 == 0);
    const auto fam = ScalarFamily::finite(a);
    const Bracket r = robust_sum_scalar(fam);
    const double brute = brute_force_robust_sum(fam).value();
    REQUIRE(r.lo == r.hi);
    CHECK(r.lo == brute);
    CHECK(brute_force_robust_sum_serial(fam).value() == brute);
    const double plain = static_cast<double>(oracle::max_subset_sum(a));
    if (std::isinf(brute)) CHECK(plain == brute);
    else CHECK(plain == doctest::Approx(brute).epsilon(1e-15));

    const double pos = positive_part_sum(fam).lo;
    CHECK(std::max(r.lo, 0.0) == pos);
    const SupResult s = sup_scalar(fam);
    CHECK(s.value.lo <= r.lo);
    const bool sup_nonneg = s.value.lo >= 0;
    CHECK(sup_nonneg == (r.lo >= 0));
    CHECK(sup_nonneg == (r.lo == pos));
    CHECK((is_finite_robust_sum(fam) == Finiteness::Finite) == std::isfinite(pos));
  }
}

TEST_CASE("parallel and serial subset kernels agree") {
  std::mt19937_64 rng(7);
  for (std::size_t n = 1; n <= 16; ++n) {
    const auto a = oracle::random_terms(rng, n, false);
    CHECK(kernels::max_subset_sum(a) == kernels::max_subset_sum_serial(a));
  }
  const auto masks = kernels::subset_masks(10, 3);
  for (std::size_t k = 1; k < masks.size(); ++k) CHECK(masks[k - 1] < masks[k]);
  for (auto m : masks) CHECK(kernels::popcount(m) <= 3);
}

}
