#include <cmath>
#include <memory>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "robustsum/errors.hpp"
#include "robustsum/function_family.hpp"
#include "robustsum/scalar_calculus.hpp"

using namespace robustsum;

namespace {

std::shared_ptr<const FunctionFamily> shared(FunctionFamily f) {
  return std::make_shared<const FunctionFamily>(std::move(f));
}

}  // namespace

TEST_SUITE("families") {

TEST_CASE("atom conjugates match a grid supremum") {
  const std::vector<FunctionAtom> atoms = {
      FunctionAtom::diagonal_quadratic({0.5}, {1.0}, 2.0),
      FunctionAtom::power_residual({2.0}, 1.0, 2.0),
      FunctionAtom::power_residual({1.0}, -0.5, 1.5),
      FunctionAtom::hinge_residual({1.0}, 1.0, 2.0),
      FunctionAtom::hinge_residual({-2.0}, 0.5, 3.0),
  };
  for (const auto& a : atoms) {
    for (double y : {-1.5, -0.25, 0.0, 0.3, 1.0, 2.5}) {
      auto g = [&](double x) { return a.eval(std::vector<double>{x}); };
      const double closed = a.conjugate(std::vector<double>{y});
      if (std::isinf(closed)) {
        CHECK(oracle::grid_sup(g, y, -1e3, 1e3) > 10);
        continue;
      }
      INFO(a.describe(), " at y = ", y);
      CHECK(closed == doctest::Approx(oracle::grid_sup(g, y, -60, 60)).epsilon(1e-7));
    }
  }
}

TEST_CASE("conjugates of affine, constant and p = 1 atoms are indicators") {
  const auto aff = FunctionAtom::affine({2.0}, 3.0);
  CHECK(aff.conjugate(std::vector<double>{2.0}) == 3.0);
  CHECK(std::isinf(aff.conjugate(std::vector<double>{1.0})));
  const auto c = FunctionAtom::constant(-0.25, 1);
  CHECK(c.conjugate(std::vector<double>{0.0}) == 0.25);
  CHECK(std::isinf(c.conjugate(std::vector<double>{0.5})));
  const auto h = FunctionAtom::hinge_residual({1.0}, 1.0, 1.0);
  CHECK(h.conjugate(std::vector<double>{0.5}) == doctest::Approx(0.5));
  CHECK(std::isinf(h.conjugate(std::vector<double>{1.5})));
}

TEST_CASE("Fenchel-Young inequality on random points") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3, 3);
  const std::vector<FunctionAtom> atoms = {
      FunctionAtom::diagonal_quadratic({1.0, 0.5}, {0.0, 1.0}, 0.0),
      FunctionAtom::power_residual({1.0, -1.0}, 0.5, 2.0),
      FunctionAtom::hinge_residual({0.5, 1.0}, 0.0, 1.5),
  };
  for (const auto& a : atoms) {
    for (int k = 0; k < 200; ++k) {
      const Vector x{u(rng), u(rng)};
      const Vector y{u(rng), u(rng)};
      CHECK(a.fenchel_young_gap(x, y) >= -1e-12);
      CHECK(a.eval(x) + a.conjugate(y) >= y[0] * x[0] + y[1] * x[1] - 1e-9);
    }
  }
}

TEST_CASE("pointwise consistency of the robust sum function") {
  const RobustSumFunction f(shared(affine_family({{1, 0}, {-2, 1}, {0.5, -3}})));
  for (double x : {-2.0, -0.5, 0.0, 1.0, 3.0}) {
    const Vector v{x};
    const Bracket b = f.eval(v);
    const std::vector<double> terms = {x, -2 * x - 1, 0.5 * x + 3};
    CHECK(b.lo == doctest::Approx(static_cast<double>(oracle::max_subset_sum(terms))));
    CHECK(b.lo == robust_sum_scalar(f.family().pointwise(v)).lo);
  }
}

TEST_CASE("geometric cloud values") {
  const auto fam = shared(named_family("geometric_cloud", {{"p", 2}}));
  const RobustSumFunction f(fam);
  CHECK(f.eval(Vector{0, 1}).contains(0.0, 1e-15));
  CHECK(f.eval(Vector{0, 0.5}).contains(1.0 / 12, 1e-12));
  CHECK(nonneg_infinite_sum_eval(f, Vector{0, 0.5}, 1e-12).contains(1.0 / 12, 1e-12));
  CHECK(f.eval(Vector{0.1, 1}).is_plus_infinity());
}

TEST_CASE("nonnegative identity against partial sums") {
  const auto fam = named_family("geometric_cloud", {{"p", 2}});
  const RobustSumFunction f(std::make_shared<const FunctionFamily>(fam));
  const Vector x{0, -0.75};
  const Bracket b = f.eval(x, 1e-12);
  double partial = 0;
  for (std::uint64_t i = 1; i <= 60; ++i) partial += fam.atom(i).eval(x);
  CHECK(b.contains(partial, 1e-12));
}

TEST_CASE("robust lp norm") {
  const auto geo = named_family("geometric_residuals", {{"p", 2}});
  CHECK(robust_lp_norm(geo, Vector{1.0}, 2).contains(std::sqrt(1.0 / 3), 1e-9));
  CHECK(robust_lp_norm(geo, Vector{0.0}, 2).contains(0.0));
  const auto fin = power_family({{0, 3}, {0, 4}}, 2);
  CHECK(robust_lp_norm(fin, Vector{0.0}, 2).contains(5.0, 1e-14));
  const auto scaled = power_family({{0, 9}, {0, 12}}, 2);
  CHECK(robust_lp_norm(scaled, Vector{0.0}, 2).contains(15.0, 1e-13));
  CHECK_THROWS_AS(robust_lp_norm(affine_family({{1, 0}}), Vector{0.0}, 2), Error);
}

TEST_CASE("norm scaling on random finite residual families") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int t = 0; t < 50; ++t) {
    std::vector<Vector> rows;
    std::vector<Vector> scaled;
    const double lam = u(rng);
    for (int i = 0; i < 5; ++i) {
      const double a = u(rng);
      const double b = u(rng);
      rows.push_back({a, b});
      scaled.push_back({lam * a, lam * b});
    }
    const Vector x{u(rng)};
    const double n1 = robust_lp_norm(power_family(rows, 2), x, 2).lo;
    const double n2 = robust_lp_norm(power_family(scaled, 2), x, 2).lo;
    CHECK(n2 == doctest::Approx(std::fabs(lam) * n1).epsilon(1e-12));
  }
}

TEST_CASE("midpoint convexity of robust sums of convex atoms") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-3, 3);
  const RobustSumFunction f(shared(FunctionFamily::finite({
      FunctionAtom::affine({1.0}, 0.5),
      FunctionAtom::power_residual({1.0}, 1.0, 2.0),
      FunctionAtom::hinge_residual({-1.0}, 0.0, 1.0),
      FunctionAtom::diagonal_quadratic({0.25}, {-1.0}, 1.0),
      FunctionAtom::constant(-2.0, 1),
  })));
  for (int k = 0; k < 300; ++k) {
    const double a = u(rng);
    const double b = u(rng);
    const double m = f.eval(Vector{(a + b) / 2}).hi;
    CHECK(m <= (f.eval(Vector{a}).lo + f.eval(Vector{b}).lo) / 2 + 2e-9);
  }
}

TEST_CASE("invalid families are rejected") {
  CHECK_THROWS_AS(FunctionAtom::power_residual({1.0}, 0.0, 0.5), Error);
  CHECK_THROWS_AS(FunctionAtom::affine({kInf}, 0.0), Error);
  CHECK_THROWS_AS(named_family("geometric_cloud", {{"q", 1}}), Error);
  CHECK_THROWS_AS(named_family("nope", {}), Error);
  CHECK(robust_sum_eval(RobustSumFunction(shared(named_family("harmonic_mix", {{"p", 2}}))), Vector{0.5}, 1e-9)
            .is_plus_infinity());
}

}
