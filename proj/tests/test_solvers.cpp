#include <cmath>
#include <memory>

#include "doctest.h"
#include "oracles.hpp"
#include "robustsum/errors.hpp"
#include "robustsum/solvers.hpp"

using namespace robustsum;

TEST_SUITE("solvers") {

TEST_CASE("regression on the geometric cloud") {
  const auto fam = named_family("geometric_cloud", {{"p", 2}});
  const SolveResult r = robust_regression(fam, 2);
  CHECK(r.converged);
  CHECK(std::fabs(r.x_opt[0]) <= 1e-6);
  CHECK(std::fabs(r.x_opt[1] - 1) <= 1e-6);
  CHECK(r.objective.hi <= 1e-10);
  CHECK(!r.domain_notes.empty());
  const RobustSumFunction f(std::make_shared<const FunctionFamily>(fam));
  CHECK(r.objective.contains(f.eval(r.x_opt, 1e-12).mid(), 1e-12));
}

TEST_CASE("regression on a finite cloud") {
  const SolveResult r = robust_regression(cloud_family({{0, 0}, {1, 1}}, 2), 2);
  CHECK(std::fabs(r.x_opt[0]) <= 1e-9);
  CHECK(std::fabs(r.x_opt[1] - 1) <= 1e-9);
}

TEST_CASE("least absolute deviation with the diminishing step") {
  const SolveResult r = robust_regression(cloud_family({{0, 0}, {1, 1}, {2, 2}, {3, 10}}, 1), 1);
  CHECK(r.rule == StepRule::Diminishing);
  auto objective = [](double a, double b) {
    return std::fabs(a) + std::fabs(a + b - 1) + std::fabs(a + 2 * b - 2) + std::fabs(a + 3 * b - 10);
  };
  CHECK(r.objective.lo <= 7 + 1e-3);
  CHECK(objective(r.x_opt[0], r.x_opt[1]) == doctest::Approx(r.objective.lo).epsilon(1e-9));
}

TEST_CASE("best approximation of an inconsistent system") {
  const auto sys = hinge_family({{1, 0}, {-1, -1}}, 2);
  const SolveResult r = best_approx_solution(sys, 2);
  double arg = 0;
  const double best = oracle::grid_min(
      [](double x) { return std::pow(std::max(x, 0.0), 2) + std::pow(std::max(1 - x, 0.0), 2); }, -3, 3, &arg);
  CHECK(r.x_opt[0] == doctest::Approx(arg).epsilon(1e-6));
  CHECK(std::fabs(r.x_opt[0] - 0.5) <= 1e-6);
  CHECK(r.objective.contains(best, 1e-9));
  CHECK(std::fabs(r.norm.mid() - std::sqrt(0.5)) <= 1e-6);
}

TEST_CASE("polyak step with a known optimum") {
  SolveOptions o;
  o.rule = StepRule::Polyak;
  o.optimal_value = 0.5;
  const SolveResult r = best_approx_solution(hinge_family({{1, 0}, {-1, -1}}, 2), 2, o);
  CHECK(std::fabs(r.x_opt[0] - 0.5) <= 1e-4);
}

TEST_CASE("truncated gradient against the closed form and finite differences") {
  const auto fam = named_family("geometric_cloud", {{"p", 2}});
  const TruncatedGradient g = subgradient_of_truncation(fam, Vector{0, 0.5}, 30);
  CHECK(g.gradient[1] == doctest::Approx(2 * (0.5 - 1) / 3).epsilon(1e-8));
  const double h = 1e-6;
  for (const Vector& x : {Vector{0.3, 0.2}, Vector{-0.1, 1.7}}) {
    const TruncatedGradient gx = subgradient_of_truncation(fam, x, 30);
    for (std::size_t k = 0; k < 2; ++k) {
      Vector up = x;
      Vector dn = x;
      up[k] += h;
      dn[k] -= h;
      const double fd = (subgradient_of_truncation(fam, up, 30).value - subgradient_of_truncation(fam, dn, 30).value) /
                        (2 * h);
      CHECK(gx.gradient[k] == doctest::Approx(fd).epsilon(1e-5));
    }
  }
  const TruncatedGradient fin = subgradient_of_truncation(cloud_family({{0, 0}, {1, 1}}, 2), Vector{0, 1}, 2);
  CHECK(fin.tail_error.hi == 0);
  CHECK(fin.gradient == Vector{0, 0});
}

TEST_CASE("nonnegative minimization with a countable family") {
  SolveOptions o;
  o.init = Vector{0.0};
  const SolveResult r = minimize_nonneg(named_family("harmonic_mix", {{"p", 2}}), 2, o);
  CHECK(r.objective.hi < kInf);
  CHECK(r.x_opt[0] <= 0);
}

TEST_CASE("solver preconditions") {
  CHECK_THROWS_AS(robust_regression(affine_family({{1, 0}}), 2), Error);
}

}
