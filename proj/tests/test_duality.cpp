#include <cmath>
#include <memory>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "robustsum/duality.hpp"
#include "robustsum/epi_union.hpp"
#include "robustsum/lp.hpp"

using namespace robustsum;

namespace {

std::shared_ptr<const FunctionFamily> shared(FunctionFamily f) {
  return std::make_shared<const FunctionFamily>(std::move(f));
}

// phi for a 1-D affine family <a_i, x> - t_i: min Σ_J t_i over J with Σ_J a_i = y.
double affine_phi(const std::vector<Vector>& rows, double y) {
  double best = oracle::inf;
  const std::size_t n = rows.size();
  for (std::size_t m = 1; m < (std::size_t{1} << n); ++m) {
    double a = 0;
    double t = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (m >> i & 1) {
        a += rows[i][0];
        t += rows[i][1];
      }
    }
    if (std::fabs(a - y) <= 1e-9) best = std::min(best, t);
  }
  return best;
}

}  // namespace

TEST_SUITE("duality") {

TEST_CASE("gap dichotomy on the affine pair") {
  const DualityProblem p(shared(affine_family({{0, 0}, {2, 0}})));
  const GapReport g1 = gap_report(p, Vector{1.0});
  CHECK(g1.conjugate.contains(0.0, 1e-6));
  CHECK(g1.phi.is_plus_infinity());
  CHECK(g1.zero_gap == Tri::No);
  CHECK(g1.strong_gap == Tri::No);
  CHECK(weak_duality_check(g1));

  const GapReport g2 = gap_report(p, Vector{2.0});
  CHECK(g2.conjugate.contains(0.0, 1e-6));
  CHECK(g2.phi.lo == 0);
  CHECK(g2.zero_gap == Tri::Yes);
  CHECK(g2.strong_gap == Tri::Yes);
  REQUIRE(g2.witness);
  CHECK(g2.witness->J == std::vector<std::size_t>{2});
  CHECK(decomposition_valid(*g2.witness, Vector{2.0}, 1e-9));
}

TEST_CASE("zero gap without attainment on geometric constants") {
  DualityOptions o;
  o.tol = 1e-10;
  const DualityProblem p(shared(named_family("geometric_constants", {{"dim", 1}})), o);
  const GapReport g = gap_report(p, Vector{0.0});
  CHECK(g.conjugate.contains(-1.0, 1e-9));
  CHECK(g.phi.contains(-1.0, 1e-9));
  CHECK(g.zero_gap == Tri::Yes);
  CHECK(g.strong_gap == Tri::No);
  const PhiResult r = phi_eval(p, Vector{0.0});
  CHECK(r.attained == Tri::No);
  CHECK(r.resolution <= std::ldexp(1.0, -30) * 1.0000001);
  CHECK(gap_report(p, Vector{1.0}).phi.is_plus_infinity());
}

TEST_CASE("phi agrees with subset enumeration on random affine families") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> slope(-3, 3);
  std::uniform_int_distribution<int> offset(-6, 6);
  std::uniform_int_distribution<std::size_t> size(1, 7);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<Vector> rows;
    const std::size_t n = size(rng);
    for (std::size_t i = 0; i < n; ++i) rows.push_back({static_cast<double>(slope(rng)), offset(rng) / 2.0});
    const DualityProblem p(shared(affine_family(rows)));
    for (int y = -4; y <= 4; ++y) {
      const double expect = affine_phi(rows, y);
      const PhiResult r = phi_eval(p, Vector{static_cast<double>(y)});
      if (std::isinf(expect)) {
        CHECK(r.value.is_plus_infinity());
      } else {
        CHECK(r.value.contains(expect, 1e-12));
        REQUIRE(r.best);
        CHECK(decomposition_valid(*r.best, Vector{static_cast<double>(y)}, 1e-9));
      }
      const GapReport g = gap_report(p, Vector{static_cast<double>(y)});
      CHECK(weak_duality_check(g));
    }
  }
}

TEST_CASE("phi of two quadratics is the conjugate of their sum") {
  const DualityProblem p(shared(FunctionFamily::finite({
      FunctionAtom::diagonal_quadratic({1.0}, {0.0}, 0.0),
      FunctionAtom::diagonal_quadratic({3.0}, {0.0}, 0.0),
  })));
  for (double y : {-2.0, -0.5, 0.0, 1.0, 3.0}) {
    const double expect = y * y / 16;
    CHECK(phi_eval(p, Vector{y}).value.contains(expect, 1e-7));
    CHECK(p.conjugate(Vector{y}).value.contains(expect, 1e-6));
    const GapReport g = gap_report(p, Vector{y});
    CHECK(g.zero_gap == Tri::Yes);
    CHECK(weak_duality_check(g));
  }
}

TEST_CASE("conjugate of the robust sum against a grid oracle") {
  const auto fam = shared(hinge_family({{1, 1}, {-1, 0}}, 2));
  const DualityProblem p(fam);
  for (double y : {-1.5, -0.3, 0.0, 0.4, 2.0}) {
    auto g = [&](double x) { return p.f_value(Vector{x}).lo; };
    CHECK(p.conjugate(Vector{y}).value.contains(oracle::grid_sup(g, y, -20, 20), 1e-6));
  }
}

TEST_CASE("small linear programs") {
  // min x1 + 2 x2 subject to x1 + x2 = 1, x >= 0.
  const lp::Result r = lp::solve_standard({{1, 1}}, {1}, {1, 2});
  REQUIRE(r.status == lp::Status::Optimal);
  CHECK(r.value == doctest::Approx(1.0));
  CHECK(lp::solve_standard({{1, 1}}, {-1}, {1, 1}).status == lp::Status::Infeasible);
  CHECK(lp::solve_standard({{1, -1}}, {0}, {0, -1}).status == lp::Status::Unbounded);
}

TEST_CASE("closedness regarding x* matches strong duality on finite affine families") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> slope(-2, 2);
  std::uniform_int_distribution<int> offset(-4, 4);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Vector> rows;
    for (int i = 0; i < 4; ++i) rows.push_back({static_cast<double>(slope(rng)), static_cast<double>(offset(rng))});
    const DualityProblem p(shared(affine_family(rows)));
    const EpiUnionSet A(p);
    for (int y = -3; y <= 3; ++y) {
      const Vector yv{static_cast<double>(y)};
      const GapReport g = gap_report(p, yv);
      const auto c = closed_convex_regarding(A, yv, 1e-9);
      REQUIRE(c.verdict != Closedness::Unknown);
      CHECK((g.strong_gap == Tri::Yes) == (c.verdict == Closedness::Holds));
    }
  }
}

TEST_CASE("epigraph union and its closed convex hull on the affine pair") {
  const DualityProblem p(shared(affine_family({{0, 0}, {2, 0}})));
  const EpiUnionSet A(p);
  CHECK(A.mode() == EpiUnionSet::Mode::FiniteAffine);
  CHECK(epi_union_membership(A, Vector{2.0}, 0).verdict == Verdict::Member);
  CHECK(epi_union_membership(A, Vector{1.0}, 5).verdict == Verdict::NotMember);
  REQUIRE(A.hull_min(Vector{1.0}));
  CHECK(*A.hull_min(Vector{1.0}) == doctest::Approx(0.0));
  REQUIRE(A.hull_min(Vector{3.0}));
  CHECK(*A.hull_min(Vector{3.0}) == kInf);
  std::vector<Vector> dual;
  std::vector<Vector> primal;
  for (int k = 0; k <= 100; ++k) dual.push_back({-1 + 0.04 * k});
  for (int k = 0; k <= 20; ++k) primal.push_back({-2 + 0.2 * k});
  const Lemma7Report l = lemma7_check(A, dual, primal, 1e-6);
  CHECK(l.passed);
  CHECK(l.sandwich_violations == 0);
}

TEST_CASE("convexity of the epigraph union for nonnegative families") {
  const DualityProblem p(shared(hinge_family({{1, 1}, {-1, 0}}, 1)));
  const EpiUnionSet A(p);
  const ConvexityReport r = convexity_witness_nonneg(A, 40, 3);
  CHECK(r.convex);
  CHECK(r.pairs == 40);

  const DualityProblem q(shared(named_family("geometric_constants", {{"dim", 1}})));
  const EpiUnionSet B(q);
  CHECK(convexity_witness_nonneg(B, 10, 1).convex);
}

}
