#include <cmath>
#include <memory>
#include <random>

#include "doctest.h"
#include "robustsum/multifunctions.hpp"

using namespace robustsum;

namespace {

std::shared_ptr<const FunctionFamily> shared(FunctionFamily f) {
  return std::make_shared<const FunctionFamily>(std::move(f));
}

std::vector<std::shared_ptr<const DualityProblem>> problems() {
  DualityOptions fine;
  fine.tol = 1e-10;
  return {
      std::make_shared<const DualityProblem>(shared(affine_family({{0, 0}, {2, 0}}))),
      std::make_shared<const DualityProblem>(shared(affine_family({{1, 1}, {-1, 0}, {2, -1}}))),
      std::make_shared<const DualityProblem>(shared(hinge_family({{1, 1}, {-1, 0}}, 1))),
      std::make_shared<const DualityProblem>(shared(hinge_family({{1, 0}, {-1, -1}}, 2))),
      std::make_shared<const DualityProblem>(shared(named_family("geometric_constants", {{"dim", 1}})), fine),
  };
}

}  // namespace

TEST_SUITE("multifunctions") {

TEST_CASE("eps-subdifferential of a single atom") {
  const auto h = FunctionAtom::hinge_residual({1.0}, 1.0, 1.0);
  // max(x - 1, 0) at x = 0.5 with eps = 0.25: slopes in [0, 0.5].
  CHECK(is_member(eps_subdiff_membership(h, Vector{0.5}, Vector{0.5}, 0.25).verdict));
  CHECK(is_member(eps_subdiff_membership(h, Vector{0.5}, Vector{0.0}, 0.25).verdict));
  CHECK(eps_subdiff_membership(h, Vector{0.5}, Vector{0.6}, 0.25).verdict == Verdict::NotMember);
  CHECK(eps_subdiff_membership(h, Vector{0.5}, Vector{-0.1}, 0.25).verdict == Verdict::NotMember);
}

TEST_CASE("M and N on the affine pair") {
  const DualityProblem p(shared(affine_family({{0, 0}, {2, 0}})));
  CHECK(is_member(M_eps_membership(p, Vector{1.0}, Vector{-0.5}, 0.5).verdict));
  for (double x = -2; x <= 2; x += 0.25) {
    CHECK(N_eps_membership(p, Vector{1.0}, Vector{x}, 0.5).verdict == Verdict::NotMember);
  }
  const Certificate c = N_eps_membership(p, Vector{2.0}, Vector{1.0}, 0.0);
  CHECK(is_member(c.verdict));
  REQUIRE(c.witness);
  CHECK(verify_witness(p, Vector{1.0}, Vector{2.0}, 0.0, *c.witness));
}

TEST_CASE("S_alpha and T_alpha") {
  const DualityProblem p(shared(affine_family({{0, 0}, {2, 0}})));
  const auto S = S_alpha(p, Vector{1.0}, 0.0);
  CHECK(S == std::vector<std::vector<std::size_t>>{{1, 2}, {2}});
  const std::vector<std::size_t> J1{1};
  CHECK(!T_alpha_membership(p, J1, Vector{1.0}, 0.0));
  CHECK(T_alpha_membership(p, J1, Vector{1.0}, 2.0));
}

TEST_CASE("stable sets carry verifiable witnesses") {
  const DualityProblem p(shared(affine_family({{0, 0}, {2, 0}})));
  const Certificate c = Ns_Pis_membership(p, Vector{1.0}, Vector{2.0}, 0.0);
  CHECK(c.verdict == Verdict::Member);
  REQUIRE(c.witness);
  CHECK(verify_witness(p, Vector{1.0}, Vector{2.0}, 0.0, *c.witness));
}

TEST_CASE("B^eps for a fixed decomposition") {
  const DualityProblem p(shared(affine_family({{0, 0}, {2, 0}})));
  Decomposition d;
  d.J = {2};
  d.parts = {{2.0}};
  CHECK(is_member(B_eps_membership(p, Vector{2.0}, d, Vector{0.0}, 0.0).verdict));
  d.parts = {{1.0}};
  CHECK(B_eps_membership(p, Vector{1.0}, d, Vector{0.0}, 0.0).verdict == Verdict::NotMember);
}

TEST_CASE("eta schedule") {
  const auto eta = eta_schedule(0.5, 20);
  REQUIRE(eta.size() == 20);
  CHECK(eta.front() == 0.5);
  CHECK(eta.back() == std::ldexp(1.0, -20));
  CHECK(eta_schedule(3, 2) == std::vector<double>{1.5, 0.75});
}

TEST_CASE("containment chains and inverse coherence on sampled queries") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> ux(-2, 2);
  std::uniform_int_distribution<int> uy(-8, 8);
  std::uniform_int_distribution<int> ue(0, 4);
  for (const auto& pp : problems()) {
    const DualityProblem& p = *pp;
    for (int k = 0; k < 60; ++k) {
      const Vector x{std::round(ux(rng) * 8) / 8};
      const Vector y{uy(rng) / 4.0};
      const double eps = ue(rng) / 4.0;
      const Certificate sub = eps_subdiff_membership(p, x, y, eps);
      const Certificate m = M_eps_membership(p, y, x, eps);
      const Certificate n = N_eps_membership(p, y, x, eps);
      const Certificate pi = Pi_eps_membership(p, x, y, eps);
      const Certificate ps = Ns_Pis_membership(p, x, y, eps);
      CHECK(sub.verdict == m.verdict);
      CHECK(n.verdict == pi.verdict);
      CHECK(n.reason == pi.reason);
      if (is_member(n.verdict)) CHECK(is_member(m.verdict));
      if (is_member(ps.verdict)) CHECK(is_member(pi.verdict));
      if (is_member(pi.verdict)) CHECK(is_member(sub.verdict));
      for (const Certificate* c : {&n, &ps}) {
        if (c->verdict == Verdict::Member && c->witness) CHECK(verify_witness(p, x, y, eps, *c->witness));
      }
      if (is_member(m.verdict)) CHECK(is_member(M_eps_membership(p, y, x, eps + 0.5).verdict));
    }
  }
}

}
