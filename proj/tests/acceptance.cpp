#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "robustsum/epi_union.hpp"
#include "robustsum/multifunctions.hpp"
#include "robustsum/scalar_calculus.hpp"
#include "robustsum/solvers.hpp"
#include "robustsum/theorems.hpp"

using namespace robustsum;

namespace {

struct Criterion {
  const char* id;
  const char* title;
  double limit_s;
  std::function<std::string()> body;  // empty string on success, otherwise the failure
};

std::shared_ptr<const FunctionFamily> shared(FunctionFamily f) {
  return std::make_shared<const FunctionFamily>(std::move(f));
}

std::string fmt(const char* f, double a, double b = 0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::vector<Vector> line(double lo, double hi, int n) {
  std::vector<Vector> out;
  for (int k = 0; k < n; ++k) out.push_back({lo + (hi - lo) * k / (n - 1)});
  return out;
}

std::string ac1() {
  ScalarOptions o;
  o.tol = 1e-8;
  const auto fam = builtin_scalar_family("example1");
  const Bracket r = robust_sum_scalar(fam, o);
  const double target = M_PI * M_PI / 24;
  if (std::fabs(r.lo - target) > 1e-8 || std::fabs(r.hi - target) > 1e-8) {
    return fmt("robust sum [%.12g, %.12g] not within 1e-8 of pi^2/24", r.lo, r.hi);
  }
  if (infinite_sum_classify(fam, o).kind != SumKind::MinusInfinity) return "classification is not minus_infinity";
  return "";
}

std::string ac2() {
  for (const char* name : {"alternating", "alternating_harmonic"}) {
    const auto fam = builtin_scalar_family(name);
    if (!robust_sum_scalar(fam).is_plus_infinity()) return std::string(name) + ": robust sum is not +inf";
    if (infinite_sum_classify(fam).kind != SumKind::Undefined) return std::string(name) + ": not undefined";
  }
  return "";
}

std::string ac3() {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<std::size_t> size(1, 12);
  for (int t = 0; t < 1000; ++t) {
    const auto a = oracle::random_terms(rng, size(rng), t % 4 == 0);
    const auto fam = ScalarFamily::finite(a);
    const double brute = brute_force_robust_sum(fam).value();
    const Bracket r = robust_sum_scalar(fam);
    const double pos = positive_part_sum(fam).lo;
    const double sup = sup_scalar(fam).value.lo;
    const bool finite = is_finite_robust_sum(fam) == Finiteness::Finite;
    if (r.lo != brute || r.hi != brute) return fmt("family %g: dichotomy %.17g vs enumeration", t, r.lo);
    if (std::max(brute, 0.0) != pos) return fmt("family %g: positive-part law fails", t);
    if ((sup >= 0) != (brute >= 0) || (sup >= 0) != (brute == pos)) return fmt("family %g: sign equivalence fails", t);
    if (sup > brute) return fmt("family %g: sup exceeds the robust sum", t);
    if (finite != std::isfinite(pos)) return fmt("family %g: finiteness criterion fails", t);
  }
  return "";
}

std::string ac4() {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<int> dim(1, 3);
  std::uniform_int_distribution<int> count(1, 5);
  std::uniform_int_distribution<int> coef(-3, 3);
  std::bernoulli_distribution coin(0.5);
  std::size_t checks = 0;
  for (int t = 0; t < 500; ++t) {
    const int n = dim(rng);
    const int m = count(rng);
    std::vector<Vector> rows;
    for (int i = 0; i < m; ++i) {
      Vector r;
      for (int k = 0; k <= n; ++k) r.push_back(coef(rng) / 2.0);
      rows.push_back(r);
    }
    DualityOptions o;
    const DualityProblem p(shared(affine_family(rows)), o);
    Decomposition d;
    Vector xstar(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < m; ++i) {
      if (!coin(rng) && !(i == m - 1 && d.J.empty())) continue;
      d.J.push_back(static_cast<std::size_t>(i + 1));
      Vector part(rows[static_cast<std::size_t>(i)].begin(), rows[static_cast<std::size_t>(i)].end() - 1);
      if (coin(rng)) part[0] += 0.5;
      for (int k = 0; k < n; ++k) xstar[static_cast<std::size_t>(k)] += part[static_cast<std::size_t>(k)];
      d.parts.push_back(part);
      d.value += p.family().atom(static_cast<std::uint64_t>(i + 1)).conjugate(part);
    }
    const ConjugateEstimate c = p.conjugate(xstar);
    if (t % 25 == 0) {
      const Bracket numeric = conjugate_numeric(p.f(), xstar).value;
      const bool both_inf = numeric.lo == kInf && c.value.lo == kInf;
      if (!both_inf && !(numeric.lo <= c.value.hi + 1e-6 && c.value.lo <= numeric.hi + 1e-6)) {
        return fmt("family %g: polyhedral and numeric conjugates disagree (%.17g)", t, c.value.lo);
      }
    }
    ++checks;
    if (c.value.lo > d.value + 1e-9) return fmt("family %g: f*(x*) = %.17g exceeds the decomposition value", t, c.value.lo);
    const GapReport g = gap_report(p, xstar);
    if (!weak_duality_check(g, 1e-9)) return fmt("family %g: gap report violates weak duality", t);
  }
  return checks == 500 ? "" : "not every family was checked";
}

std::string ac5() {
  const DualityProblem p(shared(affine_family({{0, 0}, {2, 0}})));
  const GapReport g1 = gap_report(p, Vector{1.0});
  if (std::fabs(g1.conjugate.lo) > 1e-6 || std::fabs(g1.conjugate.hi) > 1e-6) return "f*(1) is not 0";
  if (!g1.phi.is_plus_infinity() || g1.zero_gap != Tri::No) return "phi(1) is not +inf with zero_gap no";
  const GapReport g2 = gap_report(p, Vector{2.0});
  if (std::fabs(g2.conjugate.lo) > 1e-6 || std::fabs(g2.conjugate.hi) > 1e-6) return "f*(2) is not 0";
  if (g2.phi.lo != 0 || g2.phi.hi != 0) return "phi(2) is not 0";
  if (g2.strong_gap != Tri::Yes || !g2.witness || g2.witness->J != std::vector<std::size_t>{2}) {
    return "strong witness J = {2} missing";
  }
  const auto xs = line(-2, 2, 41);
  const std::vector<double> eps{0.5};
  const TheoremCheck t = theorem1_verify(p, Vector{1.0}, eps, xs);
  if (t.status != CheckStatus::Consistent || t.premise != Tri::No) return "zero-gap grader is not consistent";
  std::size_t m_members = 0;
  for (const auto& x : xs) {
    if (N_eps_membership(p, Vector{1.0}, x, 0.5).verdict != Verdict::NotMember) return "N^0.5 f(1) is not empty";
    if (is_member(M_eps_membership(p, Vector{1.0}, x, 0.5).verdict)) ++m_members;
  }
  if (m_members == 0) return "M^0.5 f(1) has no sampled member";
  return "";
}

std::string ac6() {
  DualityOptions o;
  o.tol = 1e-10;
  o.scan_limit = 30;
  const DualityProblem p(shared(named_family("geometric_constants", {{"dim", 1}})), o);
  const GapReport g = gap_report(p, Vector{0.0});
  if (!g.conjugate.contains(-1.0, 1e-9) || g.conjugate.width() > 2e-9) return "f*(0) is not -1";
  if (!g.phi.contains(-1.0, 1e-9) || g.phi.width() > 2e-9) return "phi(0) is not -1";
  if (g.zero_gap != Tri::Yes || g.strong_gap != Tri::No) return "expected zero gap without strong duality";
  const PhiResult r = phi_eval(p, Vector{0.0});
  if (r.resolution > std::ldexp(1.0, -30) * (1 + 1e-12)) return fmt("resolution %.3g above 2^-30", r.resolution);
  const EpiUnionSet A(p);
  if (closed_convex_regarding(A, Vector{0.0}, o.tol).verdict != Closedness::Fails) return "closedness does not fail at 0";

  const DualityProblem pair(shared(affine_family({{0, 0}, {2, 0}})));
  const EpiUnionSet B(pair);
  for (const auto& [prob, set, grid] :
       {std::tuple{&pair, &B, line(-1, 3, 9)}, std::tuple{&p, &A, line(-1, 1, 3)}}) {
    for (const auto& y : grid) {
      const bool strong = gap_report(*prob, y).strong_gap == Tri::Yes;
      const Closedness c = closed_convex_regarding(*set, y, prob->options().tol).verdict;
      if (c == Closedness::Unknown || strong != (c == Closedness::Holds)) {
        return fmt("strong duality and closedness disagree at x* = %g", y[0]);
      }
    }
  }
  const std::vector<double> eps{0, 0.5, 1};
  if (theorem3_verify(p, Vector{0.0}, eps, line(-2, 2, 21)).status != CheckStatus::Consistent) {
    return "strong-duality grader is not consistent";
  }
  return "";
}

std::string ac7() {
  DualityOptions fine;
  fine.tol = 1e-10;
  const std::vector<std::shared_ptr<const DualityProblem>> problems = {
      std::make_shared<const DualityProblem>(shared(affine_family({{0, 0}, {2, 0}}))),
      std::make_shared<const DualityProblem>(shared(named_family("geometric_constants", {{"dim", 1}})), fine),
      std::make_shared<const DualityProblem>(shared(hinge_family({{1, 0}, {-1, -1}}, 2))),
      std::make_shared<const DualityProblem>(shared(hinge_family({{1, 1}, {-1, 0}}, 1))),
  };
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::size_t> which(0, problems.size() - 1);
  std::uniform_int_distribution<int> ux(-16, 16);
  std::uniform_int_distribution<int> uy(-12, 12);
  std::uniform_int_distribution<int> ue(0, 8);
  for (int q = 0; q < 1000; ++q) {
    const DualityProblem& p = *problems[which(rng)];
    const Vector x{ux(rng) / 8.0};
    const Vector y{uy(rng) / 4.0};
    const double eps = ue(rng) / 8.0;
    const Verdict sub = eps_subdiff_membership(p, x, y, eps).verdict;
    const Verdict m = M_eps_membership(p, y, x, eps).verdict;
    const Verdict n = N_eps_membership(p, y, x, eps).verdict;
    const Verdict pi = Pi_eps_membership(p, x, y, eps).verdict;
    const Verdict ps = Ns_Pis_membership(p, x, y, eps).verdict;
    if (sub != m || n != pi) return fmt("query %g: inverse verdicts differ", q);
    if (is_member(ps) && !is_member(pi)) return fmt("query %g: stable set not inside Pi^eps", q);
    if (is_member(pi) && !is_member(sub)) return fmt("query %g: Pi^eps not inside the eps-subdifferential", q);
    if (is_member(n) && !is_member(m)) return fmt("query %g: N^eps not inside M^eps", q);
  }
  return "";
}

std::string ac8() {
  const DualityProblem p(shared(affine_family({{0, 0}, {2, 0}})));
  const EpiUnionSet A(p);
  const Lemma7Report r = lemma7_check(A, line(-1, 3, 101), line(-2, 2, 21), 1e-6);
  if (r.dual_samples != 101) return "wrong number of dual samples";
  if (r.sandwich_violations != 0) return fmt("%g sandwich violations", static_cast<double>(r.sandwich_violations));
  if (!r.passed) return fmt("conjugate gap %.3g, primal gap %.3g", r.max_conjugate_gap, r.max_primal_gap);
  return "";
}

std::string ac9() {
  const SolveResult r = robust_regression(named_family("geometric_cloud", {{"p", 2}}), 2);
  if (std::fabs(r.x_opt[0]) > 1e-6 || std::fabs(r.x_opt[1] - 1) > 1e-6) return fmt("x_opt = (%.9g, %.9g)", r.x_opt[0], r.x_opt[1]);
  if (r.objective.hi > 1e-10) return fmt("objective %.3g", r.objective.hi);
  bool pinned = false;
  for (const auto& note : r.domain_notes) pinned = pinned || note.find("x1") != std::string::npos;
  if (!pinned) return "domain notes do not pin x1";
  const SolveResult f = robust_regression(cloud_family({{0, 0}, {1, 1}}, 2), 2);
  if (std::fabs(f.x_opt[0]) > 1e-9 || std::fabs(f.x_opt[1] - 1) > 1e-9) return fmt("finite cloud x_opt = (%.12g, %.12g)", f.x_opt[0], f.x_opt[1]);
  return "";
}

std::string ac10() {
  const SolveResult r = best_approx_solution(hinge_family({{1, 0}, {-1, -1}}, 2), 2);
  double arg = 0;
  const double best = oracle::grid_min(
      [](double x) { return std::pow(std::max(x, 0.0), 2) + std::pow(std::max(1 - x, 0.0), 2); }, -3, 3, &arg);
  if (std::fabs(r.x_opt[0] - 0.5) > 1e-6) return fmt("x_opt = %.9g", r.x_opt[0]);
  if (std::fabs(r.x_opt[0] - arg) > 1e-6) return fmt("grid oracle argmin %.9g", arg);
  if (std::fabs(r.norm.mid() - std::sqrt(0.5)) > 1e-6) return fmt("robust L2 value %.9g", r.norm.mid());
  if (std::fabs(std::sqrt(best) - r.norm.mid()) > 1e-6) return "grid oracle value differs";
  return "";
}

std::string ac11() {
  const DualityProblem p(shared(hinge_family({{1, 1}, {-1, 0}}, 1)));
  const EpiUnionSet A(p);
  const ConvexityReport c = convexity_witness_nonneg(A, 100, 11);
  if (!c.convex) return "midpoint membership fails";
  const Lemma10Report r = lemma10_theorem6_check(p, 0.5, 0.25, -2, 2, 81, 1e-6);
  if (r.status != CheckStatus::Consistent) return "subdifferential and stable closure disagree: " + r.detail;
  if (r.hausdorff_subdiff > 1e-6 || r.hausdorff_pi > 1e-6) return fmt("hausdorff %.3g / %.3g", r.hausdorff_subdiff, r.hausdorff_pi);
  return "";
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string ac12() {
  const std::filesystem::path fixtures(ROBUSTSUM_FIXTURES);
  const auto work = std::filesystem::temp_directory_path() / "robustsum_acceptance";
  std::filesystem::create_directories(work);
  std::size_t compared = 0;
  for (const auto& entry : std::filesystem::directory_iterator(fixtures)) {
    if (entry.path().extension() != ".json") continue;
    std::string outputs[2];
    for (int k = 0; k < 2; ++k) {
      const auto out = work / (entry.path().stem().string() + "_" + std::to_string(k) + ".json");
      const std::string cmd = std::string("\"") + ROBUSTSUM_CLI + "\" run --instance \"" + entry.path().string() +
                              "\" --out \"" + out.string() + "\"";
      if (std::system(cmd.c_str()) != 0) return "CLI failed on " + entry.path().filename().string();
      outputs[k] = read_file(out);
    }
    if (outputs[0].empty() || outputs[0] != outputs[1]) return "reports differ for " + entry.path().filename().string();
    ++compared;
  }
  return compared == 6 ? "" : "expected 6 fixtures";
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"AC1", "example family robust sum and classification", 1, ac1},
      {"AC2", "alternating families diverge without a sum", 1, ac2},
      {"AC3", "scalar identities on 1000 random finite families", 10, ac3},
      {"AC4", "weak duality on 500 random affine families", 30, ac4},
      {"AC5", "gap dichotomy on the affine pair", 5, ac5},
      {"AC6", "zero gap without strong duality on geometric constants", 5, ac6},
      {"AC7", "containment chains on 1000 random queries", 60, ac7},
      {"AC8", "closed convex hull of the epigraph union", 5, ac8},
      {"AC9", "robust regression on the geometric cloud", 10, ac9},
      {"AC10", "best approximation of an inconsistent system", 5, ac10},
      {"AC11", "nonnegative convexity and subdifferential closure", 10, ac11},
      {"AC12", "byte-identical CLI reports", 120, ac12},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string why;
    try {
      why = c.body();
    } catch (const std::exception& e) {
      why = std::string("exception: ") + e.what();
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (why.empty() && s > c.limit_s) why = fmt("took %.2f s, limit %.0f s", s, c.limit_s);
    std::printf("%-4s %s  %s (%.2f s)%s%s\n", c.id, why.empty() ? "PASS" : "FAIL", c.title, s,
                why.empty() ? "" : ": ", why.c_str());
    std::fflush(stdout);
    if (!why.empty()) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
