#include "robustsum/report.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>

#include "robustsum/epi_union.hpp"
#include "robustsum/errors.hpp"
#include "robustsum/multifunctions.hpp"
#include "robustsum/scalar_calculus.hpp"
#include "robustsum/solvers.hpp"
#include "robustsum/theorems.hpp"

namespace robustsum {

int exit_code(const Outcome& o) {
  if (o.error) return 1;
  if (o.counterexample) return 2;
  if (o.unknown) return 3;
  return 0;
}

Json num(double v) {
  if (std::isnan(v)) return "nan";
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  return v == 0 ? 0.0 : v;
}

Json bracket_json(const Bracket& b) {
  Json j;
  j["lo"] = num(b.lo);
  j["hi"] = num(b.hi);
  j["width"] = num(b.lo == b.hi ? 0.0 : b.hi - b.lo);
  return j;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), md, &len) != 1) {
    fail(ErrorCode::Unsupported, "sha256 unavailable");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  if (v == 0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void dump_to(const Json& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += inner + Json(k).dump() + ": ";
        dump_to(v, out, indent + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
      if (flat) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          dump_to(j[i], out, indent + 1);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += inner;
        dump_to(j[i], out, indent + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case Json::value_t::number_float:
      out += csv_number(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

Json vec(std::span<const double> v) {
  Json j = Json::array();
  for (double x : v) j.push_back(num(x));
  return j;
}

Json vecs(const std::vector<Vector>& vs) {
  Json j = Json::array();
  for (const auto& v : vs) j.push_back(vec(v));
  return j;
}

Json decomposition_json(const Decomposition& d) {
  Json j;
  j["J"] = d.J;
  j["parts"] = vecs(d.parts);
  j["value"] = num(d.value);
  return j;
}

Json witness_json(const Witness& w) {
  Json j;
  j["J"] = w.J;
  j["parts"] = vecs(w.parts);
  if (w.split) {
    Json s;
    s["alpha"] = num(w.split->alpha);
    s["eps_i"] = vec(w.split->eps_i);
    s["eta"] = num(w.split->eta);
    j["split"] = s;
  }
  if (!w.r_parts.empty()) j["r_parts"] = vec(w.r_parts);
  return j;
}

Json tri(Tri t) { return std::string(to_string(t)); }

struct Context {
  const FamilyHandle& family;
  const RunOptions& options;
  std::unique_ptr<DualityProblem> problem;
  std::unique_ptr<EpiUnionSet> epi;

  const FunctionFamily& functions(const std::string& ptr) const {
    if (!family.functions) fail(ErrorCode::Schema, ptr + ": this op needs a function family");
    return *family.functions;
  }
  const DualityProblem& dual(const std::string& ptr) {
    functions(ptr);
    if (!problem) problem = std::make_unique<DualityProblem>(family.functions, options.duality());
    return *problem;
  }
  const EpiUnionSet& epi_set(const std::string& ptr) {
    if (!epi) epi = std::make_unique<EpiUnionSet>(dual(ptr));
    return *epi;
  }
};

Vector point(const Json& params, const char* key, const std::string& ptr, std::size_t dim) {
  Vector v = params::vector(params, key, ptr);
  if (v.size() != dim) fail(ErrorCode::Schema, ptr + "/" + key + ": expected " + std::to_string(dim) + " coordinates");
  return v;
}

Json eval_scalar(Context& c, const Json& p, const std::string& ptr, Outcome& o) {
  params::allow(p, {}, ptr);
  if (!c.family.scalar) fail(ErrorCode::Schema, ptr + ": eval-scalar needs a scalar family");
  const ScalarFamily& fam = *c.family.scalar;
  const ScalarOptions so = c.options.scalar();
  Json j;
  auto guarded = [&](const char* key, auto fn) {
    try {
      j[key] = fn();
    } catch (const Error& e) {
      if (e.code() != ErrorCode::UnknownBudgetExceeded) throw;
      j[key] = "unknown";
      o.unknown = true;
    }
  };
  guarded("robust_sum", [&] { return bracket_json(robust_sum_scalar(fam, so)); });
  guarded("positive_part", [&] { return bracket_json(positive_part_sum(fam, so)); });
  guarded("negative_part", [&] { return bracket_json(negative_part_sum(fam, so)); });
  guarded("sup", [&] {
    const SupResult s = sup_scalar(fam, so);
    Json r = bracket_json(s.value);
    r["sign"] = std::string(to_string(s.sign));
    return r;
  });
  guarded("finiteness", [&] {
    const Finiteness f = is_finite_robust_sum(fam, so);
    if (f == Finiteness::Unknown) o.unknown = true;
    return Json(std::string(to_string(f)));
  });
  guarded("classification", [&] {
    const SumClassification s = infinite_sum_classify(fam, so);
    if (s.kind == SumKind::Unknown) o.unknown = true;
    Json r;
    r["kind"] = std::string(to_string(s.kind));
    if (s.kind == SumKind::ExistsFinite) r["value"] = bracket_json(s.value);
    return r;
  });
  if (fam.is_finite() && fam.size() <= 20) j["brute_force"] = num(brute_force_robust_sum(fam).value());
  return j;
}

Json certificate_json(const char* kind, std::span<const double> x, std::span<const double> xstar, double eps,
                      const Certificate& cert, Outcome& o) {
  Json j;
  j["query_kind"] = kind;
  j["x"] = vec(x);
  j["xstar"] = vec(xstar);
  j["eps"] = num(eps);
  j["verdict"] = std::string(to_string(cert.verdict));
  j["witness"] = cert.witness ? witness_json(*cert.witness) : Json(nullptr);
  j["eta_floor"] = num(cert.eta_floor);
  j["reason"] = cert.reason;
  if (cert.verdict == Verdict::Unknown) o.unknown = true;
  return j;
}

Json separation_json(const std::optional<Separation>& s) {
  if (!s) return nullptr;
  Json j;
  j["x"] = vec(s->x);
  j["xstar"] = vec(s->xstar);
  j["eps"] = num(s->eps);
  j["lhs"] = std::string(to_string(s->lhs));
  j["rhs"] = std::string(to_string(s->rhs));
  return j;
}

Json theorem_json(const char* kind, const TheoremCheck& t, Outcome& o) {
  Json j;
  j["query_kind"] = kind;
  j["status"] = std::string(to_string(t.status));
  j["premise"] = tri(t.premise);
  j["queries"] = t.queries;
  j["unknown_queries"] = t.unknown_queries;
  j["separation"] = separation_json(t.separation);
  if (t.decomposition) j["decomposition"] = decomposition_json(*t.decomposition);
  j["detail"] = t.detail;
  if (t.status == CheckStatus::CounterexampleFound) o.counterexample = true;
  if (t.status == CheckStatus::Unknown) o.unknown = true;
  return j;
}

Json interval_json(const IntervalEstimate& iv) {
  Json j;
  j["empty"] = iv.empty;
  if (!iv.empty) {
    j["lo"] = num(iv.lo);
    j["hi"] = num(iv.hi);
    j["clipped"] = iv.clipped_lo || iv.clipped_hi;
  }
  j["inconclusive"] = iv.inconclusive;
  return j;
}

Json certify(Context& c, const Json& p, const std::string& ptr, Outcome& o) {
  const std::string kind = params::string(p, "kind", ptr);
  const DualityProblem& dp = c.dual(ptr);
  const std::size_t n = dp.dimension();
  auto x = [&] { return point(p, "x", ptr, n); };
  auto xs = [&] { return point(p, "xstar", ptr, n); };
  auto eps = [&] {
    const double e = params::number(p, "eps", ptr);
    if (!(e >= 0) || !std::isfinite(e)) fail(ErrorCode::Schema, ptr + "/eps: expected a finite number >= 0");
    return e;
  };
  auto pts = [&](const char* key) {
    auto v = params::points(p, key, ptr);
    for (const auto& q : v) {
      if (q.size() != n) fail(ErrorCode::Schema, ptr + "/" + key + ": points must have " + std::to_string(n) + " coordinates");
    }
    return v;
  };
  if (kind == "subdiff" || kind == "M" || kind == "N" || kind == "Pi" || kind == "Ns" || kind == "Pis") {
    params::allow(p, {"kind", "x", "xstar", "eps"}, ptr);
    const Vector xv = x();
    const Vector yv = xs();
    const double e = eps();
    Certificate cert;
    if (kind == "subdiff") cert = eps_subdiff_membership(dp, xv, yv, e);
    else if (kind == "M") cert = M_eps_membership(dp, yv, xv, e);
    else if (kind == "N") cert = N_eps_membership(dp, yv, xv, e);
    else if (kind == "Pi") cert = Pi_eps_membership(dp, xv, yv, e);
    else cert = Ns_Pis_membership(dp, xv, yv, e);
    if (cert.witness && !verify_witness(dp, xv, yv, e, *cert.witness)) o.counterexample = true;
    return certificate_json(kind.c_str(), xv, yv, e, cert, o);
  }
  if (kind == "B") {
    params::allow(p, {"kind", "x", "xstar", "eps", "J", "parts"}, ptr);
    Decomposition d;
    d.J = params::indices(p, "J", ptr);
    d.parts = pts("parts");
    if (d.parts.size() != d.J.size()) fail(ErrorCode::Schema, ptr + "/parts: one part per index of J");
    const Vector xv = x();
    const Vector yv = xs();
    const double e = eps();
    return certificate_json("B", xv, yv, e, B_eps_membership(dp, yv, d, xv, e), o);
  }
  if (kind == "S_alpha") {
    params::allow(p, {"kind", "x", "alpha"}, ptr);
    const Vector xv = x();
    const double a = params::number(p, "alpha", ptr);
    Json j;
    j["query_kind"] = kind;
    j["x"] = vec(xv);
    j["alpha"] = num(a);
    j["subsets"] = S_alpha(dp, xv, a);
    j["exhaustive"] = dp.enumeration_exhaustive();
    return j;
  }
  if (kind == "T_alpha") {
    params::allow(p, {"kind", "x", "alpha", "J"}, ptr);
    const Vector xv = x();
    const auto J = params::indices(p, "J", ptr);
    const double a = params::number(p, "alpha", ptr);
    Json j;
    j["query_kind"] = kind;
    j["x"] = vec(xv);
    j["J"] = J;
    j["alpha"] = num(a);
    j["member"] = T_alpha_membership(dp, J, xv, a);
    return j;
  }
  if (kind == "epi") {
    params::allow(p, {"kind", "xstar", "r"}, ptr);
    const Vector yv = xs();
    const double r = params::number(p, "r", ptr);
    const Certificate cert = epi_union_membership(c.epi_set(ptr), yv, r);
    Json j = certificate_json("epi", {}, yv, 0.0, cert, o);
    j.erase("x");
    j.erase("eps");
    j["r"] = num(r);
    return j;
  }
  if (kind == "closed") {
    params::allow(p, {"kind", "xstar"}, ptr);
    const Vector yv = xs();
    const auto r = closed_convex_regarding(c.epi_set(ptr), yv, c.options.tol);
    if (r.verdict == Closedness::Unknown) o.unknown = true;
    Json j;
    j["query_kind"] = kind;
    j["xstar"] = vec(yv);
    j["verdict"] = std::string(to_string(r.verdict));
    j["hull_min"] = num(r.hull_min);
    j["phi"] = bracket_json(r.phi);
    j["mode"] = std::string(to_string(c.epi_set(ptr).mode()));
    j["note"] = r.note;
    return j;
  }
  if (kind == "lemma7") {
    params::allow(p, {"kind", "dual", "primal", "tol"}, ptr);
    const auto r = lemma7_check(c.epi_set(ptr), pts("dual"), pts("primal"), params::number_or(p, "tol", 1e-6, ptr));
    if (!r.passed) o.counterexample = true;
    Json j;
    j["query_kind"] = kind;
    j["passed"] = r.passed;
    j["dual_samples"] = r.dual_samples;
    j["primal_samples"] = r.primal_samples;
    j["max_conjugate_gap"] = num(r.max_conjugate_gap);
    j["max_primal_gap"] = num(r.max_primal_gap);
    j["sandwich_violations"] = r.sandwich_violations;
    j["membership_mismatches"] = r.membership_mismatches;
    return j;
  }
  if (kind == "convexity") {
    params::allow(p, {"kind", "samples", "seed"}, ptr);
    const auto samples = static_cast<std::size_t>(params::number_or(p, "samples", 100, ptr));
    const auto seed = static_cast<std::uint64_t>(params::number_or(p, "seed", static_cast<double>(c.options.seed), ptr));
    const auto r = convexity_witness_nonneg(c.epi_set(ptr), samples, seed, c.options.tol);
    if (!r.convex) (r.pairs == 0 ? o.unknown : o.counterexample) = true;
    Json j;
    j["query_kind"] = kind;
    j["convex"] = r.convex;
    j["pairs"] = r.pairs;
    j["witness_failures"] = r.witness_failures;
    j["search_failures"] = r.search_failures;
    j["search_unknown"] = r.search_unknown;
    j["phi_violations"] = r.phi_violations;
    j["note"] = r.note;
    return j;
  }
  if (kind == "theorem1" || kind == "theorem3") {
    params::allow(p, {"kind", "xstar", "eps", "x"}, ptr);
    const Vector yv = xs();
    const auto eg = params::numbers(p, "eps", ptr);
    const auto xg = pts("x");
    const auto t = kind == "theorem1" ? theorem1_verify(dp, yv, eg, xg) : theorem3_verify(dp, yv, eg, xg);
    Json j = theorem_json(kind.c_str(), t, o);
    j["xstar"] = vec(yv);
    return j;
  }
  if (kind == "theorem2" || kind == "theorem4") {
    params::allow(p, {"kind", "xstar", "eps", "x"}, ptr);
    const auto eg = params::numbers(p, "eps", ptr);
    const auto xg = pts("x");
    const auto yg = pts("xstar");
    const auto t = kind == "theorem2" ? theorem2_verify(dp, xg, yg, eg) : theorem4_verify(dp, xg, yg, eg);
    return theorem_json(kind.c_str(), t, o);
  }
  if (kind == "lemma10") {
    params::allow(p, {"kind", "x", "eps", "window", "grid", "tol"}, ptr);
    const double xv = params::number(p, "x", ptr);
    const auto w = params::numbers(p, "window", ptr);
    if (w.size() != 2) fail(ErrorCode::Schema, ptr + "/window: expected [lo, hi]");
    const auto r = lemma10_theorem6_check(dp, xv, eps(), w[0], w[1],
                                          static_cast<std::size_t>(params::number_or(p, "grid", 81, ptr)),
                                          params::number_or(p, "tol", 1e-6, ptr));
    if (r.status == CheckStatus::CounterexampleFound) o.counterexample = true;
    if (r.status == CheckStatus::Unknown) o.unknown = true;
    Json j;
    j["query_kind"] = kind;
    j["status"] = std::string(to_string(r.status));
    j["subdiff"] = interval_json(r.subdiff);
    j["pi"] = interval_json(r.pi);
    j["pi_s_closure"] = interval_json(r.pi_s);
    j["hausdorff_subdiff"] = num(r.hausdorff_subdiff);
    j["hausdorff_pi"] = num(r.hausdorff_pi);
    j["detail"] = r.detail;
    return j;
  }
  fail(ErrorCode::Schema, ptr + "/kind: unknown certify kind '" + kind + "'");
}

Json gap_json(const GapReport& g, bool weak) {
  Json j;
  j["xstar"] = vec(g.xstar);
  j["primal"] = num(g.primal.is_exact() ? g.primal.lo : g.primal.mid());
  j["dual"] = num(g.dual.is_exact() ? g.dual.lo : g.dual.mid());
  j["primal_lo"] = num(g.primal.lo);
  j["primal_hi"] = num(g.primal.hi);
  j["dual_lo"] = num(g.dual.lo);
  j["dual_hi"] = num(g.dual.hi);
  j["conjugate"] = bracket_json(g.conjugate);
  j["conjugate_status"] = g.conjugate_status;
  j["phi"] = bracket_json(g.phi);
  j["phi_mode"] = g.phi_mode;
  j["zero_gap"] = tri(g.zero_gap);
  j["strong_gap"] = tri(g.strong_gap);
  j["witness"] = g.witness ? decomposition_json(*g.witness) : Json(nullptr);
  j["certificates"] = g.certificates;
  j["weak_duality"] = weak;
  return j;
}

Json solve(Context& c, const Json& p, const std::string& ptr, bool regression, Outcome& o) {
  params::allow(p, {"p", "init", "rule", "max_iter", "step", "optimal_value", "trace"}, ptr);
  const FunctionFamily& fam = c.functions(ptr);
  const double pe = params::number_or(p, "p", c.family.p > 0 ? c.family.p : 2.0, ptr);
  SolveOptions so;
  so.scalar = c.options.scalar();
  if (p.contains("init")) so.init = point(p, "init", ptr, fam.dimension());
  if (p.contains("max_iter")) so.max_iter = static_cast<std::size_t>(params::number(p, "max_iter", ptr));
  if (p.contains("step")) so.step = params::number(p, "step", ptr);
  if (p.contains("optimal_value")) so.optimal_value = params::number(p, "optimal_value", ptr);
  if (p.contains("rule")) {
    const std::string r = params::string(p, "rule", ptr);
    if (r == "armijo") so.rule = StepRule::Armijo;
    else if (r == "diminishing") so.rule = StepRule::Diminishing;
    else if (r == "polyak") so.rule = StepRule::Polyak;
    else if (r != "auto") fail(ErrorCode::Schema, ptr + "/rule: unknown step rule '" + r + "'");
  }
  so.trace = p.value("trace", false);
  const SolveResult r = regression ? robust_regression(fam, pe, so) : best_approx_solution(fam, pe, so);
  if (!r.converged) o.unknown = true;
  Json j;
  j["p"] = num(pe);
  j["x_opt"] = vec(r.x_opt);
  j["objective"] = bracket_json(r.objective);
  j["norm"] = bracket_json(r.norm);
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["rule"] = std::string(to_string(r.rule));
  j["domain_notes"] = r.domain_notes;
  if (so.trace) {
    Json rows = Json::array();
    for (const auto& t : r.trace) {
      Json row;
      row["iteration"] = t.iteration;
      row["x"] = vec(t.x);
      row["objective"] = num(t.objective);
      row["step"] = num(t.step);
      rows.push_back(row);
    }
    j["trace"] = rows;
  }
  return j;
}

Json sweep(Context& c, const Json& p, const std::string& ptr) {
  params::allow(p, {"grid"}, ptr);
  const DualityProblem& dp = c.dual(ptr);
  const auto grid = params::points(p, "grid", ptr);
  Json rows = Json::array();
  for (const auto& y : grid) {
    if (y.size() != dp.dimension()) fail(ErrorCode::Schema, ptr + "/grid: point has wrong dimension");
    const GapReport g = gap_report(dp, y);
    double gap = 0;
    if (g.zero_gap == Tri::Yes) gap = 0;
    else if (g.phi.lo == kInf) gap = kInf;
    else gap = g.phi.mid() - g.conjugate.mid();
    Json row;
    row["xstar"] = vec(y);
    row["conjugate"] = bracket_json(g.conjugate);
    row["phi"] = bracket_json(g.phi);
    row["gap"] = num(gap);
    row["zero_gap"] = tri(g.zero_gap);
    row["strong_gap"] = tri(g.strong_gap);
    rows.push_back(row);
  }
  Json j;
  j["rows"] = rows;
  return j;
}

Json run_query(Context& c, const Query& q, const std::string& ptr, Outcome& o) {
  const Json& p = q.params;
  Json j;
  j["op"] = q.op;
  Json body;
  if (q.op == "eval-scalar") {
    body = eval_scalar(c, p, ptr, o);
  } else if (q.op == "eval" || q.op == "norm") {
    params::allow(p, q.op == "eval" ? std::initializer_list<const char*>{"x"}
                                    : std::initializer_list<const char*>{"x", "p"}, ptr);
    const FunctionFamily& fam = c.functions(ptr);
    const Vector x = point(p, "x", ptr, fam.dimension());
    const RobustSumFunction f(c.family.functions, c.options.scalar());
    body["x"] = vec(x);
    if (q.op == "eval") {
      body["value"] = bracket_json(robust_sum_eval(f, x, c.options.tol));
    } else {
      const double pe = params::number_or(p, "p", c.family.p > 0 ? c.family.p : 2.0, ptr);
      body["p"] = num(pe);
      body["norm"] = bracket_json(robust_lp_norm(fam, x, pe, c.options.scalar()));
    }
  } else if (q.op == "conjugate") {
    params::allow(p, {"xstar"}, ptr);
    const DualityProblem& dp = c.dual(ptr);
    const Vector y = point(p, "xstar", ptr, dp.dimension());
    const ConjugateEstimate e = dp.conjugate(y);
    body["xstar"] = vec(y);
    body["value"] = bracket_json(e.value);
    body["status"] = e.mode == "numeric" ? std::string(to_string(e.status)) : e.mode;
    body["argmax"] = vec(e.argmax);
  } else if (q.op == "phi") {
    params::allow(p, {"xstar"}, ptr);
    const DualityProblem& dp = c.dual(ptr);
    const Vector y = point(p, "xstar", ptr, dp.dimension());
    const PhiResult r = phi_eval(dp, y);
    body["xstar"] = vec(y);
    body["value"] = bracket_json(r.value);
    body["attained"] = tri(r.attained);
    body["exhaustive"] = r.exhaustive;
    body["mode"] = r.mode;
    body["resolution"] = num(r.resolution);
    body["best"] = r.best ? decomposition_json(*r.best) : Json(nullptr);
    body["note"] = r.note;
  } else if (q.op == "gap") {
    params::allow(p, {"xstar"}, ptr);
    const DualityProblem& dp = c.dual(ptr);
    const GapReport g = gap_report(dp, point(p, "xstar", ptr, dp.dimension()));
    const bool weak = weak_duality_check(g, c.options.tol);
    if (!weak) o.counterexample = true;
    if (g.zero_gap == Tri::Unknown) o.unknown = true;
    body = gap_json(g, weak);
  } else if (q.op == "certify") {
    body = certify(c, p, ptr, o);
  } else if (q.op == "regress" || q.op == "approx") {
    body = solve(c, p, ptr, q.op == "regress", o);
  } else if (q.op == "sweep") {
    body = sweep(c, p, ptr);
  } else {
    fail(ErrorCode::Schema, ptr + "/op: unknown op '" + q.op + "'");
  }
  for (auto& [k, v] : body.items()) j[k] = v;
  return j;
}

}  // namespace

std::string dump(const Json& j) {
  std::string out;
  dump_to(j, out, 0);
  out += "\n";
  return out;
}

Json run_instance(const Instance& inst, const RunOptions& options, const std::string& digest_source,
                  bool timings, Outcome& outcome) {
  const FamilyHandle family = build_family(inst.family);
  Context ctx{family, options, nullptr, nullptr};
  Json report;
  report["tool"] = "robustsum";
  report["version"] = kToolVersion;
  report["instance"] = inst.name;
  report["input_digest"] = "sha256:" + sha256_hex(digest_source);
  report["options"] = options.to_json();
  report["family"] = family.kind;
  Json results = Json::array();
  Json times = Json::array();
  for (std::size_t i = 0; i < inst.queries.size(); ++i) {
    const std::string ptr = "/queries/" + std::to_string(i) + "/params";
    const auto t0 = std::chrono::steady_clock::now();
    Json r;
    try {
      r = run_query(ctx, inst.queries[i], ptr, outcome);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::Schema) throw;
      r = Json::object();
      r["op"] = inst.queries[i].op;
      r["error"] = {{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
      const ErrorCode code = e.code();
      if (code == ErrorCode::UnknownBudgetExceeded || code == ErrorCode::BudgetExceeded ||
          code == ErrorCode::InconclusiveGrowth || code == ErrorCode::NoConvergence) {
        outcome.unknown = true;
      } else {
        outcome.error = true;
      }
    }
    results.push_back(r);
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    times.push_back(std::round(ms * 1000) / 1000);
  }
  report["results"] = results;
  report["status"] = outcome.error ? "error" : outcome.counterexample ? "counterexample" : outcome.unknown ? "unknown" : "ok";
  if (timings) report["timings_ms"] = times;
  return report;
}

std::string sweep_csv(const Json& sweep_result) {
  std::string out = "xstar,conjugate_lo,conjugate_hi,phi_lo,phi_hi,gap,zero_gap,strong_gap\n";
  auto field = [](const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    return csv_number(v.get<double>());
  };
  for (const auto& row : sweep_result.at("rows")) {
    std::string point;
    for (std::size_t k = 0; k < row["xstar"].size(); ++k) point += (k ? " " : "") + field(row["xstar"][k]);
    out += point + "," + field(row["conjugate"]["lo"]) + "," + field(row["conjugate"]["hi"]) + "," +
           field(row["phi"]["lo"]) + "," + field(row["phi"]["hi"]) + "," + field(row["gap"]) + "," +
           row["zero_gap"].get<std::string>() + "," + row["strong_gap"].get<std::string>() + "\n";
  }
  return out;
}

std::string trace_csv(const Json& solve_result) {
  std::string out = "iteration,x,objective,step\n";
  if (!solve_result.contains("trace")) return out;
  for (const auto& row : solve_result["trace"]) {
    std::string x;
    for (std::size_t k = 0; k < row["x"].size(); ++k) x += (k ? " " : "") + csv_number(row["x"][k].get<double>());
    out += std::to_string(row["iteration"].get<std::size_t>()) + "," + x + "," +
           csv_number(row["objective"].get<double>()) + "," + csv_number(row["step"].get<double>()) + "\n";
  }
  return out;
}

}  // namespace robustsum
