#include "robustsum/instance.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "robustsum/errors.hpp"

namespace robustsum {

const std::vector<std::string> kQueryOps = {"eval-scalar", "eval",    "norm",   "conjugate", "phi", "gap",
                                            "certify",     "regress", "approx", "sweep"};

DualityOptions RunOptions::duality() const {
  DualityOptions d;
  d.tol = tol;
  d.tol_eq = tol_eq;
  d.attain_tol = attain_tol;
  d.max_card = max_card;
  d.eta_steps = eta_steps;
  d.scan_limit = scan_limit;
  d.budget = budget;
  d.infconv.tol_eq = tol_eq;
  return d;
}

ScalarOptions RunOptions::scalar() const {
  ScalarOptions s;
  s.tol = tol;
  s.budget = budget;
  return s;
}

Json RunOptions::to_json() const {
  Json j;
  j["tol"] = tol;
  j["tol_eq"] = tol_eq;
  j["attain_tol"] = attain_tol;
  j["max_card"] = max_card;
  j["eta_steps"] = eta_steps;
  j["scan_limit"] = scan_limit;
  j["budget"] = budget;
  j["seed"] = seed;
  return j;
}

namespace {

[[noreturn]] void schema(const std::string& ptr, const std::string& msg) {
  fail(ErrorCode::Schema, (ptr.empty() ? "/" : ptr) + ": " + msg);
}

std::string child(const std::string& ptr, const std::string& key) {
  std::string k;
  for (char c : key) {
    if (c == '~') k += "~0";
    else if (c == '/') k += "~1";
    else k += c;
  }
  return ptr + "/" + k;
}

std::string child(const std::string& ptr, std::size_t i) { return ptr + "/" + std::to_string(i); }

void require_object(const Json& j, const std::string& ptr) {
  if (!j.is_object()) schema(ptr, "expected an object");
}

const Json& member(const Json& obj, const std::string& key, const std::string& ptr) {
  require_object(obj, ptr);
  auto it = obj.find(key);
  if (it == obj.end()) schema(child(ptr, key), "missing required field");
  return *it;
}

double as_number(const Json& j, const std::string& ptr) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  schema(ptr, "expected a number");
}

double finite_number(const Json& j, const std::string& ptr) {
  const double v = as_number(j, ptr);
  if (!std::isfinite(v)) schema(ptr, "expected a finite number");
  return v;
}

Vector as_vector(const Json& j, const std::string& ptr) {
  if (j.is_number()) return {j.get<double>()};
  if (!j.is_array()) schema(ptr, "expected an array of numbers");
  Vector v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(finite_number(j[i], child(ptr, i)));
  return v;
}

std::vector<Vector> as_rows(const Json& j, const std::string& ptr, std::size_t min_len) {
  if (!j.is_array() || j.empty()) schema(ptr, "expected a nonempty array of rows");
  std::vector<Vector> rows;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array()) schema(child(ptr, i), "expected an array of numbers");
    rows.push_back(as_vector(j[i], child(ptr, i)));
    if (rows.back().size() < min_len) schema(child(ptr, i), "row is too short");
    if (rows.back().size() != rows.front().size()) schema(child(ptr, i), "rows have different lengths");
  }
  return rows;
}

double exponent(const Json& desc, const std::string& ptr) {
  const double p = finite_number(member(desc, "p", ptr), child(ptr, "p"));
  if (p < 1.0) schema(child(ptr, "p"), "p must be at least 1");
  return p;
}

FunctionAtom parse_atom(const Json& a, const std::string& ptr) {
  require_object(a, ptr);
  const std::string type = params::string(a, "type", ptr);
  if (type == "affine") {
    params::allow(a, {"type", "a", "t"}, ptr);
    return FunctionAtom::affine(params::vector(a, "a", ptr), params::number(a, "t", ptr));
  }
  if (type == "constant") {
    params::allow(a, {"type", "c", "dim"}, ptr);
    return FunctionAtom::constant(params::number(a, "c", ptr),
                                  static_cast<std::size_t>(params::number_or(a, "dim", 1, ptr)));
  }
  if (type == "quadratic") {
    params::allow(a, {"type", "q", "a", "t"}, ptr);
    return FunctionAtom::diagonal_quadratic(params::vector(a, "q", ptr), params::vector(a, "a", ptr),
                                            params::number_or(a, "t", 0.0, ptr));
  }
  if (type == "power" || type == "hinge") {
    params::allow(a, {"type", "a", "b", "p"}, ptr);
    const double p = exponent(a, ptr);
    auto av = params::vector(a, "a", ptr);
    const double b = params::number(a, "b", ptr);
    return type == "power" ? FunctionAtom::power_residual(std::move(av), b, p)
                           : FunctionAtom::hinge_residual(std::move(av), b, p);
  }
  schema(child(ptr, "type"), "unknown atom type '" + type + "'");
}

}  // namespace

namespace params {

double number(const Json& obj, const std::string& key, const std::string& ptr) {
  return as_number(member(obj, key, ptr), child(ptr, key));
}

double number_or(const Json& obj, const std::string& key, double fallback, const std::string& ptr) {
  require_object(obj, ptr);
  auto it = obj.find(key);
  return it == obj.end() ? fallback : as_number(*it, child(ptr, key));
}

Vector vector(const Json& obj, const std::string& key, const std::string& ptr) {
  return as_vector(member(obj, key, ptr), child(ptr, key));
}

std::vector<Vector> points(const Json& obj, const std::string& key, const std::string& ptr) {
  const Json& j = member(obj, key, ptr);
  const std::string p = child(ptr, key);
  if (j.is_object()) {
    allow(j, {"lo", "hi", "n"}, p);
    const double lo = finite_number(member(j, "lo", p), child(p, "lo"));
    const double hi = finite_number(member(j, "hi", p), child(p, "hi"));
    const double n = finite_number(member(j, "n", p), child(p, "n"));
    if (n < 1 || n != std::floor(n) || n > 1e6) schema(child(p, "n"), "expected a positive integer");
    if (n > 1 && !(lo <= hi)) schema(p, "lo must not exceed hi");
    std::vector<Vector> out;
    const auto m = static_cast<std::size_t>(n);
    for (std::size_t k = 0; k < m; ++k) {
      out.push_back({m == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(m - 1)});
    }
    return out;
  }
  if (!j.is_array()) schema(p, "expected an array of points or {lo, hi, n}");
  std::vector<Vector> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_vector(j[i], child(p, i)));
  return out;
}

std::vector<double> numbers(const Json& obj, const std::string& key, const std::string& ptr) {
  const Json& j = member(obj, key, ptr);
  if (j.is_number()) return {j.get<double>()};
  return as_vector(j, child(ptr, key));
}

std::vector<std::size_t> indices(const Json& obj, const std::string& key, const std::string& ptr) {
  const Json& j = member(obj, key, ptr);
  const std::string p = child(ptr, key);
  if (!j.is_array() || j.empty()) schema(p, "expected a nonempty array of indices");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number_unsigned() || j[i].get<std::uint64_t>() == 0) {
      schema(child(p, i), "expected a positive integer");
    }
    out.push_back(j[i].get<std::size_t>());
    if (i > 0 && out[i] <= out[i - 1]) schema(child(p, i), "indices must be strictly increasing");
  }
  return out;
}

std::string string(const Json& obj, const std::string& key, const std::string& ptr) {
  const Json& j = member(obj, key, ptr);
  if (!j.is_string()) schema(child(ptr, key), "expected a string");
  return j.get<std::string>();
}

void allow(const Json& obj, std::initializer_list<const char*> keys, const std::string& ptr) {
  require_object(obj, ptr);
  for (const auto& [k, v] : obj.items()) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; })) {
      schema(child(ptr, k), "unknown field");
    }
  }
}

}  // namespace params

FamilyHandle build_family(const Json& desc, const std::string& ptr) {
  require_object(desc, ptr);
  FamilyHandle h;
  h.kind = params::string(desc, "kind", ptr);
  try {
    if (h.kind == "scalar") {
      params::allow(desc, {"kind", "terms"}, ptr);
      const Json& terms = member(desc, "terms", ptr);
      if (!terms.is_array() || terms.empty()) schema(child(ptr, "terms"), "expected a nonempty array");
      std::vector<ExtendedReal> v;
      for (std::size_t i = 0; i < terms.size(); ++i) {
        const double x = as_number(terms[i], child(child(ptr, "terms"), i));
        if (x == -kInf) schema(child(child(ptr, "terms"), i), "terms must not be -inf");
        v.emplace_back(x);
      }
      h.scalar = ScalarFamily::finite(std::move(v));
    } else if (h.kind == "scalar_gen") {
      params::allow(desc, {"kind", "formula", "tail"}, ptr);
      const std::string formula = params::string(desc, "formula", ptr);
      if (!is_builtin_scalar(formula)) schema(child(ptr, "formula"), "unknown builtin '" + formula + "'");
      ScalarFamily base = builtin_scalar_family(formula, false);
      std::optional<TailCertificate> tail;
      if (desc.contains("tail")) {
        const std::string t = params::string(desc, "tail", ptr);
        tail = builtin_tail(t);
        if (!tail) schema(child(ptr, "tail"), "no builtin tail certificate '" + t + "'");
      }
      auto gen = [base](std::uint64_t i) { return base.term(i); };
      h.scalar = ScalarFamily::countable(gen, tail, formula);
    } else if (h.kind == "affine") {
      params::allow(desc, {"kind", "rows"}, ptr);
      h.functions = std::make_shared<const FunctionFamily>(affine_family(as_rows(member(desc, "rows", ptr),
                                                                                 child(ptr, "rows"), 2)));
    } else if (h.kind == "hinge" || h.kind == "power") {
      params::allow(desc, {"kind", "rows", "p"}, ptr);
      h.p = exponent(desc, ptr);
      const auto rows = as_rows(member(desc, "rows", ptr), child(ptr, "rows"), 2);
      h.functions = std::make_shared<const FunctionFamily>(h.kind == "hinge" ? hinge_family(rows, h.p)
                                                                             : power_family(rows, h.p));
    } else if (h.kind == "cloud") {
      params::allow(desc, {"kind", "points", "p"}, ptr);
      h.p = exponent(desc, ptr);
      const auto pts = as_rows(member(desc, "points", ptr), child(ptr, "points"), 2);
      for (std::size_t i = 0; i < pts.size(); ++i) {
        if (pts[i].size() != 2) schema(child(child(ptr, "points"), i), "points are (t, s) pairs");
      }
      h.functions = std::make_shared<const FunctionFamily>(cloud_family(pts, h.p));
    } else if (h.kind == "atoms") {
      params::allow(desc, {"kind", "atoms"}, ptr);
      const Json& atoms = member(desc, "atoms", ptr);
      if (!atoms.is_array() || atoms.empty()) schema(child(ptr, "atoms"), "expected a nonempty array");
      std::vector<FunctionAtom> v;
      for (std::size_t i = 0; i < atoms.size(); ++i) v.push_back(parse_atom(atoms[i], child(child(ptr, "atoms"), i)));
      h.functions = std::make_shared<const FunctionFamily>(FunctionFamily::finite(std::move(v)));
    } else if (h.kind == "named") {
      params::allow(desc, {"kind", "name", "params"}, ptr);
      const std::string name = params::string(desc, "name", ptr);
      const auto names = named_family_names();
      if (std::find(names.begin(), names.end(), name) == names.end()) {
        schema(child(ptr, "name"), "unknown named family '" + name + "'");
      }
      std::map<std::string, double> ps;
      if (desc.contains("params")) {
        const Json& pj = desc["params"];
        const std::string pp = child(ptr, "params");
        require_object(pj, pp);
        for (const auto& [k, v] : pj.items()) {
          if (k != "p" && k != "dim") schema(child(pp, k), "unknown field");
          ps[k] = finite_number(v, child(pp, k));
        }
      }
      h.functions = std::make_shared<const FunctionFamily>(named_family(name, ps));
      if (name != "geometric_constants") h.p = ps.count("p") ? ps["p"] : 2.0;
    } else {
      schema(child(ptr, "kind"), "unknown family kind '" + h.kind + "'");
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Schema) throw;
    schema(ptr, e.what());
  }
  return h;
}

RunOptions merge_options(RunOptions o, const Json& j, const std::string& ptr) {
  params::allow(j, {"tol", "tol_eq", "attain_tol", "max_card", "eta_steps", "scan_limit", "budget", "seed"}, ptr);
  auto positive = [&](const char* key, double& out) {
    if (!j.contains(key)) return;
    const double v = finite_number(j[key], child(ptr, key));
    if (!(v > 0)) schema(child(ptr, key), "must be positive");
    out = v;
  };
  auto integer = [&](const char* key, auto& out, double lo, double hi) {
    if (!j.contains(key)) return;
    const double v = finite_number(j[key], child(ptr, key));
    if (v != std::floor(v) || v < lo || v > hi) schema(child(ptr, key), "integer out of range");
    out = static_cast<std::remove_reference_t<decltype(out)>>(v);
  };
  positive("tol", o.tol);
  positive("tol_eq", o.tol_eq);
  positive("attain_tol", o.attain_tol);
  integer("max_card", o.max_card, 1, 64);
  integer("eta_steps", o.eta_steps, 1, 60);
  integer("scan_limit", o.scan_limit, 1, 60);
  integer("budget", o.budget, 1, 1e12);
  integer("seed", o.seed, 0, 9.007199254740992e15);
  return o;
}

Instance parse_instance(const Json& j) {
  params::allow(j, {"version", "name", "description", "family", "options", "queries"}, "");
  Instance inst;
  const Json& v = member(j, "version", "");
  if (!v.is_number_integer() || v.get<int>() != 1) schema("/version", "only version 1 is supported");
  if (j.contains("name")) inst.name = params::string(j, "name", "");
  if (j.contains("description")) inst.description = params::string(j, "description", "");
  inst.family = member(j, "family", "");
  build_family(inst.family, "/family");
  if (j.contains("options")) {
    inst.options = j["options"];
    merge_options(RunOptions{}, inst.options, "/options");
  }
  const Json& qs = member(j, "queries", "");
  if (!qs.is_array()) schema("/queries", "expected an array");
  for (std::size_t i = 0; i < qs.size(); ++i) {
    const std::string p = child("/queries", i);
    params::allow(qs[i], {"op", "params"}, p);
    Query q;
    q.op = params::string(qs[i], "op", p);
    if (std::find(kQueryOps.begin(), kQueryOps.end(), q.op) == kQueryOps.end()) {
      schema(child(p, "op"), "unknown op '" + q.op + "'");
    }
    if (qs[i].contains("params")) {
      q.params = qs[i]["params"];
      require_object(q.params, child(p, "params"));
    }
    inst.queries.push_back(std::move(q));
  }
  return inst;
}

Instance load_instance(const std::string& path, std::string* raw) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Schema, "cannot open instance file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  if (raw) *raw = text;
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::Schema, "/: invalid JSON: " + std::string(e.what()));
  }
  return parse_instance(j);
}

}  // namespace robustsum
