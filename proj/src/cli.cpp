#include "robustsum/cli.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "robustsum/errors.hpp"
#include "robustsum/function_family.hpp"
#include "robustsum/report.hpp"
#include "robustsum/scalar_family.hpp"

namespace robustsum {

namespace {

struct Flags {
  std::string instance;
  std::string family;
  std::vector<std::string> family_params;
  std::vector<std::string> query_params;
  double tol = 0;
  unsigned max_card = 0;
  unsigned eta_steps = 0;
  std::uint64_t budget = 0;
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "json";
  std::string xstar;
  std::string x;
  std::string eps;
  std::string grid;
  std::string kind;
  double p = 0;
  bool timings = false;
  bool trace = false;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

double parse_number(const std::string& s, const std::string& flag) {
  if (s == "inf" || s == "+inf") return kInf;
  if (s == "-inf") return -kInf;
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) fail(ErrorCode::Schema, flag + ": '" + s + "' is not a number");
  return v;
}

Json parse_vector(const std::string& s, const std::string& flag) {
  Json v = Json::array();
  for (const auto& part : split(s, ',')) v.push_back(num(parse_number(part, flag)));
  if (v.empty()) fail(ErrorCode::Schema, flag + ": expected a comma-separated point");
  return v;
}

Json parse_grid(const std::string& s) {
  if (s.empty()) return Json::array();
  const auto colon = split(s, ':');
  if (colon.size() == 3) {
    Json g;
    g["lo"] = num(parse_number(colon[0], "--grid"));
    g["hi"] = num(parse_number(colon[1], "--grid"));
    g["n"] = static_cast<int>(parse_number(colon[2], "--grid"));
    return g;
  }
  Json g = Json::array();
  if (s.find(';') != std::string::npos) {
    for (const auto& pt : split(s, ';')) g.push_back(parse_vector(pt, "--grid"));
  } else {
    for (const auto& part : split(s, ',')) g.push_back(num(parse_number(part, "--grid")));
  }
  return g;
}

std::pair<std::string, std::string> key_value(const std::string& kv, const std::string& flag) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos || eq == 0) fail(ErrorCode::Schema, flag + ": expected key=value, got '" + kv + "'");
  return {kv.substr(0, eq), kv.substr(eq + 1)};
}

Json family_from_name(const Flags& f) {
  Json desc;
  if (is_builtin_scalar(f.family)) {
    if (!f.family_params.empty()) fail(ErrorCode::Schema, "--param: scalar builtins take no parameters");
    desc["kind"] = "scalar_gen";
    desc["formula"] = f.family;
    if (builtin_tail(f.family)) desc["tail"] = f.family;
    return desc;
  }
  desc["kind"] = "named";
  desc["name"] = f.family;
  if (!f.family_params.empty()) {
    Json ps = Json::object();
    for (const auto& kv : f.family_params) {
      const auto [k, v] = key_value(kv, "--param");
      ps[k] = num(parse_number(v, "--param " + k));
    }
    desc["params"] = ps;
  }
  return desc;
}

// Builds the single query described by the flags of a subcommand, or nothing when
// no query flag was given and the instance queries should be used.
std::optional<Query> query_from_flags(const std::string& op, const Flags& f, bool grid_given) {
  Query q;
  q.op = op;
  Json& p = q.params;
  if (!f.x.empty()) p["x"] = op == "certify" && f.kind == "lemma10" ? parse_vector(f.x, "--x")[0] : parse_vector(f.x, "--x");
  if (!f.xstar.empty()) p["xstar"] = parse_vector(f.xstar, "--xstar");
  if (!f.eps.empty()) {
    const bool many = f.kind.rfind("theorem", 0) == 0;
    p["eps"] = many ? parse_vector(f.eps, "--eps") : num(parse_number(f.eps, "--eps"));
  }
  if (!f.kind.empty()) p["kind"] = f.kind;
  if (f.p > 0) p["p"] = num(f.p);
  if (f.trace) p["trace"] = true;
  if (grid_given || (op == "sweep" && f.instance.empty())) p["grid"] = parse_grid(f.grid);
  for (const auto& kv : f.query_params) {
    const auto [k, v] = key_value(kv, "--set");
    try {
      p[k] = Json::parse(v);
    } catch (const Json::parse_error&) {
      p[k] = v;
    }
  }
  if (p.empty() && op != "eval-scalar") return std::nullopt;
  if (p.empty() && !f.instance.empty()) return std::nullopt;
  return q;
}

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--instance", f.instance, "instance file (JSON)");
  sub->add_option("--family", f.family, "builtin family name");
  sub->add_option("--param", f.family_params, "family parameter key=value")->take_all();
  sub->add_option("--tol", f.tol, "numeric tolerance")->check(CLI::PositiveNumber);
  sub->add_option("--max-card", f.max_card, "maximum cardinality of enumerated index sets")->check(CLI::PositiveNumber);
  sub->add_option("--eta-steps", f.eta_steps, "length of the eta schedule")->check(CLI::PositiveNumber);
  sub->add_option("--budget", f.budget, "evaluation budget")->check(CLI::PositiveNumber);
  sub->add_option("--seed", f.seed, "random seed");
  sub->add_option("--out", f.out, "output path (default stdout)");
  sub->add_option("--format", f.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  sub->add_flag("--timings", f.timings, "include per-query wall times");
}

}  // namespace

int run(int argc, char** argv) { return run(argc, argv, std::cout, std::cerr); }

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robust sums, conjugate duality and epsilon-certificates"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1, 1);
  Flags f;
  std::map<std::string, CLI::App*> subs;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"eval-scalar", "robust sum, sup and classification of a scalar family"},
      {"eval", "value of the robust sum function at --x"},
      {"norm", "robust lp norm of the residuals at --x"},
      {"conjugate", "conjugate f*(x*)"},
      {"phi", "dual value phi(x*) and its best decomposition"},
      {"gap", "primal and dual values with gap verdicts"},
      {"certify", "membership certificates and theorem graders"},
      {"regress", "robust regression solve"},
      {"approx", "best approximate solution of an inconsistent system"},
      {"sweep", "gap verdicts over a grid of x*"},
      {"run", "run every query of an instance"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, f);
    if (name == "eval" || name == "norm" || name == "certify") sub->add_option("--x", f.x, "primal point a,b,...");
    if (name == "conjugate" || name == "phi" || name == "gap" || name == "certify") {
      sub->add_option("--xstar", f.xstar, "dual point a,b,...");
    }
    if (name == "certify") {
      sub->add_option("--kind", f.kind, "certificate kind");
      sub->add_option("--eps", f.eps, "epsilon (comma list for theorem graders)");
    }
    if (name == "norm" || name == "regress" || name == "approx") sub->add_option("-p", f.p, "exponent p >= 1");
    if (name == "regress" || name == "approx") sub->add_flag("--trace", f.trace, "record the iterate trace");
    if (name == "sweep") sub->add_option("--grid", f.grid, "lo:hi:n, a,b,c or a,b;c,d");
    if (name != "run") sub->add_option("--set", f.query_params, "extra query parameter key=json")->take_all();
    subs[name] = sub;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion& e) {
    out << kToolVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return 1;
  }
  std::string op;
  for (const auto& [name, sub] : subs) {
    if (sub->parsed()) op = name;
  }
  CLI::App* sub = subs[op];
  try {
    if (f.instance.empty() == f.family.empty()) fail(ErrorCode::Schema, "exactly one of --instance and --family is required");
    Instance inst;
    std::string digest_source;
    if (!f.instance.empty()) {
      inst = load_instance(f.instance, &digest_source);
      if (!f.family_params.empty()) fail(ErrorCode::Schema, "--param applies to --family only");
    } else {
      inst.name = f.family;
      inst.family = family_from_name(f);
    }
    if (op != "run") {
      const CLI::Option* grid = sub->get_option_no_throw("--grid");
      auto q = query_from_flags(op, f, grid != nullptr && grid->count() > 0);
      if (q) {
        inst.queries = {*q};
      } else {
        std::vector<Query> keep;
        for (const auto& iq : inst.queries) {
          if (iq.op == op) keep.push_back(iq);
        }
        if (keep.empty()) fail(ErrorCode::Schema, op + ": no query flags given and the instance has no '" + op + "' queries");
        inst.queries = keep;
      }
    }
    if (f.instance.empty() || op != "run") {
      Json canon;
      canon["family"] = inst.family;
      Json qs = Json::array();
      for (const auto& q : inst.queries) qs.push_back({{"op", q.op}, {"params", q.params}});
      canon["queries"] = qs;
      digest_source += canon.dump();
    }
    RunOptions options = merge_options(RunOptions{}, inst.options);
    if (sub->count("--tol")) options.tol = options.tol_eq = f.tol;
    if (sub->count("--max-card")) options.max_card = options.scan_limit = f.max_card;
    if (sub->count("--eta-steps")) options.eta_steps = f.eta_steps;
    if (sub->count("--budget")) options.budget = f.budget;
    if (sub->count("--seed")) options.seed = f.seed;

    Outcome outcome;
    const Json report = run_instance(inst, options, digest_source, f.timings, outcome);
    std::string text;
    if (f.format == "csv") {
      const Json& results = report["results"];
      if (results.size() != 1 || !(op == "sweep" || op == "regress" || op == "approx")) {
        fail(ErrorCode::Schema, "--format csv applies to a single sweep, regress or approx query");
      }
      if (results[0].contains("error")) {
        text = dump(report);
      } else {
        text = op == "sweep" ? sweep_csv(results[0]) : trace_csv(results[0]);
      }
    } else {
      text = dump(report);
    }
    if (f.out.empty()) {
      out << text;
    } else {
      std::ofstream file(f.out, std::ios::binary);
      if (!file) fail(ErrorCode::Schema, "--out: cannot open '" + f.out + "'");
      file << text;
    }
    return exit_code(outcome);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace robustsum
