#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "robustsum/duality.hpp"
#include "robustsum/function_family.hpp"
#include "robustsum/scalar_family.hpp"

namespace robustsum {

using Json = nlohmann::ordered_json;

struct RunOptions {
  double tol = 1e-9;
  double tol_eq = 1e-9;
  double attain_tol = 1e-10;
  unsigned max_card = 20;
  unsigned eta_steps = 20;
  unsigned scan_limit = 30;
  std::uint64_t budget = 1'000'000;
  std::uint64_t seed = 1;

  DualityOptions duality() const;
  ScalarOptions scalar() const;
  Json to_json() const;
};

struct Query {
  std::string op;
  Json params = Json::object();
};

struct FamilyHandle {
  std::string kind;
  std::optional<ScalarFamily> scalar;               // scalar, scalar_gen
  std::shared_ptr<const FunctionFamily> functions;  // everything else
  double p = 0;                                     // exponent of residual families, 0 otherwise
};

struct Instance {
  int version = 1;
  std::string name;
  std::string description;
  Json family;
  Json options = Json::object();
  std::vector<Query> queries;
};

// Throws Error(Schema) with a JSON-pointer path on any violation.
Instance parse_instance(const Json& j);
Instance load_instance(const std::string& path, std::string* raw = nullptr);
FamilyHandle build_family(const Json& desc, const std::string& pointer = "/family");
// Applies the "options" block of an instance on top of base.
RunOptions merge_options(RunOptions base, const Json& options, const std::string& pointer = "/options");

extern const std::vector<std::string> kQueryOps;

// Parameter readers shared by the dispatcher; errors carry the pointer.
namespace params {
double number(const Json& obj, const std::string& key, const std::string& ptr);
double number_or(const Json& obj, const std::string& key, double fallback, const std::string& ptr);
Vector vector(const Json& obj, const std::string& key, const std::string& ptr);
std::vector<Vector> points(const Json& obj, const std::string& key, const std::string& ptr);
std::vector<double> numbers(const Json& obj, const std::string& key, const std::string& ptr);
std::vector<std::size_t> indices(const Json& obj, const std::string& key, const std::string& ptr);
std::string string(const Json& obj, const std::string& key, const std::string& ptr);
void allow(const Json& obj, std::initializer_list<const char*> keys, const std::string& ptr);
}  // namespace params

}  // namespace robustsum
