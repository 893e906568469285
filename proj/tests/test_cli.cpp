#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "robustsum/cli.hpp"
#include "robustsum/errors.hpp"
#include "robustsum/instance.hpp"
#include "robustsum/report.hpp"

using namespace robustsum;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "robustsum");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out;
  std::ostringstream err;
  Run r;
  r.code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string fixture(const std::string& name) { return std::string(ROBUSTSUM_FIXTURES) + "/" + name; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string schema_error(const std::string& text) {
  try {
    parse_instance(Json::parse(text));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Schema);
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("schema violations carry JSON pointers") {
  CHECK(schema_error(R"({"version": 2, "family": {"kind": "affine", "rows": [[0, 0]]}, "queries": []})")
            .find("/version") != std::string::npos);
  CHECK(schema_error(R"({"version": 1, "family": {"kind": "affine", "rows": [[0, 0]]}, "queries": [], "extra": 1})")
            .find("/extra") != std::string::npos);
  CHECK(schema_error(R"({"version": 1, "family": {"kind": "affine", "rows": [[0, 0]]}, "queries": [{"op": "bogus", "params": {}}]})")
            .find("/queries/0/op") != std::string::npos);
  const std::string bad_row = R"({"version": 1, "family": {"kind": "affine", "rows": [[0, "a"]]}, "queries": []})";
  try {
    build_family(parse_instance(Json::parse(bad_row)).family);
    FAIL("expected a schema error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("/family/rows/0/1") != std::string::npos);
  }
}

TEST_CASE("unknown query parameters are rejected") {
  const auto dir = std::filesystem::temp_directory_path() / "robustsum_cli_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "bad.json").string();
  std::ofstream(path) << R"({"version": 1, "family": {"kind": "affine", "rows": [[0, 0]]},
    "queries": [{"op": "gap", "params": {"xstar": [0], "typo": 1}}]})";
  const Run r = invoke({"run", "--instance", path});
  CHECK(r.code == 1);
  CHECK(r.err.find("/queries/0/params/typo") != std::string::npos);
}

TEST_CASE("usage errors exit with 1") {
  CHECK(invoke({}).code == 1);
  CHECK(invoke({"gap"}).code == 1);
  CHECK(invoke({"gap", "--family", "example1", "--instance", fixture("affine_pair.json")}).code == 1);
  CHECK(invoke({"sweep", "--instance", fixture("affine_pair.json"), "--grid", "0,x"}).code == 1);
  CHECK(invoke({"gap", "--instance", fixture("affine_pair.json"), "--xstar", "1", "--format", "xml"}).code == 1);
}

TEST_CASE("scalar evaluation by family name") {
  const Run r = invoke({"eval-scalar", "--family", "example1", "--tol", "1e-8"});
  REQUIRE(r.code == 0);
  const Json j = Json::parse(r.out);
  const Json& q = j["results"][0];
  CHECK(q["robust_sum"]["lo"].get<double>() == doctest::Approx(0.41123352).epsilon(1e-8));
  CHECK(q["classification"]["kind"] == "minus_infinity");
}

TEST_CASE("gap query from flags") {
  const Run r = invoke({"gap", "--instance", fixture("affine_pair.json"), "--xstar", "1"});
  REQUIRE(r.code == 0);
  const Json q = Json::parse(r.out)["results"][0];
  CHECK(q["zero_gap"] == "no");
  CHECK(q["dual"] == "-inf");
}

TEST_CASE("regression from flags") {
  const Run r = invoke({"regress", "--instance", fixture("geometric_cloud.json"), "-p", "2"});
  REQUIRE(r.code == 0);
  const Json q = Json::parse(r.out)["results"][0];
  CHECK(q["x_opt"][0].get<double>() == doctest::Approx(0.0));
  CHECK(q["x_opt"][1].get<double>() == doctest::Approx(1.0));
}

TEST_CASE("sweep CSV") {
  const Run r = invoke({"sweep", "--instance", fixture("affine_pair.json"), "--grid", "0,0.5,1,1.5,2", "--format", "csv"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "xstar,conjugate_lo,conjugate_hi,phi_lo,phi_hi,gap,zero_gap,strong_gap");
  std::vector<std::string> gaps;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    REQUIRE(cells.size() == 8);
    gaps.push_back(cells[5]);
  }
  CHECK(gaps == std::vector<std::string>{"0", "inf", "inf", "inf", "0"});

  const Run empty = invoke({"sweep", "--instance", fixture("affine_pair.json"), "--grid", "", "--format", "csv"});
  CHECK(empty.code == 0);
  CHECK(empty.out == "xstar,conjugate_lo,conjugate_hi,phi_lo,phi_hi,gap,zero_gap,strong_gap\n");

  const Run single = invoke({"sweep", "--family", "geometric_constants", "--grid", "-1:1:5", "--format", "csv"});
  CHECK(single.code == 0);
}

TEST_CASE("singleton family sweep has zero gap everywhere") {
  const auto dir = std::filesystem::temp_directory_path() / "robustsum_cli_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "single.json").string();
  std::ofstream(path) << R"({"version": 1, "family": {"kind": "power", "rows": [[1, 0.5]], "p": 2},
    "queries": [{"op": "sweep", "params": {"grid": {"lo": -2, "hi": 2, "n": 9}}}]})";
  const Run r = invoke({"run", "--instance", path});
  REQUIRE(r.code == 0);
  for (const auto& row : Json::parse(r.out)["results"][0]["rows"]) CHECK(row["gap"].get<double>() == 0);
}

TEST_CASE("trace CSV") {
  const Run r = invoke({"approx", "--instance", fixture("inconsistent_1d.json"), "-p", "2", "--trace", "--format", "csv"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("iteration,x,objective,step\n", 0) == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') >= 2);
}

TEST_CASE("exit codes for counterexamples and unknown verdicts") {
  Outcome o;
  CHECK(exit_code(o) == 0);
  o.unknown = true;
  CHECK(exit_code(o) == 3);
  o.counterexample = true;
  CHECK(exit_code(o) == 2);
  o.error = true;
  CHECK(exit_code(o) == 1);
}

TEST_CASE("reports are deterministic and match the goldens") {
  for (const char* name : {"example1", "affine_pair", "geometric_constants", "geometric_cloud", "inconsistent_1d",
                           "hinge_pair"}) {
    const std::string path = fixture(std::string(name) + ".json");
    const Run a = invoke({"run", "--instance", path});
    const Run b = invoke({"run", "--instance", path});
    INFO(name);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out == read_file(fixture(std::string("golden/") + name + ".json")));
  }
}

TEST_CASE("timings are segregated from the deterministic report") {
  const Run r = invoke({"run", "--instance", fixture("hinge_pair.json"), "--timings"});
  const Json j = Json::parse(r.out);
  CHECK(j.contains("timings_ms"));
  Json stripped = j;
  stripped.erase("timings_ms");
  const Run plain = invoke({"run", "--instance", fixture("hinge_pair.json")});
  CHECK(dump(stripped) == plain.out);
}

TEST_CASE("number formatting") {
  CHECK(csv_number(0.1) == "0.10000000000000001");
  CHECK(csv_number(kInf) == "inf");
  CHECK(csv_number(-kInf) == "-inf");
  CHECK(dump(Json{{"a", 0.5}, {"b", {1, 2}}}) == "{\n  \"a\": 0.5,\n  \"b\": [1, 2]\n}\n");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

}
