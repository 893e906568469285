#pragma once

#include <string>

#include "robustsum/instance.hpp"

namespace robustsum {

inline constexpr const char* kToolVersion = "1.0.0";

struct Outcome {
  bool counterexample = false;  // grader counterexample or failed weak duality
  bool unknown = false;
  bool error = false;
};

// 0 success, 2 counterexample / inconsistency, 3 unknown-dominated, 1 query error.
int exit_code(const Outcome& o);

Json num(double v);
Json bracket_json(const Bracket& b);

std::string sha256_hex(const std::string& bytes);

// Runs every query of the instance; the report is a pure function of its inputs
// unless timings are requested.
Json run_instance(const Instance& inst, const RunOptions& options, const std::string& digest_source,
                  bool timings, Outcome& outcome);

// 17 significant digits, "inf" for infinities.
std::string csv_number(double v);
std::string sweep_csv(const Json& sweep_result);
std::string trace_csv(const Json& solve_result);
std::string dump(const Json& j);

}  // namespace robustsum
