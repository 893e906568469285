#include "robustsum/errors.hpp"

namespace robustsum {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidFamily: return "invalid_family";
    case ErrorCode::UnknownBudgetExceeded: return "unknown_budget_exceeded";
    case ErrorCode::SizeLimit: return "size_limit";
    case ErrorCode::DimensionMismatch: return "dimension_mismatch";
    case ErrorCode::PreconditionViolated: return "precondition_violated";
    case ErrorCode::InconclusiveGrowth: return "inconclusive_growth";
    case ErrorCode::BudgetExceeded: return "budget_exceeded";
    case ErrorCode::Unsupported: return "unsupported";
    case ErrorCode::EmptyDomain: return "empty_domain";
    case ErrorCode::NoConvergence: return "no_convergence";
    case ErrorCode::Schema: return "schema";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace robustsum
