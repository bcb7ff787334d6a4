#include "homog/error.hpp"

namespace homog {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::precondition: return "precondition";
    case ErrorCode::out_of_domain: return "out-of-domain";
    case ErrorCode::coercivity_violation: return "coercivity-violation";
    case ErrorCode::rejected_step: return "rejected-step";
    case ErrorCode::divergence: return "divergence";
    case ErrorCode::apriori_violation: return "apriori-violation";
    case ErrorCode::resolution: return "resolution";
    case ErrorCode::iteration_limit: return "iteration-limit";
    case ErrorCode::table_validation: return "table-validation";
    case ErrorCode::monotonicity_violation: return "monotonicity-violation";
    case ErrorCode::coverage: return "coverage";
    case ErrorCode::degenerate_fit: return "degenerate-fit";
    case ErrorCode::degenerate_report: return "degenerate-report";
    case ErrorCode::io: return "io";
    case ErrorCode::parse: return "parse";
  }
  return "unknown";
}

bool is_numerical(ErrorCode code) {
  switch (code) {
    case ErrorCode::rejected_step:
    case ErrorCode::divergence:
    case ErrorCode::apriori_violation:
    case ErrorCode::iteration_limit:
    case ErrorCode::table_validation:
    case ErrorCode::monotonicity_violation:
    case ErrorCode::coverage:
    case ErrorCode::degenerate_fit:
      return true;
    default:
      return false;
  }
}

}  // namespace homog
