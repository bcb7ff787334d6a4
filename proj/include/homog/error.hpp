#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace homog {

enum class ErrorCode {
  invalid_argument,
  precondition,
  out_of_domain,
  coercivity_violation,
  rejected_step,
  divergence,
  apriori_violation,
  resolution,
  iteration_limit,
  table_validation,
  monotonicity_violation,
  coverage,
  degenerate_fit,
  degenerate_report,
  io,
  parse,
};

const char* to_string(ErrorCode code);

// Numerical failures map to CLI exit code 2, everything else to 1.
bool is_numerical(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class CoercivityViolation : public Error {
 public:
  CoercivityViolation(const std::string& what, std::vector<double> worst_point,
                      double margin)
      : Error(ErrorCode::coercivity_violation, what),
        worst_point_(std::move(worst_point)),
        margin_(margin) {}
  const std::vector<double>& worst_point() const noexcept { return worst_point_; }
  double margin() const noexcept { return margin_; }

 private:
  std::vector<double> worst_point_;
  double margin_;
};

class DivergenceError : public Error {
 public:
  DivergenceError(ErrorCode code, const std::string& what, double time)
      : Error(code, what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace homog
