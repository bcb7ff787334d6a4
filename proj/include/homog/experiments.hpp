#pragma once

#include "homog/cell_problem.hpp"
#include "homog/hj_solver.hpp"
#include "homog/parabolic.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace homog {

// Initial data used by the experiments:
//   flat            u0 = 0
//   cone            u0 = |x|
//   mollified_cone  u0 = sqrt(|x|^2 + eta^2), eta = 0 means one grid cell
//   sine            u0 = eta sin(2 pi x_1)
struct InitialProfile {
  enum class Kind { flat, cone, mollified_cone, sine };
  Kind kind = Kind::flat;
  double eta = 0.0;

  double operator()(const Vector& x) const;
  double lipschitz() const;
  GridFunction sample(const GridSpec& spec) const;
  std::string label() const;
  static InitialProfile parse(const std::string& text);
};

struct RateSweepSettings {
  ForcingField force = ForcingField::zero(1);
  double delta = 0.1;
  // Gradient bound M of the modified force; defaults to max(N0, 1).
  std::optional<double> gradient_bound;
  InitialProfile initial;
  double horizon = 1.0;
  std::vector<double> eps_list{0.25, 0.125, 0.0625, 0.03125, 0.015625};
  double half_extent = 2.0;
  std::optional<double> window;  // defaults to L / 2
  int points_per_eps = 16;        // h = eps / points_per_eps
  int effective_refinement = 2;   // effective grid = finest eps grid refined this many times
  // Table for non-constant forces.
  std::optional<double> table_coverage;  // defaults to N0 + 2
  int table_samples = 81;
  int cell_points = 256;
  std::vector<double> lambdas{1e-2, 5e-3, 2.5e-3};
  double stop_tol = 1e-8;
  int jobs = 1;
};

struct RateRecord {
  double eps = 0.0;
  double error = 0.0;
  double h = 0.0;
  std::vector<double> times;
  std::vector<double> errors_at_times;
  std::size_t steps = 0;
  double max_lipschitz = 0.0;
  std::string failure;  // non-empty when the run was excluded
};

struct ExponentFit {
  double exponent = 0.0;
  double constant = 0.0;
  std::vector<double> residuals;
};

struct RateReport {
  nlohmann::json scenario;
  std::vector<RateRecord> records;
  std::optional<ExponentFit> fit;
  std::vector<std::string> notes;
  // max / min of err / sqrt(eps) over the included records.
  double constant_spread = 0.0;
  bool monotone = true;
  nlohmann::json monitors;
};

/// Solves the eps-problem and the effective problem on nested box grids and
/// measures sup |u^eps - u| over |x| <= window at T/4, T/2 and T.
RateReport run_rate_sweep(const RateSweepSettings& settings);

/// Least squares on (log eps, log error); slope = exponent.
ExponentFit fit_exponent(const std::vector<std::pair<double, double>>& records);

struct ConeSettings {
  int n = 1;
  std::vector<double> eps_list{0.25, 0.125, 0.0625, 0.03125, 0.015625};
  std::vector<int> resolutions{256, 512, 1024};
  double half_extent = 4.0;      // box for the rescaled expander run
  double eps_half_extent = 1.0;  // box for the eps-problems
  int points_per_eps = 32;
  int self_similarity_samples = 16;
  int jobs = 1;
};

struct ConeResolution {
  int points = 0;
  double h = 0.0;
  double center_value = 0.0;  // w-bar(0, 1)
  double self_similarity_residual = 0.0;
};

struct ConeRecord {
  double eps = 0.0;
  double h = 0.0;
  double lower_bound_value = 0.0;  // u^eps(0, 1) - u(0, 1)
  double scaled = 0.0;             // lower_bound_value / sqrt(eps)
  double relative_to_expander = 0.0;
};

struct ConeExample {
  nlohmann::json scenario;
  double expander_constant = 0.0;  // from the finest resolution
  double self_similarity_residual = 0.0;
  std::vector<ConeResolution> resolutions;
  std::vector<ConeRecord> records;
  ExponentFit fit;
};

/// c = 0, u0 = |x| (mollified): expander constant, self-similarity and the
/// sqrt(eps) lower bound.
ConeExample cone_experiment(const ConeSettings& settings);

struct MonitorSettings {
  ForcingField force = ForcingField::sinusoid(1, 1.0, 0.5);
  double delta = 0.2;
  // Torus initial data 0.25 sin(2 pi x_1) unless given.
  std::optional<GridFunction> initial;
  int points = 128;
  double horizon = 2.0;
  double fit_window = 0.1;
  double wt_slack = 1e-3;
  double m_emp_tolerance = 0.05;
};

struct MonitorCheck {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double limit = 0.0;
  double time = 0.0;
  std::string detail;
};

struct MonitorSuiteResult {
  AprioriEstimates estimates;
  AprioriEstimates doubled;  // same run to 2T
  std::vector<MonitorCheck> checks;
  bool passed() const;
};

/// Runs evolve() to T and 2T and checks the time-derivative, gradient and
/// short-time monitors.
MonitorSuiteResult apriori_monitor_suite(const MonitorSettings& settings);

nlohmann::json to_json(const RateReport& r);
nlohmann::json to_json(const ConeExample& c);
nlohmann::json to_json(const MonitorSuiteResult& m);

/// Writes report.json (plus errors.csv and rate_plot.svg for sweeps and
/// cone runs) into dir. `config` is embedded verbatim.
void emit_report(const RateReport& report, const std::string& dir, const nlohmann::json& config);
void emit_report(const ConeExample& report, const std::string& dir, const nlohmann::json& config);

/// Deterministic log-log SVG: scatter of (eps, error) plus the fitted line.
std::string rate_plot_svg(const std::vector<std::pair<double, double>>& points,
                          const std::optional<ExponentFit>& fit, const std::string& title);

const char* version();

}  // namespace homog
