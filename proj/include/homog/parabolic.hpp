#pragma once

#include "homog/grid.hpp"
#include "homog/operator_core.hpp"

#include <optional>
#include <string>
#include <vector>

namespace homog {

// w_t = diffusion * tr{a(Dw) D^2 w} + c(force_scale * x) sqrt(1 + |Dw|^2).
// diffusion = force_scale = 1 is the rescaled flow; diffusion = eps and
// force_scale = 1/eps is the eps-problem written for u^eps directly.
struct FlowSettings {
  double diffusion = 1.0;
  double force_scale = 1.0;
  // Torus only: the evolved field is the periodic part phi of w = tilt.x + phi.
  std::optional<Vector> tilt;
  double cfl_safety = 0.9;
};

struct RateStats {
  double lipschitz = 0.0;
  double max_hessian_norm = 0.0;
  double sup_rate = 0.0;
  bool finite = true;
};

// Explicit central-difference discretization of the flow on a fixed grid.
// Force samples are taken once at construction.
class FlowOperator {
 public:
  FlowOperator(const ForcingField& force, const GridSpec& spec, FlowSettings settings = {});

  const GridSpec& spec() const { return spec_; }
  const FlowSettings& settings() const { return settings_; }
  double max_abs_force() const { return max_abs_force_; }
  const std::vector<double>& force_samples() const { return force_; }

  // Writes the right-hand side into `rate` and returns gradient/Hessian stats.
  RateStats rate(const GridFunction& w, std::vector<double>& rate) const;
  RateStats rate(std::span<const double> values, std::vector<double>& rate) const;
  double cfl_limit(double lipschitz) const;

 private:
  GridSpec spec_;
  FlowSettings settings_;
  std::vector<double> force_;
  double max_abs_force_ = 0.0;
  // Scratch; one operator per worker thread.
  mutable std::vector<double> padded_;
};

/// Forward-Euler update. Throws rejected-step when dt exceeds the CFL limit
/// and divergence on non-finite output.
GridFunction step(const GridFunction& w, double dt, const ForcingField& force,
                  const FlowSettings& settings = {});

/// min(safety h^2 / (2 n diffusion), h / (max|c| sqrt(1 + L^2) + 1)) with L
/// the current discrete Lipschitz constant (tilt included).
double cfl_limit(const GridFunction& w, const ForcingField& force,
                 const FlowSettings& settings = {});

struct MonitorRecord {
  double t = 0.0;
  double sup_wt = 0.0;
  double lipschitz = 0.0;
  double max_hessian_norm = 0.0;
};

struct Snapshot {
  double t = 0.0;
  std::size_t step = 0;
  GridFunction field;
};

// Streaming checks over every accepted step with t >= tau, independent of
// the monitor stride.
struct MonitorSummary {
  double tau = 0.0;
  double lipschitz_at_tau = 0.0;
  double sup_wt_at_tau = 0.0;
  double max_lipschitz_after_tau = 0.0;
  double max_lipschitz = 0.0;
  // max over k of sup_wt(t_k) / min_{tau <= t_j < t_k} sup_wt(t_j) - 1
  double worst_wt_increase = 0.0;
  double worst_wt_increase_time = 0.0;
};

struct EvolutionTrace {
  std::vector<Snapshot> snapshots;
  std::vector<MonitorRecord> monitors;
  double dt = 0.0;  // first accepted step
  std::size_t steps = 0;
  MonitorSummary summary;

  const Snapshot& at_time(double t) const;
  const Snapshot& final() const { return snapshots.back(); }
};

enum class ProblemScale { rescaled, epsilon };

struct ParabolicProblem {
  ForcingField force = ForcingField::zero(1);
  // Required whenever the force is not identically zero.
  std::optional<CoercivityCertificate> certificate;
  GridFunction initial = GridFunction::constant(GridSpec::torus(1, 8), 0.0);
  double lipschitz_bound = 0.0;
  double horizon = 1.0;
  ProblemScale scale = ProblemScale::rescaled;
  double epsilon = 1.0;
  std::optional<Vector> tilt;

  // Snapshot times in (0, T]; 0 and T are always included.
  std::vector<double> snapshot_times;
  bool snapshot_every_step = false;
  std::optional<double> fixed_dt;
  std::size_t monitor_stride = 1;
  // Gradient growth beyond 10 max(N0, M) aborts with apriori-violation.
  std::optional<double> gradient_bound;
  // Defaults to 10 dt0.
  std::optional<double> tau;
  double cfl_safety = 0.9;
};

EvolutionTrace evolve(const ParabolicProblem& problem);

enum class EpsilonPath { direct, rescaled };

struct EpsilonOptions {
  EpsilonPath path = EpsilonPath::direct;
  std::vector<double> snapshot_times;
  std::optional<CoercivityCertificate> certificate;
  double lipschitz_bound = 0.0;  // 0 means: measure from u0
  std::size_t monitor_stride = 1;
  std::optional<double> gradient_bound;
};

/// Integrates u_t + F(eps D^2u, Du, x/eps) = 0, requiring h <= eps/16.
/// The rescaled path evolves w(y, s) = u(eps y, eps s)/eps and maps back.
EvolutionTrace solve_epsilon_problem(const ForcingField& force, const GridFunction& u0,
                                     double eps, double T, const EpsilonOptions& options = {});

struct ComparisonResult {
  bool ordered = true;
  double worst_violation = 0.0;  // max of low - high - tolerance, <= 0 when ordered
  double worst_time = 0.0;
};

/// Checks low <= high at every shared snapshot within 1e-12 * steps.
ComparisonResult comparison_check(const EvolutionTrace& low, const EvolutionTrace& high);

struct AprioriEstimates {
  double N0 = 0.0;
  double C1_proxy = 0.0;
  double T_star = 0.0;
  double M_emp = 0.0;
  double tau = 0.0;
};

/// Fits C1 so that z(t) <= z0 / (1 - (C1 + 1) z0 t) holds on the recorded
/// monitors with t <= fit_window, z = sqrt(1 + L(t)^2), z0 = sqrt(1 + N0^2).
AprioriEstimates estimate_apriori(const EvolutionTrace& trace, double N0, double fit_window);

/// Largest violation of the short-time bound on [0, min(T*/2, horizon)];
/// non-positive means the bound holds.
double short_time_bound_violation(const EvolutionTrace& trace, const AprioriEstimates& est);

/// Writes snapshot_<k>.csv per snapshot, snapshots.csv (index, t, step,
/// file) and monitors.csv (t, sup_wt, lipschitz, max_hessian_norm) into dir.
void export_trace(const EvolutionTrace& trace, const std::string& dir);

/// sqrt(|x|^2 + h^2), the cone |x| smoothed over one cell.
GridFunction mollified_cone(const GridSpec& spec);

}  // namespace homog
