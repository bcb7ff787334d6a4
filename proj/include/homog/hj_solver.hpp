#pragma once

#include "homog/cell_problem.hpp"
#include "homog/parabolic.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace homog {

// F-bar as a table or a closed form p -> F-bar(p).
class EffectiveHamiltonian {
 public:
  using Closure = std::function<double(const double*)>;

  static EffectiveHamiltonian from_table(EffectiveHamiltonianTable table);
  /// slope_bounds[i] >= sup |dF/dp_i| over the slopes the solve can reach.
  static EffectiveHamiltonian closed_form(int n, Closure fn, std::vector<double> slope_bounds,
                                          std::string label);
  /// -c0 sqrt(1 + |p|^2), the homogenized operator of a constant force.
  static EffectiveHamiltonian constant_force(int n, double c0);
  static EffectiveHamiltonian zero(int n) { return constant_force(n, 0.0); }

  int dimension() const { return n_; }
  const std::string& label() const { return label_; }
  bool is_table() const { return table_ != nullptr; }
  const EffectiveHamiltonianTable* table() const { return table_.get(); }
  std::optional<double> coverage() const;

  double operator()(const double* p, bool* clamped = nullptr) const;
  double operator()(const Vector& p, bool* clamped = nullptr) const { return (*this)(p.data(), clamped); }
  double measured_slope(int axis) const { return slopes_[axis]; }
  /// 1.2 x measured slope per axis.
  std::vector<double> default_theta() const;

 private:
  int n_ = 1;
  std::shared_ptr<const EffectiveHamiltonianTable> table_;
  Closure fn_;
  std::vector<double> slopes_;
  std::string label_;
};

struct HJStepStats {
  std::size_t queries = 0;
  std::size_t clamped = 0;
  double lipschitz = 0.0;
  double sup_rate = 0.0;
};

/// u - dt [F((D+u + D-u)/2) - sum_i theta_i/2 (D_i+u - D_i-u)].
/// Throws monotonicity-violation when theta_i is below the measured slope
/// and rejected-step when dt > 0.9 h / (n max theta).
GridFunction lax_friedrichs_step(const GridFunction& u, double dt, const EffectiveHamiltonian& H,
                                 const std::vector<double>& theta, HJStepStats* stats = nullptr);

struct EffectiveProblem {
  EffectiveHamiltonian hamiltonian = EffectiveHamiltonian::zero(1);
  GridFunction initial = GridFunction::constant(GridSpec::torus(1, 8), 0.0);
  double lipschitz_bound = 0.0;
  double horizon = 1.0;
  // Defaults to default_theta().
  std::optional<std::vector<double>> theta;
  std::vector<double> snapshot_times;
  double cfl_safety = 0.9;
  std::optional<double> fixed_dt;
  std::size_t monitor_stride = 1;
};

struct EffectiveTrace : EvolutionTrace {
  std::vector<double> theta;
  std::size_t queries = 0;
  std::size_t clamped_queries = 0;
};

/// Integrates u_t + F(Du) = 0 to T with exact landing on snapshot times.
/// Throws coverage when more than 0.1% of table queries were clamped.
EffectiveTrace solve_effective(const EffectiveProblem& problem);

}  // namespace homog
