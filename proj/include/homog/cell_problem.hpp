#pragma once

#include "homog/grid.hpp"
#include "homog/operator_core.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace homog {

struct CorrectorBounds {
  double sup_v = 0.0;
  double sup_dv = 0.0;
  double sup_d2v = 0.0;
};

struct CorrectorSolution {
  Vector p;
  GridFunction corrector = GridFunction::constant(GridSpec::torus(1, 8), 0.0);  // v(0) = 0
  double effective_value = 0.0;
  double lambda = 0.0;
  // sup |F~(D^2 v, p + Dv, y) - F-bar(p)| over the grid.
  double residual = 0.0;
  // sup |lambda v^lambda + F~(...)| at termination.
  double discounted_residual = 0.0;
  int iterations = 0;
  CorrectorBounds bounds;
};

struct CellOptions {
  double stop_tol = 1e-8;
  int max_iterations = 200;
  // Initial guess for v^lambda (periodic part); zero by default.
  std::optional<std::vector<double>> initial;
  // Initial guess for -F-bar; defaults to the y-mean of c~(., p) <p>.
  std::optional<double> initial_speed;
};

/// Solves lambda v + F~(D^2 v, p + Dv, y) = 0 on the torus and extracts
/// F-bar(p) = mean(-lambda v).
CorrectorSolution solve_discounted(const Vector& p, double lambda, const ModifiedForce& force,
                                   const GridSpec& grid, const CellOptions& options = {});

struct EffectiveValue {
  double value = 0.0;
  double uncertainty = 0.0;
  bool ill_conditioned = false;
  std::vector<double> lambdas;
  std::vector<double> per_lambda;
  CorrectorSolution corrector;  // from the smallest lambda
};

/// Least-squares line through mean(-lambda v^lambda) against lambda,
/// evaluated at lambda = 0. The uncertainty is the spread (max - min) of the
/// per-lambda values; ill_conditioned is set when it exceeds 10 stop_tol.
EffectiveValue richardson_effective_value(const Vector& p, const ModifiedForce& force,
                                          const GridSpec& grid, const std::vector<double>& lambdas,
                                          const CellOptions& options = {});

struct TableOptions {
  CellOptions cell;
  // Coverage P must be at least this (N0 + 2 for the effective solve).
  double required_coverage = 0.0;
  double range_slack = 1e-6;
  int jobs = 1;
};

// F-bar sampled on a uniform grid of [-P, P]^n, interpolated multilinearly.
class EffectiveHamiltonianTable {
 public:
  EffectiveHamiltonianTable() = default;
  EffectiveHamiltonianTable(int n, double P, int samples, std::vector<double> values,
                            std::vector<double> uncertainties, std::string force_label);

  int dimension() const { return n_; }
  double coverage() const { return P_; }
  int samples_per_axis() const { return samples_; }
  double spacing() const { return 2.0 * P_ / (samples_ - 1); }
  std::size_t size() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& uncertainties() const { return uncertainties_; }
  const std::string& force_label() const { return force_label_; }
  Vector sample_point(std::size_t k) const;

  /// Multilinear interpolation; p is clamped into [-P, P]^n and `clamped`
  /// reports whether that happened.
  double value(const Vector& p, bool* clamped = nullptr) const;
  double value(const double* p, bool* clamped = nullptr) const;
  /// max |finite-difference slope| along an axis.
  double slope_bound(int axis) const;
  double second_difference_bound(int axis) const;
  /// max |F(p) - F(-p)| over the samples (recorded, not assumed).
  double symmetry_defect() const;

  // Build byproducts.
  std::vector<CorrectorBounds> corrector_bounds;
  std::vector<double> range_low;
  std::vector<double> range_high;
  int ill_conditioned_samples = 0;

 private:
  int n_ = 1;
  double P_ = 0.0;
  int samples_ = 0;
  std::vector<double> values_;
  std::vector<double> uncertainties_;
  std::string force_label_;
};

EffectiveHamiltonianTable build_table(const ModifiedForce& force, double P, int samples_per_axis,
                                      const GridSpec& grid, const std::vector<double>& lambdas,
                                      const TableOptions& options = {});

/// Uniform corrector bounds over every sample stored in the table.
CorrectorBounds corrector_bound_report(const EffectiveHamiltonianTable& table);

/// Range check for one entry: [min(-c~(., p)) <p>, max(-c~(., p)) <p>].
std::pair<double, double> effective_range(const ModifiedForce& force, const Vector& p);

void write_table_csv(const EffectiveHamiltonianTable& table, std::ostream& os);
void write_table_csv(const EffectiveHamiltonianTable& table, const std::string& path);
EffectiveHamiltonianTable read_table_csv(std::istream& is);
EffectiveHamiltonianTable read_table_csv_file(const std::string& path);

}  // namespace homog
