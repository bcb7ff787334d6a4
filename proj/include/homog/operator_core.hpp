#pragma once

#include "homog/forcing.hpp"

#include <optional>
#include <string>

namespace homog {

/// a(p) = I - p (x) p / (1 + |p|^2). Eigenvalues lie in [1/(1+|p|^2), 1].
Matrix projection_matrix(const Vector& p);

/// <p> = sqrt(1 + |p|^2).
double japanese_bracket(const Vector& p);

/// F(X, p, y) = -tr{a(p) X} - c(y) <p>, the graph mean-curvature operator
/// with forcing. X must be symmetric to 1e-12 relative.
double evaluate_F(const Matrix& X, const Vector& p, const Vector& y,
                  const ForcingField& force);

/// Same operator with the force value supplied directly.
double evaluate_F(const Matrix& X, const Vector& p, double force_value);

struct CoercivityCertificate {
  double delta = 0.0;
  double min_margin = 0.0;     // min over samples of c^2 - (n-1)|Dc|
  double lipschitz_slack = 0.0;  // bound on how far the true min can sit below min_margin
  double sample_resolution = 0.0;
  std::vector<double> worst_point;
  std::string force_label;
};

/// Samples c^2 - (n-1)|Dc| on a uniform torus grid of spacing <= resolution.
/// Throws CoercivityViolation when the margin minus slack does not exceed delta.
CoercivityCertificate check_coercivity(const ForcingField& force, double delta,
                                       double resolution);

/// Quintic smoothstep cutoff: 1 on [0, r0], 0 on [r0 + 1, inf).
class CutoffProfile {
 public:
  CutoffProfile() = default;
  explicit CutoffProfile(double plateau_end) : r0_(plateau_end) {}

  double operator()(double r) const;
  double derivative(double r) const;
  double plateau_end() const { return r0_; }
  double support_end() const { return r0_ + 1.0; }

 private:
  double r0_ = 0.0;
};

/// c~(y, p) = xi(<p>) c(y) + (1 - xi(<p>)) c0 with xi cut off at
/// sqrt(1 + M^2) + 1 and sqrt(1 + M^2) + 2.
class ModifiedForce {
 public:
  ModifiedForce(ForcingField base, double gradient_bound, double delta);

  const ForcingField& base() const { return base_; }
  int dimension() const { return base_.dimension(); }
  double gradient_bound() const { return M_; }
  double delta() const { return delta_; }
  double saturation() const { return c0_; }
  const CutoffProfile& cutoff() const { return xi_; }

  double weight(const Vector& p) const { return xi_(japanese_bracket(p)); }
  double value(const Vector& y, const Vector& p) const;
  Vector gradient_y(const Vector& y, const Vector& p) const;
  /// True when xi(<p>) = 0, i.e. c~(., p) is the constant c0.
  bool saturated(const Vector& p) const;
  /// min_y c~(y, p) and max_y c~(y, p) using the sampled extremes of c.
  double min_over_y(const Vector& p) const;
  double max_over_y(const Vector& p) const;

 private:
  ForcingField base_;
  double M_;
  double delta_;
  double c0_;
  CutoffProfile xi_;
};

/// Requires a certificate issued for this force.
ModifiedForce build_modified_force(const ForcingField& force,
                                   const std::optional<CoercivityCertificate>& certificate,
                                   double M);

}  // namespace homog
