#include "homog/operator_core.hpp"

#include "homog/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace homog {

namespace {

void require_finite(const Vector& p, const char* what) {
  if (!p.allFinite()) {
    throw Error(ErrorCode::invalid_argument, std::string(what) + " has non-finite entries");
  }
}

}  // namespace

double japanese_bracket(const Vector& p) { return std::sqrt(1.0 + p.squaredNorm()); }

Matrix projection_matrix(const Vector& p) {
  require_finite(p, "gradient");
  const auto n = p.size();
  return Matrix::Identity(n, n) - (p * p.transpose()) / (1.0 + p.squaredNorm());
}

double evaluate_F(const Matrix& X, const Vector& p, double force_value) {
  if (X.rows() != p.size() || X.cols() != p.size()) {
    throw Error(ErrorCode::invalid_argument, "Hessian and gradient dimensions disagree");
  }
  const double scale = std::max(1.0, X.cwiseAbs().maxCoeff());
  if ((X - X.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error(ErrorCode::invalid_argument, "Hessian argument is not symmetric");
  }
  const Matrix a = projection_matrix(p);
  return -(a.cwiseProduct(X)).sum() - force_value * japanese_bracket(p);
}

double evaluate_F(const Matrix& X, const Vector& p, const Vector& y,
                  const ForcingField& force) {
  return evaluate_F(X, p, force.value(y));
}

CoercivityCertificate check_coercivity(const ForcingField& force, double delta,
                                       double resolution) {
  if (!(resolution > 0) || !std::isfinite(resolution)) {
    throw Error(ErrorCode::invalid_argument, "coercivity resolution must be positive");
  }
  const int n = force.dimension();
  const int per_axis = std::max(1, static_cast<int>(std::ceil(1.0 / resolution - 1e-9)));
  const double h = 1.0 / per_axis;
  const long total = n == 1 ? per_axis : static_cast<long>(per_axis) * per_axis;

  double worst = std::numeric_limits<double>::infinity();
  Vector worst_y(n);
  Vector y(n);
  for (long idx = 0; idx < total; ++idx) {
    y[0] = (idx % per_axis) * h;
    if (n == 2) y[1] = (idx / per_axis) * h;
    const double c = force.value(y);
    const double margin = c * c - (n - 1) * force.gradient(y).norm();
    if (margin < worst) {
      worst = margin;
      worst_y = y;
    }
  }

  // Distance to the nearest sample is at most h sqrt(n) / 2.
  const double lip = 2.0 * force.value_bound() * force.gradient_bound() +
                     (n - 1) * force.hessian_bound();
  const double slack = lip * h * std::sqrt(double(n)) / 2.0;

  std::vector<double> point(worst_y.data(), worst_y.data() + n);
  if (!(worst - slack > delta)) {
    throw CoercivityViolation("coercivity margin " + std::to_string(worst) + " (slack " +
                                  std::to_string(slack) + ") does not exceed delta " +
                                  std::to_string(delta),
                              point, worst);
  }
  CoercivityCertificate cert;
  cert.delta = delta;
  cert.min_margin = worst;
  cert.lipschitz_slack = slack;
  cert.sample_resolution = h;
  cert.worst_point = std::move(point);
  cert.force_label = force.label();
  return cert;
}

double CutoffProfile::operator()(double r) const {
  const double s = std::clamp(r - r0_, 0.0, 1.0);
  return 1.0 - s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

double CutoffProfile::derivative(double r) const {
  const double s = r - r0_;
  if (s <= 0.0 || s >= 1.0) return 0.0;
  return -30.0 * s * s * (1.0 - s) * (1.0 - s);
}

ModifiedForce::ModifiedForce(ForcingField base, double gradient_bound, double delta)
    : base_(std::move(base)), M_(gradient_bound), delta_(delta) {
  if (!(M_ > 0) || !std::isfinite(M_)) {
    throw Error(ErrorCode::invalid_argument, "gradient bound M must be positive");
  }
  switch (base_.sign()) {
    case ForceSign::positive: c0_ = base_.sampled_max(); break;
    case ForceSign::negative: c0_ = base_.sampled_min(); break;
    case ForceSign::indefinite:
      throw Error(ErrorCode::precondition, "modified force needs a force of constant sign");
  }
  xi_ = CutoffProfile(std::sqrt(1.0 + M_ * M_) + 1.0);
}

double ModifiedForce::value(const Vector& y, const Vector& p) const {
  const double w = weight(p);
  if (w == 0.0) return c0_;
  return w * base_.value(y) + (1.0 - w) * c0_;
}

Vector ModifiedForce::gradient_y(const Vector& y, const Vector& p) const {
  return weight(p) * base_.gradient(y);
}

bool ModifiedForce::saturated(const Vector& p) const { return weight(p) == 0.0; }

double ModifiedForce::min_over_y(const Vector& p) const {
  const double w = weight(p);
  return w * base_.sampled_min() + (1.0 - w) * c0_;
}

double ModifiedForce::max_over_y(const Vector& p) const {
  const double w = weight(p);
  return w * base_.sampled_max() + (1.0 - w) * c0_;
}

ModifiedForce build_modified_force(const ForcingField& force,
                                   const std::optional<CoercivityCertificate>& certificate,
                                   double M) {
  if (!certificate) {
    throw Error(ErrorCode::precondition, "modified force requires a coercivity certificate");
  }
  if (certificate->force_label != force.label()) {
    throw Error(ErrorCode::precondition,
                "coercivity certificate was issued for '" + certificate->force_label +
                    "', not '" + force.label() + "'");
  }
  return ModifiedForce(force, M, certificate->delta);
}

}  // namespace homog
