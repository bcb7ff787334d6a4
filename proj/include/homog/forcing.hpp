#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

namespace homog {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class ForceFamily { constant, sinusoid, trig, custom };

const char* to_string(ForceFamily family);
ForceFamily parse_force_family(const std::string& name);

enum class ForceSign { positive, negative, indefinite };

// Configuration-level description of a forcing field.
//
//   constant: {c0}
//   sinusoid: {mean, amplitude[, k_1, ..., k_n]}  c = mean + amplitude sin(2 pi k.y)
//   trig:     {mean, then groups of (k_1..k_n, a, b)}
//             c = mean + sum a cos(2 pi k.y) + b sin(2 pi k.y)
struct ForceDescriptor {
  ForceFamily family = ForceFamily::constant;
  std::vector<double> coefficients{1.0};
  int n = 1;

  // Compact form without commas, e.g. "sinusoid[1;0.5]".
  std::string to_string() const;
  static ForceDescriptor parse(const std::string& text, int n);
  bool operator==(const ForceDescriptor&) const = default;
};

struct TrigMode {
  std::vector<int> k;
  double cos_coef = 0.0;
  double sin_coef = 0.0;
};

// Z^n-periodic force c(y) with analytic derivatives for the built-in
// families. Custom closures fall back to central differences.
class ForcingField {
 public:
  using Closure = std::function<double(const Vector&)>;

  static ForcingField constant(int n, double c0);
  static ForcingField sinusoid(int n, double mean, double amplitude,
                               std::vector<int> k = {});
  static ForcingField trig(int n, double mean, std::vector<TrigMode> modes);
  static ForcingField custom(int n, Closure fn, double c2_norm_bound,
                             std::string label = "custom");
  static ForcingField from_descriptor(const ForceDescriptor& d);
  static ForcingField zero(int n) { return constant(n, 0.0); }

  int dimension() const { return n_; }
  ForceFamily family() const { return family_; }
  const ForceDescriptor& descriptor() const { return descriptor_; }
  std::string label() const;

  double operator()(const Vector& y) const { return value(y); }
  double value(const Vector& y) const;
  Vector gradient(const Vector& y) const;
  Matrix hessian(const Vector& y) const;

  double c2_norm_bound() const { return c2_bound_; }
  // Separate bounds on sup|c|, sup|Dc|, sup|D^2c|.
  double value_bound() const { return b0_; }
  double gradient_bound() const { return b1_; }
  double hessian_bound() const { return b2_; }
  ForceSign sign() const { return sign_; }
  // Extremes over a fine sample grid of the unit cell.
  double sampled_min() const { return min_; }
  double sampled_max() const { return max_; }
  bool is_constant() const { return family_ == ForceFamily::constant; }
  bool has_analytic_derivatives() const { return family_ != ForceFamily::custom; }

 private:
  ForcingField() = default;
  void finalize();

  int n_ = 1;
  ForceFamily family_ = ForceFamily::constant;
  ForceDescriptor descriptor_;
  double mean_ = 0.0;
  std::vector<TrigMode> modes_;
  Closure closure_;
  std::string label_;
  double c2_bound_ = 0.0;
  double b0_ = 0.0;
  double b1_ = 0.0;
  double b2_ = 0.0;
  ForceSign sign_ = ForceSign::indefinite;
  double min_ = 0.0;
  double max_ = 0.0;
};

}  // namespace homog
