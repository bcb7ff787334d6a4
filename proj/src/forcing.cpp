#include "homog/forcing.hpp"

#include "homog/error.hpp"
#include "homog/format.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace homog {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_dimension(int n) {
  if (n < 1 || n > 2) {
    throw Error(ErrorCode::invalid_argument,
                "forcing field dimension must be 1 or 2, got " + std::to_string(n));
  }
}

Vector reduce(const Vector& y) {
  Vector r(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) r[i] = y[i] - std::floor(y[i]);
  return r;
}

std::string format_number(double x) { return format_double(x); }

}  // namespace

const char* to_string(ForceFamily family) {
  switch (family) {
    case ForceFamily::constant: return "constant";
    case ForceFamily::sinusoid: return "sinusoid";
    case ForceFamily::trig: return "trig";
    case ForceFamily::custom: return "custom";
  }
  return "unknown";
}

ForceFamily parse_force_family(const std::string& name) {
  if (name == "constant") return ForceFamily::constant;
  if (name == "sinusoid") return ForceFamily::sinusoid;
  if (name == "trig") return ForceFamily::trig;
  throw Error(ErrorCode::parse, "unknown force family '" + name + "'");
}

std::string ForceDescriptor::to_string() const {
  std::string out = homog::to_string(family);
  out += '[';
  for (std::size_t i = 0; i < coefficients.size(); ++i) {
    if (i) out += ';';
    out += format_number(coefficients[i]);
  }
  out += ']';
  return out;
}

ForceDescriptor ForceDescriptor::parse(const std::string& text, int n) {
  auto open = text.find('[');
  auto close = text.rfind(']');
  if (open == std::string::npos || close == std::string::npos || close < open) {
    throw Error(ErrorCode::parse, "malformed force descriptor '" + text + "'");
  }
  ForceDescriptor d;
  d.family = parse_force_family(text.substr(0, open));
  d.n = n;
  d.coefficients.clear();
  std::stringstream ss(text.substr(open + 1, close - open - 1));
  std::string item;
  while (std::getline(ss, item, ';')) {
    try {
      d.coefficients.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw Error(ErrorCode::parse, "bad coefficient '" + item + "' in force descriptor");
    }
  }
  return d;
}

ForcingField ForcingField::constant(int n, double c0) {
  require_dimension(n);
  ForcingField f;
  f.n_ = n;
  f.family_ = ForceFamily::constant;
  f.mean_ = c0;
  f.descriptor_ = {ForceFamily::constant, {c0}, n};
  f.finalize();
  return f;
}

ForcingField ForcingField::sinusoid(int n, double mean, double amplitude,
                                    std::vector<int> k) {
  require_dimension(n);
  if (k.empty()) {
    k.assign(static_cast<std::size_t>(n), 0);
    k[0] = 1;
  }
  if (static_cast<int>(k.size()) != n) {
    throw Error(ErrorCode::invalid_argument, "sinusoid wave vector has wrong length");
  }
  ForcingField f;
  f.n_ = n;
  f.family_ = ForceFamily::sinusoid;
  f.mean_ = mean;
  f.modes_.push_back({k, 0.0, amplitude});
  std::vector<double> coeffs{mean, amplitude};
  bool default_k = k[0] == 1 && std::all_of(k.begin() + 1, k.end(), [](int v) { return v == 0; });
  if (!default_k) {
    for (int ki : k) coeffs.push_back(ki);
  }
  f.descriptor_ = {ForceFamily::sinusoid, coeffs, n};
  f.finalize();
  return f;
}

ForcingField ForcingField::trig(int n, double mean, std::vector<TrigMode> modes) {
  require_dimension(n);
  ForcingField f;
  f.n_ = n;
  f.family_ = ForceFamily::trig;
  f.mean_ = mean;
  std::vector<double> coeffs{mean};
  for (const auto& m : modes) {
    if (static_cast<int>(m.k.size()) != n) {
      throw Error(ErrorCode::invalid_argument, "trig mode has wrong wave-vector length");
    }
    for (int ki : m.k) coeffs.push_back(ki);
    coeffs.push_back(m.cos_coef);
    coeffs.push_back(m.sin_coef);
  }
  f.modes_ = std::move(modes);
  f.descriptor_ = {ForceFamily::trig, coeffs, n};
  f.finalize();
  return f;
}

ForcingField ForcingField::custom(int n, Closure fn, double c2_norm_bound,
                                  std::string label) {
  require_dimension(n);
  if (!fn) throw Error(ErrorCode::invalid_argument, "custom force needs a closure");
  ForcingField f;
  f.n_ = n;
  f.family_ = ForceFamily::custom;
  f.closure_ = std::move(fn);
  f.label_ = std::move(label);
  f.descriptor_ = {ForceFamily::custom, {}, n};
  f.finalize();
  f.c2_bound_ = c2_norm_bound;
  f.b0_ = f.b1_ = f.b2_ = c2_norm_bound;
  return f;
}

ForcingField ForcingField::from_descriptor(const ForceDescriptor& d) {
  const auto& c = d.coefficients;
  switch (d.family) {
    case ForceFamily::constant:
      if (c.size() != 1) {
        throw Error(ErrorCode::invalid_argument, "constant force takes one coefficient");
      }
      return constant(d.n, c[0]);
    case ForceFamily::sinusoid: {
      if (c.size() != 2 && c.size() != 2 + static_cast<std::size_t>(d.n)) {
        throw Error(ErrorCode::invalid_argument,
                    "sinusoid force takes {mean, amplitude[, k_1..k_n]}");
      }
      std::vector<int> k;
      for (std::size_t i = 2; i < c.size(); ++i) k.push_back(static_cast<int>(std::lround(c[i])));
      return sinusoid(d.n, c[0], c[1], k);
    }
    case ForceFamily::trig: {
      const std::size_t group = static_cast<std::size_t>(d.n) + 2;
      if (c.empty() || (c.size() - 1) % group != 0) {
        throw Error(ErrorCode::invalid_argument,
                    "trig force takes {mean, (k_1..k_n, a, b)...}");
      }
      std::vector<TrigMode> modes;
      for (std::size_t i = 1; i < c.size(); i += group) {
        TrigMode m;
        for (int j = 0; j < d.n; ++j) m.k.push_back(static_cast<int>(std::lround(c[i + j])));
        m.cos_coef = c[i + d.n];
        m.sin_coef = c[i + d.n + 1];
        modes.push_back(std::move(m));
      }
      return trig(d.n, c[0], std::move(modes));
    }
    case ForceFamily::custom:
      break;
  }
  throw Error(ErrorCode::invalid_argument, "custom forces cannot be built from a descriptor");
}

std::string ForcingField::label() const {
  return family_ == ForceFamily::custom ? label_ : descriptor_.to_string();
}

double ForcingField::value(const Vector& y) const {
  if (y.size() != n_) throw Error(ErrorCode::invalid_argument, "force argument has wrong dimension");
  const Vector r = reduce(y);
  if (family_ == ForceFamily::custom) return closure_(r);
  double v = mean_;
  for (const auto& m : modes_) {
    double phase = 0.0;
    for (int i = 0; i < n_; ++i) phase += m.k[i] * r[i];
    phase *= kTwoPi;
    v += m.cos_coef * std::cos(phase) + m.sin_coef * std::sin(phase);
  }
  return v;
}

Vector ForcingField::gradient(const Vector& y) const {
  if (y.size() != n_) throw Error(ErrorCode::invalid_argument, "force argument has wrong dimension");
  Vector g = Vector::Zero(n_);
  if (family_ == ForceFamily::custom) {
    const double h = 1e-5;
    for (int i = 0; i < n_; ++i) {
      Vector yp = y, ym = y;
      yp[i] += h;
      ym[i] -= h;
      g[i] = (value(yp) - value(ym)) / (2 * h);
    }
    return g;
  }
  const Vector r = reduce(y);
  for (const auto& m : modes_) {
    double phase = 0.0;
    for (int i = 0; i < n_; ++i) phase += m.k[i] * r[i];
    phase *= kTwoPi;
    const double d = -m.cos_coef * std::sin(phase) + m.sin_coef * std::cos(phase);
    for (int i = 0; i < n_; ++i) g[i] += kTwoPi * m.k[i] * d;
  }
  return g;
}

Matrix ForcingField::hessian(const Vector& y) const {
  if (y.size() != n_) throw Error(ErrorCode::invalid_argument, "force argument has wrong dimension");
  Matrix hm = Matrix::Zero(n_, n_);
  if (family_ == ForceFamily::custom) {
    const double h = 1e-4;
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) {
        Vector pp = y, pm = y, mp = y, mm = y;
        pp[i] += h; pp[j] += h;
        pm[i] += h; pm[j] -= h;
        mp[i] -= h; mp[j] += h;
        mm[i] -= h; mm[j] -= h;
        hm(i, j) = (value(pp) - value(pm) - value(mp) + value(mm)) / (4 * h * h);
      }
    }
    return 0.5 * (hm + hm.transpose());
  }
  const Vector r = reduce(y);
  for (const auto& m : modes_) {
    double phase = 0.0;
    for (int i = 0; i < n_; ++i) phase += m.k[i] * r[i];
    phase *= kTwoPi;
    const double d2 = -(m.cos_coef * std::cos(phase) + m.sin_coef * std::sin(phase));
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) hm(i, j) += kTwoPi * kTwoPi * m.k[i] * m.k[j] * d2;
    }
  }
  return hm;
}

void ForcingField::finalize() {
  // Fine sampling of the unit cell for the extremes.
  const int per_axis = n_ == 1 ? 4096 : 256;
  const int total = n_ == 1 ? per_axis : per_axis * per_axis;
  min_ = std::numeric_limits<double>::infinity();
  max_ = -min_;
  Vector y(n_);
  for (int idx = 0; idx < total; ++idx) {
    y[0] = static_cast<double>(idx % per_axis) / per_axis;
    if (n_ == 2) y[1] = static_cast<double>(idx / per_axis) / per_axis;
    const double v = value(y);
    min_ = std::min(min_, v);
    max_ = std::max(max_, v);
  }
  if (min_ > 0) {
    sign_ = ForceSign::positive;
  } else if (max_ < 0) {
    sign_ = ForceSign::negative;
  } else {
    sign_ = ForceSign::indefinite;
  }
  b0_ = std::abs(mean_);
  b1_ = 0.0;
  b2_ = 0.0;
  for (const auto& m : modes_) {
    double kn = 0.0;
    for (int ki : m.k) kn += double(ki) * ki;
    const double w = kTwoPi * std::sqrt(kn);
    const double amp = std::abs(m.cos_coef) + std::abs(m.sin_coef);
    b0_ += amp;
    b1_ += amp * w;
    b2_ += amp * w * w;
  }
  c2_bound_ = b0_ + b1_ + b2_;
}

}  // namespace homog
