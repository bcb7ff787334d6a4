#pragma once

// Self-similar expander of graph curve shortening from the cone |x|:
// w(x, t) = sqrt(t) g(x / sqrt(t)) with g'' / (1 + g'^2) = (g - eta g') / 2,
// g'(0) = 0 and g'(inf) = 1. Solved by bisection shooting on g(0).

#include <array>
#include <cmath>

namespace homog::oracle {

inline double expander_slope_at(double g0, double eta_max = 12.0, int steps = 24000) {
  using State = std::array<double, 2>;
  auto rhs = [](double eta, const State& s) {
    return State{s[1], 0.5 * (1.0 + s[1] * s[1]) * (s[0] - eta * s[1])};
  };
  State s{g0, 0.0};
  const double h = eta_max / steps;
  double eta = 0.0;
  for (int i = 0; i < steps; ++i) {
    const State k1 = rhs(eta, s);
    const State k2 = rhs(eta + h / 2, {s[0] + h / 2 * k1[0], s[1] + h / 2 * k1[1]});
    const State k3 = rhs(eta + h / 2, {s[0] + h / 2 * k2[0], s[1] + h / 2 * k2[1]});
    const State k4 = rhs(eta + h, {s[0] + h * k3[0], s[1] + h * k3[1]});
    s[0] += h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
    s[1] += h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
    eta += h;
    if (s[1] > 2.0 || s[1] < -1.0 || !std::isfinite(s[1])) break;
  }
  return s[1];
}

inline double expander_constant() {
  double lo = 0.01, hi = 3.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (expander_slope_at(mid) > 1.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace homog::oracle
