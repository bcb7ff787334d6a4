#pragma once

#include <algorithm>
#include <cmath>

namespace homog::oracle {

// u_t - sqrt(1 + u_x^2) = 0, u(x, 0) = -|x|. With v = -u this is
// v_t + sqrt(1 + v_x^2) = 0, v0 = |x|, whose Hopf-Lax formula reads
// v(x, t) = min_{|x - y| <= t} |y| - sqrt(t^2 - (x - y)^2).
// Minimized by a dense scan refined with golden-section search.
inline double peak_rarefaction(double x, double t) {
  auto f = [&](double y) {
    const double d = x - y;
    return std::abs(y) - std::sqrt(std::max(0.0, t * t - d * d));
  };
  const int M = 4000;
  double best_y = x, best = f(x);
  for (int k = 0; k <= M; ++k) {
    const double y = x - t + 2.0 * t * k / M;
    if (const double v = f(y); v < best) {
      best = v;
      best_y = y;
    }
  }
  double a = std::max(x - t, best_y - 2.0 * t / M), b = std::min(x + t, best_y + 2.0 * t / M);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 200; ++it) {
    const double c = b - g * (b - a), d = a + g * (b - a);
    if (f(c) < f(d)) b = d; else a = c;
  }
  best = std::min({best, f(0.5 * (a + b)), f(0.0 < x - t || 0.0 > x + t ? x : 0.0)});
  return -best;
}

// Closed form of the same solution: sqrt(t^2 - x^2) inside the fan
// |x| < t / sqrt(2), -|x| + sqrt(2) t outside.
inline double peak_rarefaction_closed(double x, double t) {
  const double ax = std::abs(x);
  return ax < t / std::sqrt(2.0) ? std::sqrt(t * t - x * x) : -ax + std::sqrt(2.0) * t;
}

}  // namespace homog::oracle
