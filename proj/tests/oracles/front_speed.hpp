#pragma once

#include "homog/parabolic.hpp"

namespace homog::oracle {

// Long-time speed of the periodic flow started flat (optionally tilted by p):
// difference of grid means between T/2 and T, divided by T/2.
inline double front_speed(const ForcingField& force, const CoercivityCertificate& cert,
                          int points, double T, const Vector* tilt = nullptr) {
  ParabolicProblem pb;
  pb.force = force;
  pb.certificate = cert;
  pb.initial = GridFunction::constant(GridSpec::torus(force.dimension(), points), 0.0);
  pb.horizon = T;
  pb.snapshot_times = {0.5 * T};
  pb.monitor_stride = 1000;
  if (tilt) {
    pb.tilt = *tilt;
    pb.lipschitz_bound = tilt->norm();
  }
  const auto trace = evolve(pb);
  auto mean = [](const GridFunction& f) {
    double s = 0.0;
    for (double v : f.values()) s += v;
    return s / static_cast<double>(f.size());
  };
  return (mean(trace.final().field) - mean(trace.at_time(0.5 * T).field)) / (0.5 * T);
}

}  // namespace homog::oracle
