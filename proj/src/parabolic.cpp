#include "homog/parabolic.hpp"

#include "homog/error.hpp"
#include "homog/format.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

namespace homog {

namespace {

void validate_settings(const GridSpec& spec, const FlowSettings& s) {
  if (!(s.diffusion > 0) || !(s.force_scale > 0)) {
    throw Error(ErrorCode::invalid_argument, "diffusion and force scale must be positive");
  }
  if (s.tilt) {
    if (spec.topology != Topology::torus) {
      throw Error(ErrorCode::invalid_argument, "a tilt is only meaningful on the torus");
    }
    if (s.tilt->size() != spec.n) throw Error(ErrorCode::invalid_argument, "tilt has wrong dimension");
  }
}

bool is_zero_force(const ForcingField& f) {
  return f.is_constant() && f.sampled_min() == 0.0 && f.sampled_max() == 0.0;
}

}  // namespace

FlowOperator::FlowOperator(const ForcingField& force, const GridSpec& spec, FlowSettings settings)
    : spec_(spec), settings_(std::move(settings)) {
  if (force.dimension() != spec.n) {
    throw Error(ErrorCode::invalid_argument, "force and grid dimensions disagree");
  }
  validate_settings(spec_, settings_);
  force_.resize(spec_.size());
  for (std::size_t i = 0; i < force_.size(); ++i) {
    force_[i] = force.value(spec_.position(i) * settings_.force_scale);
    max_abs_force_ = std::max(max_abs_force_, std::abs(force_[i]));
  }
}

RateStats FlowOperator::rate(const GridFunction& w, std::vector<double>& out) const {
  if (!w.spec().same_layout(spec_)) {
    throw Error(ErrorCode::invalid_argument, "field grid does not match the flow operator");
  }
  return rate(std::span<const double>(w.values()), out);
}

RateStats FlowOperator::rate(std::span<const double> values, std::vector<double>& out) const {
  if (values.size() != spec_.size()) {
    throw Error(ErrorCode::invalid_argument, "field size does not match the flow operator");
  }
  fill_padded(spec_, values, padded_);
  out.resize(spec_.size());
  const int N = spec_.points;
  const double inv2h = 0.5 / spec_.h;
  const double invh2 = 1.0 / (spec_.h * spec_.h);
  const double eps = settings_.diffusion;
  const double* pad = padded_.data();
  double max_g2 = 0.0, max_hess = 0.0, max_rate = 0.0;

  if (spec_.n == 1) {
    const double p0 = settings_.tilt ? (*settings_.tilt)[0] : 0.0;
    for (int i = 0; i < N; ++i) {
      const double wm = pad[i], w0 = pad[i + 1], wp = pad[i + 2];
      const double g = p0 + (wp - wm) * inv2h;
      const double d2 = (wp - 2.0 * w0 + wm) * invh2;
      const double q = 1.0 + g * g;
      const double r = eps * d2 / q + force_[i] * std::sqrt(q);
      out[i] = r;
      max_g2 = std::max(max_g2, g * g);
      max_hess = std::max(max_hess, std::abs(d2));
      max_rate = std::max(max_rate, std::abs(r));
    }
  } else {
    const int P = N + 2;
    const double p0 = settings_.tilt ? (*settings_.tilt)[0] : 0.0;
    const double p1 = settings_.tilt ? (*settings_.tilt)[1] : 0.0;
    for (int j = 0; j < N; ++j) {
      const double* rm = pad + static_cast<std::size_t>(j) * P;
      const double* r0 = rm + P;
      const double* rp = r0 + P;
      for (int i = 0; i < N; ++i) {
        const int c = i + 1;
        const double g0 = p0 + (r0[c + 1] - r0[c - 1]) * inv2h;
        const double g1 = p1 + (rp[c] - rm[c]) * inv2h;
        const double x00 = (r0[c + 1] - 2.0 * r0[c] + r0[c - 1]) * invh2;
        const double x11 = (rp[c] - 2.0 * r0[c] + rm[c]) * invh2;
        const double x01 = (rp[c + 1] - rm[c + 1] - rp[c - 1] + rm[c - 1]) * 0.25 * invh2;
        const double q = 1.0 + g0 * g0 + g1 * g1;
        const double tr = x00 + x11 - (g0 * g0 * x00 + 2.0 * g0 * g1 * x01 + g1 * g1 * x11) / q;
        const std::size_t k = spec_.flat(i, j);
        const double r = eps * tr + force_[k] * std::sqrt(q);
        out[k] = r;
        max_g2 = std::max(max_g2, q - 1.0);
        max_hess = std::max(max_hess, std::sqrt(x00 * x00 + x11 * x11 + 2.0 * x01 * x01));
        max_rate = std::max(max_rate, std::abs(r));
      }
    }
  }
  RateStats stats;
  stats.lipschitz = std::sqrt(max_g2);
  stats.max_hessian_norm = max_hess;
  stats.sup_rate = max_rate;
  stats.finite = std::isfinite(max_rate) && std::isfinite(max_g2) && std::isfinite(max_hess);
  return stats;
}

double FlowOperator::cfl_limit(double lipschitz) const {
  const double h = spec_.h;
  const double diffusion_cap = settings_.cfl_safety * h * h / (2.0 * spec_.n * settings_.diffusion);
  const double transport_cap = h / (max_abs_force_ * std::sqrt(1.0 + lipschitz * lipschitz) + 1.0);
  return std::min(diffusion_cap, transport_cap);
}

GridFunction step(const GridFunction& w, double dt, const ForcingField& force,
                  const FlowSettings& settings) {
  FlowOperator op(force, w.spec(), settings);
  std::vector<double> r;
  const RateStats stats = op.rate(w, r);
  if (!stats.finite) throw DivergenceError(ErrorCode::divergence, "non-finite rate", 0.0);
  const double limit = op.cfl_limit(stats.lipschitz);
  if (!(dt > 0) || dt > limit * (1.0 + 1e-12)) {
    throw Error(ErrorCode::rejected_step, "time step " + std::to_string(dt) +
                                              " exceeds the CFL limit " + std::to_string(limit));
  }
  std::vector<double> next(w.values());
  for (std::size_t i = 0; i < next.size(); ++i) next[i] += dt * r[i];
  for (double v : next) {
    if (!std::isfinite(v)) throw DivergenceError(ErrorCode::divergence, "non-finite field after step", dt);
  }
  return GridFunction(w.spec(), std::move(next), w.units());
}

double cfl_limit(const GridFunction& w, const ForcingField& force, const FlowSettings& settings) {
  FlowOperator op(force, w.spec(), settings);
  std::vector<double> r;
  return op.cfl_limit(op.rate(w, r).lipschitz);
}

const Snapshot& EvolutionTrace::at_time(double t) const {
  const Snapshot* best = nullptr;
  for (const auto& s : snapshots) {
    if (!best || std::abs(s.t - t) < std::abs(best->t - t)) best = &s;
  }
  if (!best || std::abs(best->t - t) > 1e-9 * std::max(1.0, std::abs(t))) {
    throw Error(ErrorCode::invalid_argument, "no snapshot recorded at t = " + std::to_string(t));
  }
  return *best;
}

EvolutionTrace evolve(const ParabolicProblem& pb) {
  const GridSpec& spec = pb.initial.spec();
  if (!(pb.horizon > 0) || !std::isfinite(pb.horizon)) {
    throw Error(ErrorCode::invalid_argument, "horizon must be positive");
  }
  if (pb.scale == ProblemScale::epsilon && !(pb.epsilon > 0 && pb.epsilon <= 1)) {
    throw Error(ErrorCode::invalid_argument, "epsilon must lie in (0, 1]");
  }
  if (!is_zero_force(pb.force) && !pb.certificate) {
    throw Error(ErrorCode::precondition, "a non-zero force needs a coercivity certificate");
  }
  if (pb.certificate && pb.certificate->force_label != pb.force.label()) {
    throw Error(ErrorCode::precondition, "coercivity certificate belongs to another force");
  }
  if (pb.monitor_stride == 0) throw Error(ErrorCode::invalid_argument, "monitor stride must be >= 1");

  FlowSettings settings;
  settings.tilt = pb.tilt;
  settings.cfl_safety = pb.cfl_safety;
  if (pb.scale == ProblemScale::epsilon) {
    settings.diffusion = pb.epsilon;
    settings.force_scale = 1.0 / pb.epsilon;
  }
  FlowOperator op(pb.force, spec, settings);

  std::vector<double> r;
  {
    const RateStats s0 = op.rate(pb.initial, r);
    const double slack = spec.h * (pb.lipschitz_bound + 1.0);
    if (s0.lipschitz > pb.lipschitz_bound + slack) {
      throw Error(ErrorCode::invalid_argument,
                  "initial data Lipschitz constant " + std::to_string(s0.lipschitz) +
                      " exceeds the bound " + std::to_string(pb.lipschitz_bound));
    }
  }

  std::vector<double> targets;
  for (double t : pb.snapshot_times) {
    if (t > 0 && t < pb.horizon) targets.push_back(t);
  }
  targets.push_back(pb.horizon);
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

  const double cap_base = std::max(pb.lipschitz_bound, pb.gradient_bound.value_or(0.0));
  // Without a configured M the floor keeps flat starts from aborting.
  const double gradient_abort = 10.0 * std::max(cap_base, 1.0);
  const double sup0 = sup_norm(pb.initial);
  const double speed = op.max_abs_force() * std::sqrt(1.0 + cap_base * cap_base) + 1.0;
  const double divergence_bound = sup0 + speed * pb.horizon + 10.0;

  EvolutionTrace trace;
  trace.snapshots.push_back({0.0, 0, pb.initial});

  std::vector<double> w(pb.initial.values());
  double t = 0.0;
  std::size_t k = 0;
  std::size_t target_idx = 0;
  bool tau_seen = false;
  double running_min_wt = std::numeric_limits<double>::infinity();
  auto& sum = trace.summary;

  while (target_idx < targets.size()) {
    const RateStats st = op.rate(std::span<const double>(w), r);
    if (!st.finite) {
      throw DivergenceError(ErrorCode::divergence, "non-finite values at t = " + std::to_string(t), t);
    }
    if (st.lipschitz > gradient_abort) {
      throw DivergenceError(ErrorCode::apriori_violation,
                            "gradient " + std::to_string(st.lipschitz) + " exceeds 10 max(N0, M) at t = " +
                                std::to_string(t),
                            t);
    }
    const double limit = op.cfl_limit(st.lipschitz);
    double dt = limit;
    if (pb.fixed_dt) {
      if (*pb.fixed_dt > limit * (1.0 + 1e-12)) {
        throw Error(ErrorCode::rejected_step, "fixed time step " + std::to_string(*pb.fixed_dt) +
                                                  " exceeds the CFL limit " + std::to_string(limit));
      }
      dt = *pb.fixed_dt;
    }
    if (k == 0) {
      trace.dt = dt;
      sum.tau = pb.tau.value_or(10.0 * dt);
    }

    // Monitors belong to the pre-step state at time t.
    sum.max_lipschitz = std::max(sum.max_lipschitz, st.lipschitz);
    if (k % pb.monitor_stride == 0) {
      trace.monitors.push_back({t, st.sup_rate, st.lipschitz, st.max_hessian_norm});
    }
    if (t >= sum.tau) {
      if (!tau_seen) {
        tau_seen = true;
        sum.lipschitz_at_tau = st.lipschitz;
        sum.sup_wt_at_tau = st.sup_rate;
      }
      sum.max_lipschitz_after_tau = std::max(sum.max_lipschitz_after_tau, st.lipschitz);
      if (running_min_wt < std::numeric_limits<double>::infinity() && running_min_wt > 0) {
        const double inc = st.sup_rate / running_min_wt - 1.0;
        if (inc > sum.worst_wt_increase) {
          sum.worst_wt_increase = inc;
          sum.worst_wt_increase_time = t;
        }
      }
      running_min_wt = std::min(running_min_wt, st.sup_rate);
    }

    const double target = targets[target_idx];
    bool hit = false;
    if (t + dt >= target - 1e-13 * std::max(1.0, target)) {
      dt = target - t;
      hit = true;
    }
    double sup = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      w[i] += dt * r[i];
      sup = std::max(sup, std::abs(w[i]));
    }
    t = hit ? target : t + dt;
    ++k;
    if (!std::isfinite(sup) || sup > divergence_bound) {
      throw DivergenceError(ErrorCode::divergence,
                            "solution left the admissible range at t = " + std::to_string(t), t);
    }
    if (hit || pb.snapshot_every_step) {
      trace.snapshots.push_back({t, k, GridFunction(spec, w, pb.initial.units())});
    }
    if (hit) ++target_idx;
  }
  trace.steps = k;
  if (!tau_seen) {
    sum.lipschitz_at_tau = trace.monitors.empty() ? 0.0 : trace.monitors.back().lipschitz;
  }
  return trace;
}

EvolutionTrace solve_epsilon_problem(const ForcingField& force, const GridFunction& u0, double eps,
                                     double T, const EpsilonOptions& opt) {
  if (!(eps > 0 && eps <= 1)) throw Error(ErrorCode::invalid_argument, "epsilon must lie in (0, 1]");
  const GridSpec& spec = u0.spec();
  if (spec.h > eps / 16.0 * (1.0 + 1e-12)) {
    throw Error(ErrorCode::resolution, "grid spacing " + std::to_string(spec.h) +
                                           " does not resolve the fast scale (need h <= eps/16 = " +
                                           std::to_string(eps / 16.0) + ")");
  }
  if (spec.topology == Topology::torus && eps != 1.0) {
    // x/eps is periodic on the unit torus only when 1/eps is an integer.
    const double inv = 1.0 / eps;
    if (std::abs(inv - std::round(inv)) > 1e-9) {
      throw Error(ErrorCode::invalid_argument, "on the torus 1/eps must be an integer");
    }
  }
  double N0 = opt.lipschitz_bound;
  if (N0 <= 0) N0 = discrete_lipschitz(u0);

  ParabolicProblem pb;
  pb.force = force;
  pb.certificate = opt.certificate;
  pb.lipschitz_bound = N0;
  pb.monitor_stride = opt.monitor_stride;
  pb.gradient_bound = opt.gradient_bound;

  if (opt.path == EpsilonPath::direct || eps == 1.0) {
    pb.initial = u0;
    pb.horizon = T;
    pb.scale = ProblemScale::epsilon;
    pb.epsilon = eps;
    pb.snapshot_times = opt.snapshot_times;
    return evolve(pb);
  }

  if (spec.topology == Topology::torus) {
    throw Error(ErrorCode::invalid_argument, "the rescaled path needs a box grid");
  }
  GridSpec wspec = GridSpec::box(spec.n, spec.points, spec.half_extent / eps, spec.extension_cap);
  std::vector<double> w0(u0.values());
  for (double& v : w0) v /= eps;
  pb.initial = GridFunction(wspec, std::move(w0), u0.units());
  pb.horizon = T / eps;
  pb.scale = ProblemScale::rescaled;
  for (double s : opt.snapshot_times) pb.snapshot_times.push_back(s / eps);
  EvolutionTrace wt = evolve(pb);

  EvolutionTrace out;
  out.dt = wt.dt * eps;
  out.steps = wt.steps;
  for (auto& s : wt.snapshots) {
    std::vector<double> u(s.field.values());
    for (double& v : u) v *= eps;
    out.snapshots.push_back({s.t * eps, s.step, GridFunction(spec, std::move(u), u0.units())});
  }
  for (const auto& m : wt.monitors) {
    out.monitors.push_back({m.t * eps, m.sup_wt, m.lipschitz, m.max_hessian_norm / eps});
  }
  out.summary = wt.summary;
  out.summary.tau *= eps;
  out.summary.worst_wt_increase_time *= eps;
  // Snap mapped times back onto the requested ones to remove rounding drift.
  for (auto& s : out.snapshots) {
    for (double req : opt.snapshot_times) {
      if (std::abs(s.t - req) <= 1e-9 * std::max(1.0, req)) s.t = req;
    }
    if (std::abs(s.t - T) <= 1e-9 * std::max(1.0, T)) s.t = T;
  }
  return out;
}

ComparisonResult comparison_check(const EvolutionTrace& low, const EvolutionTrace& high) {
  if (low.snapshots.size() != high.snapshots.size()) {
    throw Error(ErrorCode::invalid_argument, "traces have different snapshot schedules");
  }
  ComparisonResult res;
  res.worst_violation = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < low.snapshots.size(); ++s) {
    const auto& a = low.snapshots[s];
    const auto& b = high.snapshots[s];
    if (a.step != b.step || a.t != b.t || !a.field.spec().same_layout(b.field.spec())) {
      throw Error(ErrorCode::invalid_argument, "traces have mismatched time steps or grids");
    }
    const double tol = 1e-12 * static_cast<double>(std::max<std::size_t>(a.step, 1));
    for (std::size_t i = 0; i < a.field.size(); ++i) {
      const double v = a.field[i] - b.field[i] - tol;
      if (v > res.worst_violation) {
        res.worst_violation = v;
        res.worst_time = a.t;
      }
    }
  }
  res.ordered = res.worst_violation <= 0.0;
  return res;
}

AprioriEstimates estimate_apriori(const EvolutionTrace& trace, double N0, double fit_window) {
  AprioriEstimates est;
  est.N0 = N0;
  est.tau = trace.summary.tau;
  est.M_emp = trace.summary.max_lipschitz_after_tau;
  const double z0 = std::sqrt(1.0 + N0 * N0);
  double need = 0.0;  // required value of C1 + 1
  for (const auto& m : trace.monitors) {
    if (m.t <= 0.0 || m.t > fit_window) continue;
    const double z = std::sqrt(1.0 + m.lipschitz * m.lipschitz);
    if (z > z0) need = std::max(need, (1.0 - z0 / z) / (z0 * m.t));
  }
  est.C1_proxy = std::max(0.0, need - 1.0);
  est.T_star = 1.0 / ((est.C1_proxy + 1.0) * z0);
  return est;
}

double short_time_bound_violation(const EvolutionTrace& trace, const AprioriEstimates& est) {
  const double z0 = std::sqrt(1.0 + est.N0 * est.N0);
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& m : trace.monitors) {
    if (m.t > 0.5 * est.T_star) break;
    const double z = std::sqrt(1.0 + m.lipschitz * m.lipschitz);
    const double bound = z0 / (1.0 - (est.C1_proxy + 1.0) * z0 * m.t);
    worst = std::max(worst, z - bound);
  }
  return worst;
}

void export_trace(const EvolutionTrace& trace, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw Error(ErrorCode::io, "cannot create directory " + dir);
  const std::filesystem::path root(dir);
  std::ofstream index(root / "snapshots.csv");
  if (!index) throw Error(ErrorCode::io, "cannot write " + (root / "snapshots.csv").string());
  index << "index,t,step,file\n";
  for (std::size_t k = 0; k < trace.snapshots.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "snapshot_%03zu.csv", k);
    const auto& s = trace.snapshots[k];
    write_csv(s.field, (root / name).string());
    index << k << ',' << format_double(s.t) << ',' << s.step << ',' << name << '\n';
  }
  std::ofstream mon(root / "monitors.csv");
  if (!mon) throw Error(ErrorCode::io, "cannot write " + (root / "monitors.csv").string());
  mon << "t,sup_wt,lipschitz,max_hessian_norm\n";
  for (const auto& m : trace.monitors) {
    mon << format_double(m.t) << ',' << format_double(m.sup_wt) << ',' << format_double(m.lipschitz) << ','
        << format_double(m.max_hessian_norm) << '\n';
  }
  if (!index || !mon) throw Error(ErrorCode::io, "failed writing trace files in " + dir);
}

GridFunction mollified_cone(const GridSpec& spec) {
  const double h2 = spec.h * spec.h;
  return GridFunction::sample(spec, [h2](const Vector& x) { return std::sqrt(x.squaredNorm() + h2); });
}

}  // namespace homog
