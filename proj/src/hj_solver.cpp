#include "homog/hj_solver.hpp"

#include "homog/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace homog {

namespace {

// Lax-Friedrichs rate on a raw field; padded is scratch.
HJStepStats lf_rate(const GridSpec& spec, std::span<const double> u, const EffectiveHamiltonian& H,
                    const std::vector<double>& theta, std::vector<double>& padded,
                    std::vector<double>& rate) {
  fill_padded(spec, u, padded);
  rate.resize(u.size());
  HJStepStats st;
  const int N = spec.points;
  const int P = N + 2;
  const double inv_h = 1.0 / spec.h;
  double p[2];
  double max_g2 = 0.0, max_rate = 0.0;
  if (spec.n == 1) {
    const double half_theta = 0.5 * theta[0];
    for (int i = 0; i < N; ++i) {
      const double um = padded[i], uc = padded[i + 1], up = padded[i + 2];
      const double dp = (up - uc) * inv_h, dm = (uc - um) * inv_h;
      p[0] = 0.5 * (dp + dm);
      bool clamped = false;
      const double r = -(H(p, &clamped) - half_theta * (dp - dm));
      st.clamped += clamped;
      rate[i] = r;
      max_g2 = std::max(max_g2, p[0] * p[0]);
      max_rate = std::max(max_rate, std::abs(r));
    }
  } else {
    const double h0 = 0.5 * theta[0], h1 = 0.5 * theta[1];
    for (int j = 0; j < N; ++j) {
      for (int i = 0; i < N; ++i) {
        const std::size_t c = static_cast<std::size_t>(j + 1) * P + (i + 1);
        const double uc = padded[c];
        const double dp0 = (padded[c + 1] - uc) * inv_h, dm0 = (uc - padded[c - 1]) * inv_h;
        const double dp1 = (padded[c + P] - uc) * inv_h, dm1 = (uc - padded[c - P]) * inv_h;
        p[0] = 0.5 * (dp0 + dm0);
        p[1] = 0.5 * (dp1 + dm1);
        bool clamped = false;
        const double r = -(H(p, &clamped) - h0 * (dp0 - dm0) - h1 * (dp1 - dm1));
        st.clamped += clamped;
        rate[i + static_cast<std::size_t>(N) * j] = r;
        max_g2 = std::max(max_g2, p[0] * p[0] + p[1] * p[1]);
        max_rate = std::max(max_rate, std::abs(r));
      }
    }
  }
  st.queries = u.size();
  st.lipschitz = std::sqrt(max_g2);
  st.sup_rate = max_rate;
  return st;
}

void check_theta(const EffectiveHamiltonian& H, const std::vector<double>& theta) {
  if (static_cast<int>(theta.size()) != H.dimension()) {
    throw Error(ErrorCode::invalid_argument, "need one dissipation coefficient per axis");
  }
  for (int a = 0; a < H.dimension(); ++a) {
    if (!(theta[a] >= H.measured_slope(a))) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "dissipation theta_%d = %g is below the measured slope %g", a + 1,
                    theta[a], H.measured_slope(a));
      throw Error(ErrorCode::monotonicity_violation, buf);
    }
  }
}

double lf_cfl(const GridSpec& spec, const std::vector<double>& theta, double safety) {
  const double tmax = *std::max_element(theta.begin(), theta.end());
  return tmax > 0.0 ? safety * spec.h / (spec.n * tmax) : std::numeric_limits<double>::infinity();
}

}  // namespace

EffectiveHamiltonian EffectiveHamiltonian::from_table(EffectiveHamiltonianTable table) {
  EffectiveHamiltonian H;
  H.n_ = table.dimension();
  for (int a = 0; a < H.n_; ++a) H.slopes_.push_back(table.slope_bound(a));
  H.label_ = "table:" + table.force_label();
  H.table_ = std::make_shared<const EffectiveHamiltonianTable>(std::move(table));
  return H;
}

EffectiveHamiltonian EffectiveHamiltonian::closed_form(int n, Closure fn,
                                                       std::vector<double> slope_bounds,
                                                       std::string label) {
  if (n != 1 && n != 2) throw Error(ErrorCode::invalid_argument, "dimension must be 1 or 2");
  if (static_cast<int>(slope_bounds.size()) != n) {
    throw Error(ErrorCode::invalid_argument, "need one slope bound per axis");
  }
  EffectiveHamiltonian H;
  H.n_ = n;
  H.fn_ = std::move(fn);
  H.slopes_ = std::move(slope_bounds);
  H.label_ = std::move(label);
  return H;
}

EffectiveHamiltonian EffectiveHamiltonian::constant_force(int n, double c0) {
  auto fn = [n, c0](const double* p) {
    double s = 1.0;
    for (int a = 0; a < n; ++a) s += p[a] * p[a];
    return -c0 * std::sqrt(s);
  };
  char buf[64];
  std::snprintf(buf, sizeof buf, "closed:-%g<p>", c0);
  return closed_form(n, fn, std::vector<double>(n, std::abs(c0)), buf);
}

std::optional<double> EffectiveHamiltonian::coverage() const {
  if (table_) return table_->coverage();
  return std::nullopt;
}

double EffectiveHamiltonian::operator()(const double* p, bool* clamped) const {
  if (table_) return table_->value(p, clamped);
  if (clamped) *clamped = false;
  return fn_(p);
}

std::vector<double> EffectiveHamiltonian::default_theta() const {
  std::vector<double> t(slopes_);
  for (double& x : t) x *= 1.2;
  return t;
}

GridFunction lax_friedrichs_step(const GridFunction& u, double dt, const EffectiveHamiltonian& H,
                                 const std::vector<double>& theta, HJStepStats* stats) {
  const auto& spec = u.spec();
  if (spec.n != H.dimension()) throw Error(ErrorCode::invalid_argument, "grid and Hamiltonian dimensions disagree");
  check_theta(H, theta);
  const double limit = lf_cfl(spec, theta, 0.9);
  if (!(dt > 0.0) || dt > limit * (1.0 + 1e-12)) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "time step %g violates the Lax-Friedrichs limit %g", dt, limit);
    throw Error(ErrorCode::rejected_step, buf);
  }
  std::vector<double> padded, rate;
  const HJStepStats st = lf_rate(spec, u.values(), H, theta, padded, rate);
  std::vector<double> next(u.values());
  for (std::size_t i = 0; i < next.size(); ++i) next[i] += dt * rate[i];
  for (double x : next) {
    if (!std::isfinite(x)) throw Error(ErrorCode::divergence, "non-finite value after effective step");
  }
  if (stats) *stats = st;
  return GridFunction(spec, std::move(next), u.units());
}

EffectiveTrace solve_effective(const EffectiveProblem& pb) {
  const auto& spec = pb.initial.spec();
  const auto& H = pb.hamiltonian;
  if (spec.n != H.dimension()) throw Error(ErrorCode::invalid_argument, "grid and Hamiltonian dimensions disagree");
  if (!(pb.horizon > 0.0) || !std::isfinite(pb.horizon)) {
    throw Error(ErrorCode::invalid_argument, "horizon must be positive");
  }
  if (pb.monitor_stride == 0) throw Error(ErrorCode::invalid_argument, "monitor stride must be >= 1");
  if (const auto P = H.coverage(); P && *P < pb.lipschitz_bound + 1.0) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "table coverage %g is below N0 + 1 = %g", *P, pb.lipschitz_bound + 1.0);
    throw Error(ErrorCode::precondition, buf);
  }
  const double L0 = discrete_lipschitz(pb.initial);
  if (L0 > pb.lipschitz_bound + spec.h * (pb.lipschitz_bound + 1.0)) {
    throw Error(ErrorCode::invalid_argument, "initial data Lipschitz constant " + std::to_string(L0) +
                                                 " exceeds the bound " + std::to_string(pb.lipschitz_bound));
  }
  const std::vector<double> theta = pb.theta.value_or(H.default_theta());
  check_theta(H, theta);
  const double limit = lf_cfl(spec, theta, pb.cfl_safety);
  double dt0 = limit;
  if (pb.fixed_dt) {
    if (*pb.fixed_dt > lf_cfl(spec, theta, 0.9) * (1.0 + 1e-12) || !(*pb.fixed_dt > 0.0)) {
      throw Error(ErrorCode::rejected_step, "fixed time step exceeds the Lax-Friedrichs limit");
    }
    dt0 = *pb.fixed_dt;
  }
  if (!std::isfinite(dt0)) dt0 = pb.horizon;

  std::vector<double> targets;
  for (double t : pb.snapshot_times) {
    if (t > 0 && t < pb.horizon) targets.push_back(t);
  }
  targets.push_back(pb.horizon);
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

  EffectiveTrace trace;
  trace.theta = theta;
  trace.dt = dt0;
  trace.snapshots.push_back({0.0, 0, pb.initial});
  std::vector<double> u(pb.initial.values()), padded, rate;
  double t = 0.0;
  std::size_t k = 0, target_idx = 0;
  auto& sum = trace.summary;
  while (target_idx < targets.size()) {
    const HJStepStats st = lf_rate(spec, u, H, theta, padded, rate);
    trace.queries += st.queries;
    trace.clamped_queries += st.clamped;
    sum.max_lipschitz = std::max(sum.max_lipschitz, st.lipschitz);
    if (k % pb.monitor_stride == 0) trace.monitors.push_back({t, st.sup_rate, st.lipschitz, 0.0});
    double dt = dt0;
    const double target = targets[target_idx];
    bool hit = false;
    if (t + dt >= target - 1e-13 * std::max(1.0, target)) {
      dt = target - t;
      hit = true;
    }
    bool finite = true;
    for (std::size_t i = 0; i < u.size(); ++i) {
      u[i] += dt * rate[i];
      finite = finite && std::isfinite(u[i]);
    }
    t = hit ? target : t + dt;
    ++k;
    if (!finite) {
      throw DivergenceError(ErrorCode::divergence, "non-finite values at t = " + std::to_string(t), t);
    }
    if (hit) {
      trace.snapshots.push_back({t, k, GridFunction(spec, u, pb.initial.units())});
      ++target_idx;
    }
  }
  trace.steps = k;
  sum.lipschitz_at_tau = trace.monitors.empty() ? 0.0 : trace.monitors.front().lipschitz;
  if (trace.clamped_queries * 1000 > trace.queries) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "%zu of %zu table queries left the coverage [-%g, %g]; rebuild with a larger P",
                  trace.clamped_queries, trace.queries, *H.coverage(), *H.coverage());
    throw Error(ErrorCode::coverage, buf);
  }
  return trace;
}

}  // namespace homog
