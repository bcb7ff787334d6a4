// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include "homog/cell_problem.hpp"
#include "homog/config.hpp"
#include "homog/error.hpp"
#include "homog/experiments.hpp"
#include "homog/hj_solver.hpp"
#include "homog/parabolic.hpp"
#include "oracles/expander.hpp"
#include "oracles/front_speed.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#ifndef HOMOG_CONFIG_DIR
#define HOMOG_CONFIG_DIR "configs"
#endif

using namespace homog;
namespace fs = std::filesystem;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void run(const char* id, const char* title, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!out.pass) ++failures;
  std::printf("%s %s  %s: %s [%.1f s]\n", id, out.pass ? "PASS" : "FAIL", title, out.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Every table built by the suite, checked against the range bound in AC3.
std::vector<std::pair<EffectiveHamiltonianTable, ModifiedForce>> tables;

Outcome ac1() {
  const auto f = ForcingField::constant(1, 1.0);
  const auto mf = build_modified_force(f, check_coercivity(f, 0.5, 1e-3), 2.0);
  double worst_f = 0.0, worst_v = 0.0;
  for (double p : {0.0, 0.5, -0.5, 1.0, -1.0}) {
    Vector pv(1);
    pv << p;
    const auto ev = richardson_effective_value(pv, mf, GridSpec::torus(1, 64), {1e-2, 5e-3, 2.5e-3});
    worst_f = std::max(worst_f, std::abs(ev.value + std::sqrt(1.0 + p * p)));
    worst_v = std::max(worst_v, ev.corrector.bounds.sup_v);
  }
  return {worst_f <= 1e-6 && worst_v <= 1e-6, fmt("max |Fbar + <p>| = %.2e, max sup|v| = %.2e (limit 1e-6)", worst_f, worst_v)};
}

Outcome ac2() {
  const auto f = ForcingField::sinusoid(1, 1.0, 0.5);
  const auto cert = check_coercivity(f, 0.2, 1e-3);
  const auto mf = build_modified_force(f, cert, 1.0);
  TableOptions opt;
  opt.required_coverage = 2.0;
  auto table = build_table(mf, 3.0, 41, GridSpec::torus(1, 256), {1e-2, 5e-3, 2.5e-3}, opt);
  const double p0 = 0.0;
  const double fbar = table.value(&p0);
  const double unc = table.uncertainties()[20];
  const double speed = oracle::front_speed(f, cert, 512, 20.0);
  const double tol = std::max(1e-3, unc);
  const double diff = std::abs(fbar + speed);
  tables.emplace_back(std::move(table), mf);
  return {diff <= tol, fmt("table Fbar(0) = %.9f, front speed = %.9f, |diff| = %.2e (limit %.2e)", fbar, speed, diff, tol)};
}

Outcome ac3() {
  // Two more tables: a saturating trig force and a laminated 2-d force.
  {
    const auto f = ForcingField::trig(1, 1.5, {{{1}, 0.3, 0.2}, {{2}, 0.0, 0.1}});
    const auto mf = build_modified_force(f, check_coercivity(f, 0.5, 1e-3), 1.0);
    tables.emplace_back(build_table(mf, 5.0, 41, GridSpec::torus(1, 128), {1e-2, 5e-3, 2.5e-3}), mf);
  }
  {
    const auto f = ForcingField::sinusoid(2, 2.0, 0.2, {1, 1});
    const auto mf = build_modified_force(f, check_coercivity(f, 0.5, 5e-3), 1.0);
    tables.emplace_back(build_table(mf, 2.0, 7, GridSpec::torus(2, 24), {1e-2, 5e-3, 2.5e-3}), mf);
  }
  double worst = -1e300;
  std::size_t entries = 0;
  for (const auto& [t, mf] : tables) {
    for (std::size_t k = 0; k < t.size(); ++k) {
      const auto r = effective_range(mf, t.sample_point(k));
      const double v = t.values()[k];
      worst = std::max({worst, r.first - v, v - r.second});
      ++entries;
    }
  }
  return {worst <= 1e-6, fmt("%zu entries in %zu tables, worst excursion outside the range %.2e (slack 1e-6)", entries,
                             tables.size(), worst)};
}

ConeExample cone_default(int jobs) {
  const auto c = parse_config(HOMOG_CONFIG_DIR "/cone.ini");
  return cone_experiment(cone_settings(c, jobs));
}

Outcome ac4() {
  const auto ex = cone_default(1);
  const double g0 = oracle::expander_constant();
  const double rel = std::abs(ex.expander_constant / g0 - 1.0);
  bool positive = true;
  std::string values;
  for (const auto& r : ex.records) {
    positive = positive && r.lower_bound_value > 0.0;
    values += fmt(" %.5f", r.lower_bound_value);
  }
  const double residual = ex.resolutions.back().self_similarity_residual;
  const bool pass = ex.fit.exponent >= 0.45 && ex.fit.exponent <= 0.55 && positive && rel <= 0.01 &&
                    residual <= 1e-3 && ex.resolutions.back().points == 1024;
  return {pass, fmt("exponent %.4f in [0.45, 0.55]; values%s all > 0; wbar(0,1) = %.6f vs oracle %.6f (rel %.1e, "
                    "limit 1e-2); self-similarity residual %.2e at %d points (limit 1e-3)",
                    ex.fit.exponent, values.c_str(), ex.expander_constant, g0, rel, residual,
                    ex.resolutions.back().points)};
}

RateReport forced_sweep(int jobs) {
  const auto c = parse_config(HOMOG_CONFIG_DIR "/rate_forced.ini");
  return run_rate_sweep(rate_settings(c, jobs));
}

Outcome ac5() {
  const auto r = forced_sweep(1);
  std::string errs;
  bool ok = true;
  for (const auto& rec : r.records) {
    ok = ok && rec.failure.empty();
    errs += fmt(" %.4g", rec.error);
  }
  const bool pass = ok && r.constant_spread <= 2.0 && r.monotone;
  return {pass, fmt("errors%s; max/min of err/sqrt(eps) = %.3f (limit 2); monotone %s; fitted exponent %.3f", errs.c_str(),
                    r.constant_spread, r.monotone ? "yes" : "no", r.fit ? r.fit->exponent : std::nan(""))};
}

std::vector<double> random_field(std::mt19937& rng, const GridSpec& s, double amp) {
  std::normal_distribution<double> nd(0.0, 1.0);
  double c[8];
  for (double& x : c) x = amp * nd(rng) / 4.0;
  std::vector<double> v(s.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vector x = s.position(i);
    const double y = s.n == 2 ? x[1] : 0.0;
    v[i] = c[0] * std::sin(kTwoPi * x[0]) + c[1] * std::cos(kTwoPi * x[0]) + c[2] * std::sin(2 * kTwoPi * x[0]) +
           c[3] * std::cos(3 * kTwoPi * x[0]) + c[4] * std::sin(kTwoPi * y) + c[5] * std::cos(kTwoPi * (x[0] + y)) +
           c[6] + c[7] * std::sin(2 * kTwoPi * y);
  }
  return v;
}

Outcome ac6() {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const auto f1 = ForcingField::sinusoid(1, 1.0, 0.5);
  const auto f2 = ForcingField::sinusoid(2, 2.0, 0.2, {1, 1});
  const auto c1 = check_coercivity(f1, 0.2, 1e-3);
  const auto c2 = check_coercivity(f2, 0.5, 5e-3);
  int ordered = 0;
  double worst = -1e300;
  std::size_t steps = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const bool two = trial % 4 == 3;
    const auto s = two ? GridSpec::torus(2, 32) : GridSpec::torus(1, 128);
    const auto& f = two ? f2 : f1;
    auto lo = random_field(rng, s, 0.3);
    // Non-negative gap that touches zero at one point.
    const double x0 = U(rng), gap = 0.5 * U(rng);
    std::vector<double> hi(lo);
    for (std::size_t i = 0; i < hi.size(); ++i) hi[i] += gap * (1.0 - std::cos(kTwoPi * (s.position(i)[0] - x0))) / 2.0;
    const GridFunction l(s, lo), h(s, hi);
    const double dt = 0.5 * std::min(cfl_limit(l, f), cfl_limit(h, f));
    auto go = [&](const GridFunction& w0) {
      ParabolicProblem pb;
      pb.force = f;
      pb.certificate = two ? c2 : c1;
      pb.initial = w0;
      pb.lipschitz_bound = discrete_lipschitz(w0) + 0.5;
      pb.horizon = 0.02;
      pb.fixed_dt = dt;
      pb.snapshot_every_step = true;
      return evolve(pb);
    };
    const auto a = go(l), b = go(h);
    const auto res = comparison_check(a, b);
    ordered += res.ordered;
    worst = std::max(worst, res.worst_violation);
    steps += a.steps;
  }
  return {ordered == 100, fmt("%d of 100 pairs ordered at every step (%zu steps in total), worst low - high - tol = %.2e",
                              ordered, steps, worst)};
}

Outcome ac7() {
  const auto c = parse_config(HOMOG_CONFIG_DIR "/monitors.ini");
  const auto res = apriori_monitor_suite(monitor_settings(c));
  const MonitorCheck* wt = nullptr;
  const MonitorCheck* gh = nullptr;
  for (const auto& ch : res.checks) {
    if (ch.name == "time_derivative") wt = &ch;
    if (ch.name == "gradient_horizon") gh = &ch;
  }
  const bool pass = wt && gh && wt->passed && gh->passed && c.horizon == 2.0;
  std::string all;
  for (const auto& ch : res.checks) all += fmt(" %s=%s", ch.name.c_str(), ch.passed ? "ok" : "violated");
  return {pass, fmt("sup|w_t| worst relative increase after tau %.2e (limit 1e-3); M_emp %.6f at T=2 vs %.6f at T=4 "
                    "(change %.2e, limit 5e-2); checks:%s",
                    wt ? wt->value : -1.0, res.estimates.M_emp, res.doubled.M_emp, gh ? gh->value : -1.0, all.c_str())};
}

double peak_exact(double x, double t) {
  const double a = std::abs(x);
  if (a < t / std::sqrt(2.0)) return std::sqrt(t * t - x * x);
  return -a + std::sqrt(2.0) * t;
}

// {sup, L1} errors over |x| <= 1 of the effective solver for -<p> started
// from the exact solution at t0.
std::pair<double, double> lf_error(int points, double t0, double T) {
  const auto s = GridSpec::box(1, points, 2.0, 2.0);
  EffectiveProblem pb;
  pb.hamiltonian = EffectiveHamiltonian::constant_force(1, 1.0);
  pb.initial = GridFunction::sample(s, [t0](const Vector& x) { return peak_exact(x[0], t0); });
  pb.lipschitz_bound = 1.0;
  pb.horizon = T - t0;
  const auto u = solve_effective(pb).final().field;
  double sup = 0.0, l1 = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double x = s.position(k)[0];
    if (std::abs(x) > 1.0) continue;
    const double e = std::abs(u[k] - peak_exact(x, T));
    sup = std::max(sup, e);
    l1 += e * s.h;
  }
  return {sup, l1};
}

Outcome ac8() {
  auto f = [](const Vector& x) { return std::sin(kTwoPi * x[0]) * std::cos(2 * kTwoPi * x[1]) + 0.3 * std::cos(kTwoPi * (x[0] + x[1])); };
  auto grad = [](const Vector& x) {
    Vector g(2);
    g << kTwoPi * std::cos(kTwoPi * x[0]) * std::cos(2 * kTwoPi * x[1]) - 0.3 * kTwoPi * std::sin(kTwoPi * (x[0] + x[1])),
        -2 * kTwoPi * std::sin(kTwoPi * x[0]) * std::sin(2 * kTwoPi * x[1]) - 0.3 * kTwoPi * std::sin(kTwoPi * (x[0] + x[1]));
    return g;
  };
  auto hess = [](const Vector& x) {
    const double s = std::sin(kTwoPi * x[0]), c = std::cos(kTwoPi * x[0]);
    const double s2 = std::sin(2 * kTwoPi * x[1]), c2 = std::cos(2 * kTwoPi * x[1]);
    const double k2 = kTwoPi * kTwoPi, m = 0.3 * k2 * std::cos(kTwoPi * (x[0] + x[1]));
    Matrix H(2, 2);
    H << -k2 * s * c2 - m, -2 * k2 * c * s2 - m, -2 * k2 * c * s2 - m, -4 * k2 * s * c2 - m;
    return H;
  };
  std::vector<double> eg, eh;
  for (int N : {32, 64, 128}) {
    const auto s = GridSpec::torus(2, N);
    const auto u = GridFunction::sample(s, f);
    double g = 0.0, h = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
      const Vector x = s.position(k);
      g = std::max(g, (central_gradient(u, s.multi(k)) - grad(x)).norm());
      h = std::max(h, (central_hessian(u, s.multi(k)) - hess(x)).norm());
    }
    eg.push_back(g);
    eh.push_back(h);
  }
  const double og = std::min(std::log2(eg[0] / eg[1]), std::log2(eg[1] / eg[2]));
  const double oh = std::min(std::log2(eh[0] / eh[1]), std::log2(eh[1] / eh[2]));

  // First order away from the initial corner: restart from the exact solution at t = 0.25.
  const auto r1 = lf_error(200, 0.25, 0.75), r2 = lf_error(400, 0.25, 0.75), r3 = lf_error(800, 0.25, 0.75);
  const double ol1 = std::min(std::log2(r1.second / r2.second), std::log2(r2.second / r3.second));
  const double osup = std::log2(r2.first / r3.first);
  // From the corner itself the error carries a log factor; reported only.
  const auto k1 = lf_error(200, 0.0, 0.5), k2 = lf_error(400, 0.0, 0.5), k3 = lf_error(800, 0.0, 0.5);
  const double okink = std::log2(k2.first / k3.first);
  (void)k1;
  const bool pass = og >= 1.9 && oh >= 1.9 && ol1 >= 0.9;
  return {pass, fmt("gradient order %.3f, Hessian order %.3f (limit 1.9); effective solver L1 order %.3f (limit 0.9), "
                    "sup order %.3f from t0 = 0.25; sup order %.3f from the initial corner (reported)",
                    og, oh, ol1, osup, okink)};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

Outcome ac9() {
  const auto root = fs::temp_directory_path() / "homog_acceptance_determinism";
  fs::remove_all(root);
  const auto rate_cfg = config_json(parse_config(HOMOG_CONFIG_DIR "/rate_forced.ini"));
  const auto cone_cfg = config_json(parse_config(HOMOG_CONFIG_DIR "/cone.ini"));
  emit_report(forced_sweep(1), (root / "rate_a").string(), rate_cfg);
  emit_report(forced_sweep(3), (root / "rate_b").string(), rate_cfg);
  emit_report(cone_default(1), (root / "cone_a").string(), cone_cfg);
  emit_report(cone_default(3), (root / "cone_b").string(), cone_cfg);
  const auto ra = slurp(root / "rate_a" / "report.json"), rb = slurp(root / "rate_b" / "report.json");
  const auto ca = slurp(root / "cone_a" / "report.json"), cb = slurp(root / "cone_b" / "report.json");
  const bool pass = !ra.empty() && ra == rb && !ca.empty() && ca == cb;
  fs::remove_all(root);
  return {pass, fmt("rate report.json %s (%zu bytes), cone report.json %s (%zu bytes); runs with 1 and 3 threads",
                    ra == rb ? "identical" : "differs", ra.size(), ca == cb ? "identical" : "differs", ca.size())};
}

}  // namespace

int main() {
  std::printf("acceptance suite, library version %s\n", version());
  run("AC1", "constant-force cell problem", ac1);
  run("AC2", "front-speed consistency", ac2);
  run("AC3", "range bound on every table", ac3);
  run("AC4", "cone optimality", ac4);
  run("AC5", "forced upper bound", ac5);
  run("AC6", "discrete comparison principle", ac6);
  run("AC7", "gradient and time-derivative monitors", ac7);
  run("AC8", "stencil orders", ac8);
  run("AC9", "determinism", ac9);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
