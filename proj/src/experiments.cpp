#include "homog/experiments.hpp"

#include "homog/error.hpp"
#include "homog/format.hpp"
#include "homog/parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#ifndef HOMOG_VERSION
#define HOMOG_VERSION "0.0.0"
#endif

namespace homog {

namespace {

constexpr double kZeroError = 1e-10;

double coercivity_resolution(int n) { return n == 1 ? 1e-3 : 5e-3; }

// Number of points 2 L / h for spacing h; must be an even integer so that
// the origin is a node.
int box_points(double L, double h, const char* what) {
  const double raw = 2.0 * L / h;
  const double rounded = std::round(raw);
  if (std::abs(raw - rounded) > 1e-9 * std::max(1.0, raw) || static_cast<long>(rounded) % 2 != 0) {
    throw Error(ErrorCode::invalid_argument,
                std::string(what) + ": 2L/h = " + format_double(raw) + " is not an even integer");
  }
  return static_cast<int>(rounded);
}

std::size_t origin_index(const GridSpec& s) {
  const int c = s.points / 2;
  return s.n == 1 ? s.flat(c) : s.flat(c, c);
}

void check_eps_list(const std::vector<double>& eps) {
  if (eps.empty()) throw Error(ErrorCode::invalid_argument, "eps list is empty");
  for (std::size_t k = 0; k < eps.size(); ++k) {
    if (!(eps[k] > 0.0 && eps[k] <= 1.0)) {
      throw Error(ErrorCode::invalid_argument, "eps values must lie in (0, 1]");
    }
    if (k > 0 && !(eps[k] < eps[k - 1])) {
      throw Error(ErrorCode::invalid_argument, "eps values must be strictly decreasing");
    }
  }
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fixed(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::io, "cannot open " + path.string() + " for writing");
  os << text;
  os.close();
  if (!os) throw Error(ErrorCode::io, "failed writing " + path.string());
}

std::filesystem::path prepare_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::io, "cannot create output directory " + dir);
  }
  return std::filesystem::path(dir);
}

nlohmann::json fit_json(const std::optional<ExponentFit>& fit) {
  if (!fit) return nullptr;
  return {{"exponent", fit->exponent}, {"constant", fit->constant}, {"residuals", fit->residuals}};
}

std::string errors_csv(const std::vector<std::array<double, 3>>& rows) {
  std::string out = "eps,error,h\n";
  for (const auto& r : rows) {
    out += format_double(r[0]) + "," + format_double(r[1]) + "," + format_double(r[2]) + "\n";
  }
  return out;
}

}  // namespace

const char* version() { return HOMOG_VERSION; }

double InitialProfile::operator()(const Vector& x) const {
  switch (kind) {
    case Kind::flat: return 0.0;
    case Kind::cone: return x.norm();
    case Kind::mollified_cone: return std::sqrt(x.squaredNorm() + eta * eta);
    case Kind::sine: return eta * std::sin(2.0 * std::numbers::pi * x[0]);
  }
  return 0.0;
}

double InitialProfile::lipschitz() const {
  switch (kind) {
    case Kind::flat: return 0.0;
    case Kind::cone:
    case Kind::mollified_cone: return 1.0;
    case Kind::sine: return 2.0 * std::numbers::pi * std::abs(eta);
  }
  return 0.0;
}

GridFunction InitialProfile::sample(const GridSpec& spec) const {
  const InitialProfile self = *this;
  return GridFunction::sample(spec, [self](const Vector& x) { return self(x); });
}

std::string InitialProfile::label() const {
  switch (kind) {
    case Kind::flat: return "flat";
    case Kind::cone: return "cone";
    case Kind::mollified_cone: return "mollified_cone(" + format_double(eta) + ")";
    case Kind::sine: return "sine(" + format_double(eta) + ")";
  }
  return "flat";
}

InitialProfile InitialProfile::parse(const std::string& text) {
  InitialProfile p;
  if (text == "flat") return p;
  if (text == "cone") {
    p.kind = Kind::cone;
    return p;
  }
  for (const auto& [head, kind] : {std::pair<std::string, Kind>{"mollified_cone", Kind::mollified_cone},
                                   std::pair<std::string, Kind>{"sine", Kind::sine}}) {
    if (text.rfind(head, 0) != 0) continue;
    p.kind = kind;
    p.eta = kind == Kind::sine ? 0.25 : 0.0;
    const std::string rest = text.substr(head.size());
    if (rest.empty()) return p;
    if (rest.size() < 3 || rest.front() != '(' || rest.back() != ')') {
      throw Error(ErrorCode::parse, "bad initial profile '" + text + "'");
    }
    try {
      std::size_t used = 0;
      const std::string num = rest.substr(1, rest.size() - 2);
      p.eta = std::stod(num, &used);
      if (used != num.size() || !std::isfinite(p.eta) || (kind == Kind::mollified_cone && p.eta < 0.0)) {
        throw std::invalid_argument("eta");
      }
    } catch (const std::exception&) {
      throw Error(ErrorCode::parse, "bad parameter in initial profile '" + text + "'");
    }
    return p;
  }
  throw Error(ErrorCode::parse, "unknown initial profile '" + text + "' (flat, cone, mollified_cone, sine)");
}

ExponentFit fit_exponent(const std::vector<std::pair<double, double>>& records) {
  if (records.size() < 3) throw Error(ErrorCode::degenerate_fit, "exponent fit needs at least 3 records");
  for (const auto& [eps, err] : records) {
    if (!(eps > 0.0) || !(err > 0.0) || !std::isfinite(err)) {
      throw Error(ErrorCode::degenerate_fit, "exponent fit needs positive finite errors");
    }
  }
  const double m = static_cast<double>(records.size());
  double sx = 0.0, sy = 0.0;
  for (const auto& [eps, err] : records) {
    sx += std::log(eps);
    sy += std::log(err);
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [eps, err] : records) {
    const double dx = std::log(eps) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(err) - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorCode::degenerate_fit, "exponent fit needs distinct eps values");
  ExponentFit fit;
  fit.exponent = sxy / sxx;
  const double intercept = my - fit.exponent * mx;
  fit.constant = std::exp(intercept);
  for (const auto& [eps, err] : records) {
    fit.residuals.push_back(std::log(err) - (intercept + fit.exponent * std::log(eps)));
  }
  return fit;
}

RateReport run_rate_sweep(const RateSweepSettings& st) {
  check_eps_list(st.eps_list);
  if (!(st.horizon > 0.0)) throw Error(ErrorCode::invalid_argument, "horizon must be positive");
  if (!(st.half_extent > 0.0)) throw Error(ErrorCode::invalid_argument, "half extent must be positive");
  if (st.points_per_eps < 16) throw Error(ErrorCode::resolution, "points per eps must be at least 16");
  if (st.effective_refinement < 1) throw Error(ErrorCode::invalid_argument, "effective refinement must be >= 1");

  const ForcingField& force = st.force;
  const int n = force.dimension();
  const double L = st.half_extent;
  const double window = st.window.value_or(0.5 * L);
  if (!(window > 0.0 && window < L)) throw Error(ErrorCode::invalid_argument, "window must lie in (0, L)");
  const double T = st.horizon;
  const double N0 = st.initial.lipschitz();
  const double M = st.gradient_bound.value_or(std::max(N0, 1.0));
  const double cap = std::max(N0, 1.0) + 1.0;

  const double h_min = st.eps_list.back() / st.points_per_eps;
  InitialProfile initial = st.initial;
  if (initial.kind == InitialProfile::Kind::mollified_cone && !(initial.eta > 0.0)) initial.eta = h_min;

  RateReport report;
  std::optional<CoercivityCertificate> cert;
  if (!(force.is_constant() && force.value_bound() == 0.0)) {
    cert = check_coercivity(force, st.delta, coercivity_resolution(n));
  }

  // Effective operator.
  EffectiveHamiltonian H = EffectiveHamiltonian::zero(n);
  nlohmann::json table_info = nullptr;
  if (force.is_constant()) {
    const double c0 = force.value(Vector::Zero(n));
    if (c0 != 0.0) H = EffectiveHamiltonian::constant_force(n, c0);
    report.notes.push_back("constant force: closed-form effective operator");
  } else {
    const double P = st.table_coverage.value_or(N0 + 2.0);
    const auto mf = build_modified_force(force, cert, M);
    TableOptions topt;
    topt.cell.stop_tol = st.stop_tol;
    topt.required_coverage = N0 + 1.0;
    topt.jobs = st.jobs;
    auto table = build_table(mf, P, st.table_samples, GridSpec::torus(n, st.cell_points), st.lambdas, topt);
    double max_unc = 0.0;
    for (double u : table.uncertainties()) max_unc = std::max(max_unc, u);
    table_info = {{"coverage", P},
                  {"samples_per_axis", st.table_samples},
                  {"cell_points", st.cell_points},
                  {"lambdas", st.lambdas},
                  {"stop_tol", st.stop_tol},
                  {"max_uncertainty", max_unc},
                  {"ill_conditioned_samples", table.ill_conditioned_samples}};
    if (table.ill_conditioned_samples > 0) {
      report.notes.push_back(std::to_string(table.ill_conditioned_samples) +
                             " table samples have extrapolation spread above 10 stop_tol");
    }
    H = EffectiveHamiltonian::from_table(std::move(table));
  }

  // Nested grids: every eps grid is a subsampling of the effective grid.
  const int N_fine = box_points(L, h_min, "finest eps grid");
  const int N_eff = N_fine * st.effective_refinement;
  const auto eff_spec = GridSpec::box(n, N_eff, L, cap);
  std::vector<double> times{0.25 * T, 0.5 * T, T};

  EffectiveProblem ep;
  ep.hamiltonian = H;
  ep.initial = initial.sample(eff_spec);
  ep.lipschitz_bound = N0;
  ep.horizon = T;
  ep.snapshot_times = times;
  ep.monitor_stride = 64;
  const EffectiveTrace eff = solve_effective(ep);

  std::vector<RateRecord> records(st.eps_list.size());
  std::vector<MonitorSummary> summaries(st.eps_list.size());
  parallel_for(st.eps_list.size(), st.jobs, [&](std::size_t k) {
    RateRecord& rec = records[k];
    rec.eps = st.eps_list[k];
    rec.h = rec.eps / st.points_per_eps;
    rec.times = times;
    try {
      const int N = box_points(L, rec.h, "eps grid");
      if (N_eff % N != 0) throw Error(ErrorCode::invalid_argument, "eps grid is not nested in the effective grid");
      const int ratio = N_eff / N;
      const auto spec = GridSpec::box(n, N, L, cap);
      EpsilonOptions opt;
      opt.snapshot_times = times;
      opt.certificate = cert;
      opt.lipschitz_bound = N0;
      opt.gradient_bound = M;
      opt.monitor_stride = 256;
      const auto tr = solve_epsilon_problem(force, initial.sample(spec), rec.eps, T, opt);
      rec.steps = tr.steps;
      rec.max_lipschitz = tr.summary.max_lipschitz;
      summaries[k] = tr.summary;
      for (double t : times) {
        const auto& ue = tr.at_time(t).field;
        const auto& u = eff.at_time(t).field;
        double err = 0.0;
        for (std::size_t i = 0; i < spec.size(); ++i) {
          if (spec.position(i).norm() > window) continue;
          const auto m = spec.multi(i);
          const std::size_t j = n == 1 ? eff_spec.flat(m[0] * ratio) : eff_spec.flat(m[0] * ratio, m[1] * ratio);
          err = std::max(err, std::abs(ue[i] - u[j]));
        }
        rec.errors_at_times.push_back(err);
      }
      rec.error = *std::max_element(rec.errors_at_times.begin(), rec.errors_at_times.end());
    } catch (const Error& e) {
      rec.failure = std::string(to_string(e.code())) + ": " + e.what();
      rec.error = std::numeric_limits<double>::quiet_NaN();
    }
  });
  report.records = records;

  std::vector<std::pair<double, double>> pts;
  for (const auto& r : records) {
    if (!r.failure.empty()) {
      report.notes.push_back("eps = " + format_double(r.eps) + " excluded: " + r.failure);
      continue;
    }
    pts.emplace_back(r.eps, r.error);
  }
  const bool all_zero = !pts.empty() && std::all_of(pts.begin(), pts.end(), [](const auto& p) {
    return p.second < kZeroError;
  });
  if (all_zero) {
    report.notes.push_back("degenerate: zero error");
  } else if (pts.size() >= 3) {
    try {
      report.fit = fit_exponent(pts);
    } catch (const Error& e) {
      report.notes.push_back(std::string("fit skipped: ") + e.what());
    }
  } else {
    report.notes.push_back("fit skipped: fewer than 3 successful runs");
  }
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (pts[k].second > 0.0) {
      const double c = pts[k].second / std::sqrt(pts[k].first);
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
    if (k > 0 && !(pts[k].second < pts[k - 1].second)) report.monotone = false;
  }
  report.constant_spread = hi > 0.0 ? hi / lo : 0.0;

  report.scenario = {{"kind", "rate"},
                     {"force", force.label()},
                     {"n", n},
                     {"delta", st.delta},
                     {"gradient_bound", M},
                     {"initial", initial.label()},
                     {"lipschitz_bound", N0},
                     {"horizon", T},
                     {"half_extent", L},
                     {"window", window},
                     {"eps_list", st.eps_list},
                     {"points_per_eps", st.points_per_eps},
                     {"effective_points", N_eff},
                     {"effective_h", eff_spec.h},
                     {"hamiltonian", H.label()},
                     {"table", table_info}};
  nlohmann::json runs = nlohmann::json::array();
  for (std::size_t k = 0; k < records.size(); ++k) {
    if (!records[k].failure.empty()) continue;
    runs.push_back({{"eps", records[k].eps},
                    {"steps", records[k].steps},
                    {"max_lipschitz", summaries[k].max_lipschitz},
                    {"worst_wt_increase", summaries[k].worst_wt_increase}});
  }
  report.monitors = {{"effective",
                      {{"theta", eff.theta},
                       {"steps", eff.steps},
                       {"max_lipschitz", eff.summary.max_lipschitz},
                       {"queries", eff.queries},
                       {"clamped_queries", eff.clamped_queries}}},
                     {"eps_runs", runs}};
  return report;
}

ConeExample cone_experiment(const ConeSettings& st) {
  check_eps_list(st.eps_list);
  if (st.n != 1 && st.n != 2) throw Error(ErrorCode::invalid_argument, "dimension must be 1 or 2");
  if (st.resolutions.empty()) throw Error(ErrorCode::invalid_argument, "need at least one resolution");
  if (st.self_similarity_samples < 2) throw Error(ErrorCode::invalid_argument, "need at least 2 self-similarity samples");
  if (st.points_per_eps < 16) throw Error(ErrorCode::resolution, "points per eps must be at least 16");
  std::vector<int> res(st.resolutions);
  std::sort(res.begin(), res.end());
  res.erase(std::unique(res.begin(), res.end()), res.end());

  const ForcingField zero = ForcingField::zero(st.n);
  const double cap = 2.0;
  std::vector<double> sample_times;
  const int S = st.self_similarity_samples;
  for (int k = 0; k < S; ++k) sample_times.push_back(0.25 + 0.75 * k / (S - 1));

  // Expander runs and eps runs are independent tasks.
  const std::size_t R = res.size(), E = st.eps_list.size();
  std::vector<ConeResolution> resolutions(R);
  std::vector<ConeRecord> records(E);
  parallel_for(R + E, st.jobs, [&](std::size_t task) {
    if (task < R) {
      ConeResolution& cr = resolutions[task];
      cr.points = res[task];
      const auto spec = GridSpec::box(st.n, cr.points, st.half_extent, cap);
      cr.h = spec.h;
      ParabolicProblem pb;
      pb.force = zero;
      pb.initial = mollified_cone(spec);
      pb.lipschitz_bound = 1.0;
      pb.horizon = 1.0;
      pb.snapshot_times = sample_times;
      pb.monitor_stride = 256;
      const auto tr = evolve(pb);
      const std::size_t c = origin_index(spec);
      cr.center_value = tr.final().field[c];
      for (double t : sample_times) {
        cr.self_similarity_residual = std::max(
            cr.self_similarity_residual, std::abs(tr.at_time(t).field[c] - std::sqrt(t) * cr.center_value));
      }
      return;
    }
    ConeRecord& rec = records[task - R];
    rec.eps = st.eps_list[task - R];
    rec.h = rec.eps / st.points_per_eps;
    const int N = box_points(st.eps_half_extent, rec.h, "eps grid");
    const auto spec = GridSpec::box(st.n, N, st.eps_half_extent, cap);
    EpsilonOptions opt;
    opt.lipschitz_bound = 1.0;
    opt.monitor_stride = 256;
    const auto tr = solve_epsilon_problem(zero, mollified_cone(spec), rec.eps, 1.0, opt);
    // The effective solution is u(x, t) = |x|, so u(0, 1) = 0.
    rec.lower_bound_value = tr.final().field[origin_index(spec)];
  });

  ConeExample ex;
  ex.resolutions = resolutions;
  ex.expander_constant = resolutions.back().center_value;
  ex.self_similarity_residual = resolutions.back().self_similarity_residual;
  if (!(ex.expander_constant > 0.0)) {
    throw Error(ErrorCode::divergence,
                "non-positive expander constant " + format_double(ex.expander_constant) + " indicates a solver fault");
  }
  std::vector<std::pair<double, double>> pts;
  for (auto& r : records) {
    r.scaled = r.lower_bound_value / std::sqrt(r.eps);
    r.relative_to_expander = r.scaled / ex.expander_constant - 1.0;
    pts.emplace_back(r.eps, r.lower_bound_value);
  }
  ex.records = records;
  ex.fit = fit_exponent(pts);
  ex.scenario = {{"kind", "cone"},
                 {"n", st.n},
                 {"force", zero.label()},
                 {"initial", "mollified_cone(h)"},
                 {"eps_list", st.eps_list},
                 {"resolutions", res},
                 {"half_extent", st.half_extent},
                 {"eps_half_extent", st.eps_half_extent},
                 {"points_per_eps", st.points_per_eps},
                 {"self_similarity_window", {0.25, 1.0}}};
  return ex;
}

bool MonitorSuiteResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const MonitorCheck& c) { return c.passed; });
}

MonitorSuiteResult apriori_monitor_suite(const MonitorSettings& st) {
  const int n = st.force.dimension();
  if (!(st.horizon > 0.0)) throw Error(ErrorCode::invalid_argument, "horizon must be positive");
  GridFunction initial = st.initial.value_or(GridFunction::sample(GridSpec::torus(n, st.points), [](const Vector& x) {
    return 0.25 * std::sin(2.0 * std::numbers::pi * x[0]);
  }));
  if (initial.spec().n != n) throw Error(ErrorCode::invalid_argument, "initial data and force dimensions disagree");
  std::optional<CoercivityCertificate> cert;
  if (!(st.force.is_constant() && st.force.value_bound() == 0.0)) {
    cert = check_coercivity(st.force, st.delta, coercivity_resolution(n));
  }
  const double N0 = discrete_lipschitz(initial);

  ParabolicProblem pb;
  pb.force = st.force;
  pb.certificate = cert;
  pb.initial = initial;
  pb.lipschitz_bound = N0;
  pb.horizon = st.horizon;
  pb.monitor_stride = 16;
  const auto t1 = evolve(pb);
  pb.horizon = 2.0 * st.horizon;
  const auto t2 = evolve(pb);

  MonitorSuiteResult res;
  res.estimates = estimate_apriori(t1, N0, st.fit_window);
  res.doubled = estimate_apriori(t2, N0, st.fit_window);

  MonitorCheck wt;
  wt.name = "time_derivative";
  wt.value = std::max(t1.summary.worst_wt_increase, t2.summary.worst_wt_increase);
  wt.time = t2.summary.worst_wt_increase >= t1.summary.worst_wt_increase ? t2.summary.worst_wt_increase_time
                                                                          : t1.summary.worst_wt_increase_time;
  wt.limit = st.wt_slack;
  wt.passed = wt.value <= wt.limit;
  wt.detail = "relative increase of sup|w_t| after tau";
  res.checks.push_back(wt);

  const double m1 = res.estimates.M_emp, m2 = res.doubled.M_emp;
  MonitorCheck gb;
  gb.name = "gradient_bound";
  gb.value = t2.summary.max_lipschitz_after_tau;
  gb.limit = std::max(t2.summary.lipschitz_at_tau, m1) * (1.0 + st.m_emp_tolerance) + 1e-12;
  gb.time = 2.0 * st.horizon;
  gb.passed = gb.value <= gb.limit;
  gb.detail = "gradient over [tau, 2T] against max(L(tau), M_emp(T))";
  res.checks.push_back(gb);

  MonitorCheck gh;
  gh.name = "gradient_horizon";
  gh.value = std::max(m1, m2) < 1e-12 ? 0.0 : std::abs(m2 - m1) / std::max(m1, 1e-12);
  gh.limit = st.m_emp_tolerance;
  gh.time = 2.0 * st.horizon;
  gh.passed = gh.value < gh.limit;
  gh.detail = "relative change of M_emp from T to 2T";
  res.checks.push_back(gh);

  MonitorCheck sh;
  sh.name = "short_time";
  const double v = short_time_bound_violation(t1, res.estimates);
  sh.value = std::isfinite(v) ? v : 0.0;
  sh.limit = 0.0;
  sh.time = 0.5 * res.estimates.T_star;
  sh.passed = sh.value <= 1e-12;
  sh.detail = "z against the short-time bound on [0, T*/2]";
  res.checks.push_back(sh);
  return res;
}

nlohmann::json to_json(const RateReport& r) {
  nlohmann::json recs = nlohmann::json::array();
  for (const auto& x : r.records) {
    nlohmann::json j = {{"eps", x.eps},
                        {"h", x.h},
                        {"times", x.times},
                        {"errors_at_times", x.errors_at_times},
                        {"steps", x.steps},
                        {"max_lipschitz", x.max_lipschitz}};
    if (x.failure.empty()) {
      j["error"] = x.error;
    } else {
      j["error"] = nullptr;
      j["failure"] = x.failure;
    }
    recs.push_back(j);
  }
  return {{"scenario", r.scenario},
          {"records", recs},
          {"fit", fit_json(r.fit)},
          {"notes", r.notes},
          {"constant_spread", r.constant_spread},
          {"monotone", r.monotone},
          {"monitors", r.monitors},
          {"version", version()}};
}

nlohmann::json to_json(const ConeExample& c) {
  nlohmann::json recs = nlohmann::json::array();
  for (const auto& x : c.records) {
    recs.push_back({{"eps", x.eps},
                    {"error", x.lower_bound_value},
                    {"h", x.h},
                    {"times", {1.0}},
                    {"scaled", x.scaled},
                    {"relative_to_expander", x.relative_to_expander}});
  }
  nlohmann::json res = nlohmann::json::array();
  for (const auto& x : c.resolutions) {
    res.push_back({{"points", x.points},
                   {"h", x.h},
                   {"center_value", x.center_value},
                   {"self_similarity_residual", x.self_similarity_residual}});
  }
  return {{"scenario", c.scenario},
          {"records", recs},
          {"fit", fit_json(c.fit)},
          {"expander_constant", c.expander_constant},
          {"self_similarity_residual", c.self_similarity_residual},
          {"monitors", {{"resolutions", res}}},
          {"version", version()}};
}

nlohmann::json to_json(const MonitorSuiteResult& m) {
  auto est = [](const AprioriEstimates& e) {
    return nlohmann::json{{"N0", e.N0}, {"C1_proxy", e.C1_proxy}, {"T_star", e.T_star}, {"M_emp", e.M_emp}, {"tau", e.tau}};
  };
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : m.checks) {
    checks.push_back({{"name", c.name},
                      {"passed", c.passed},
                      {"value", c.value},
                      {"limit", c.limit},
                      {"time", c.time},
                      {"detail", c.detail}});
  }
  return {{"estimates", est(m.estimates)},
          {"doubled", est(m.doubled)},
          {"checks", checks},
          {"passed", m.passed()},
          {"version", version()}};
}

std::string rate_plot_svg(const std::vector<std::pair<double, double>>& points,
                          const std::optional<ExponentFit>& fit, const std::string& title) {
  const double W = 480, Hgt = 360, left = 70, right = 20, top = 40, bottom = 50;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  std::vector<std::pair<double, double>> logs;
  for (const auto& [e, r] : points) {
    if (!(e > 0.0) || !(r > 0.0)) continue;
    logs.emplace_back(std::log10(e), std::log10(r));
    x0 = std::min(x0, logs.back().first);
    x1 = std::max(x1, logs.back().first);
    y0 = std::min(y0, logs.back().second);
    y1 = std::max(y1, logs.back().second);
  }
  if (logs.empty()) x0 = y0 = -1.0, x1 = y1 = 0.0;
  auto pad = [](double& a, double& b) {
    if (b - a < 1e-12) {
      a -= 0.5;
      b += 0.5;
    } else {
      const double m = 0.1 * (b - a);
      a -= m;
      b += m;
    }
  };
  pad(x0, x1);
  pad(y0, y1);
  auto X = [&](double lx) { return left + (lx - x0) / (x1 - x0) * (W - left - right); };
  auto Y = [&](double ly) { return Hgt - bottom - (ly - y0) / (y1 - y0) * (Hgt - top - bottom); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"480\" height=\"360\" viewBox=\"0 0 480 360\">\n";
  os << "<metadata>{\"points\":" << logs.size();
  if (fit) {
    os << ",\"slope\":" << format_double(fit->exponent) << ",\"intercept\":" << format_double(std::log10(fit->constant));
  }
  os << "}</metadata>\n";
  os << "<title>" << xml_escape(title) << "</title>\n";
  os << "<rect x=\"0\" y=\"0\" width=\"480\" height=\"360\" fill=\"white\"/>\n";
  os << "<text x=\"240\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << xml_escape(title) << "</text>\n";
  os << "<line class=\"axis\" x1=\"" << fixed(left) << "\" y1=\"" << fixed(Hgt - bottom) << "\" x2=\"" << fixed(W - right)
     << "\" y2=\"" << fixed(Hgt - bottom) << "\" stroke=\"black\"/>\n";
  os << "<line class=\"axis\" x1=\"" << fixed(left) << "\" y1=\"" << fixed(top) << "\" x2=\"" << fixed(left)
     << "\" y2=\"" << fixed(Hgt - bottom) << "\" stroke=\"black\"/>\n";
  for (int d = static_cast<int>(std::ceil(x0)); d <= static_cast<int>(std::floor(x1)); ++d) {
    os << "<text x=\"" << fixed(X(d)) << "\" y=\"" << fixed(Hgt - bottom + 18)
       << "\" text-anchor=\"middle\" font-size=\"11\">1e" << d << "</text>\n";
  }
  for (int d = static_cast<int>(std::ceil(y0)); d <= static_cast<int>(std::floor(y1)); ++d) {
    os << "<text x=\"" << fixed(left - 6) << "\" y=\"" << fixed(Y(d) + 4)
       << "\" text-anchor=\"end\" font-size=\"11\">1e" << d << "</text>\n";
  }
  os << "<text x=\"" << fixed(0.5 * (left + W - right)) << "\" y=\"" << fixed(Hgt - 12)
     << "\" text-anchor=\"middle\" font-size=\"12\">eps</text>\n";
  os << "<text x=\"16\" y=\"" << fixed(0.5 * (top + Hgt - bottom))
     << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
     << fixed(0.5 * (top + Hgt - bottom)) << ")\">error</text>\n";
  for (const auto& [lx, ly] : logs) {
    os << "<circle class=\"point\" cx=\"" << fixed(X(lx)) << "\" cy=\"" << fixed(Y(ly))
       << "\" r=\"4\" fill=\"steelblue\"/>\n";
  }
  if (fit) {
    const double b = std::log10(fit->constant);
    const double xa = logs.empty() ? x0 : logs.front().first, xb = logs.empty() ? x1 : logs.back().first;
    const double lo = std::min(xa, xb), hi = std::max(xa, xb);
    os << "<line class=\"fit\" x1=\"" << fixed(X(lo)) << "\" y1=\"" << fixed(Y(b + fit->exponent * lo)) << "\" x2=\""
       << fixed(X(hi)) << "\" y2=\"" << fixed(Y(b + fit->exponent * hi)) << "\" stroke=\"firebrick\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void emit_report(const RateReport& report, const std::string& dir, const nlohmann::json& config) {
  if (report.records.empty()) throw Error(ErrorCode::degenerate_report, "sweep has no records to report");
  const auto path = prepare_dir(dir);
  nlohmann::json j = to_json(report);
  j["config"] = config;
  write_text(path / "report.json", j.dump(2) + "\n");
  std::vector<std::array<double, 3>> rows;
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : report.records) {
    rows.push_back({r.eps, r.error, r.h});
    if (r.failure.empty()) pts.emplace_back(r.eps, r.error);
  }
  write_text(path / "errors.csv", errors_csv(rows));
  write_text(path / "rate_plot.svg", rate_plot_svg(pts, report.fit, "sup error vs eps: " + report.scenario.value("force", std::string())));
}

void emit_report(const ConeExample& report, const std::string& dir, const nlohmann::json& config) {
  if (report.records.empty()) throw Error(ErrorCode::degenerate_report, "cone example has no records to report");
  const auto path = prepare_dir(dir);
  nlohmann::json j = to_json(report);
  j["config"] = config;
  write_text(path / "report.json", j.dump(2) + "\n");
  std::vector<std::array<double, 3>> rows;
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : report.records) {
    rows.push_back({r.eps, r.lower_bound_value, r.h});
    pts.emplace_back(r.eps, r.lower_bound_value);
  }
  write_text(path / "errors.csv", errors_csv(rows));
  write_text(path / "rate_plot.svg", rate_plot_svg(pts, report.fit, "u_eps(0,1) - u(0,1) vs eps"));
}

}  // namespace homog
