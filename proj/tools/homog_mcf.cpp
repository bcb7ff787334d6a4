#include "homog/cell_problem.hpp"
#include "homog/config.hpp"
#include "homog/error.hpp"
#include "homog/experiments.hpp"
#include "homog/hj_solver.hpp"
#include "homog/parabolic.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

using namespace homog;
namespace fs = std::filesystem;

namespace {

struct Context {
  RunConfig config;
  fs::path out;
  int jobs = 1;
};

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::io, "cannot write " + path.string());
  os << j.dump(2) << "\n";
  if (!os) throw Error(ErrorCode::io, "failed writing " + path.string());
}

fs::path ensure_dir(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec || !fs::is_directory(p)) throw Error(ErrorCode::io, "cannot create output directory " + p.string());
  return p;
}

std::optional<CoercivityCertificate> certify(const RunConfig& c, const ForcingField& f) {
  if (f.is_constant() && f.value_bound() == 0.0) return std::nullopt;
  return check_coercivity(f, c.delta, f.dimension() == 1 ? 1e-3 : 5e-3);
}

GridSpec config_grid(const RunConfig& c, double lipschitz) {
  if (c.topology == Topology::torus) return GridSpec::torus(c.force.n, c.points);
  return GridSpec::box(c.force.n, c.points, c.half_extent, std::max(lipschitz, 1.0) + 1.0);
}

// Effective operator: closed form for constant forces, else a fresh table.
EffectiveHamiltonian effective_operator(const Context& ctx, double N0) {
  const auto& c = ctx.config;
  const auto f = make_force(c);
  if (f.is_constant()) {
    const double c0 = f.value(Vector::Zero(f.dimension()));
    return c0 == 0.0 ? EffectiveHamiltonian::zero(f.dimension()) : EffectiveHamiltonian::constant_force(f.dimension(), c0);
  }
  const auto mf = build_modified_force(f, certify(c, f), c.gradient_bound.value_or(std::max(N0, 1.0)));
  TableOptions opt;
  opt.cell.stop_tol = c.stop_tol;
  opt.required_coverage = N0 + 1.0;
  opt.jobs = ctx.jobs;
  return EffectiveHamiltonian::from_table(
      build_table(mf, c.coverage.value_or(N0 + 2.0), c.samples_per_axis, GridSpec::torus(f.dimension(), c.cell_points),
                  c.lambdas, opt));
}

int cmd_check(const Context& ctx) {
  const auto f = make_force(ctx.config);
  const auto cert = check_coercivity(f, ctx.config.delta, f.dimension() == 1 ? 1e-3 : 5e-3);
  std::cout << "force " << f.label() << ": coercivity margin " << cert.min_margin << " > delta " << cert.delta
            << " (slack " << cert.lipschitz_slack << ")\n";
  ensure_dir(ctx.out);
  write_json(ctx.out / "certificate.json", {{"force", cert.force_label},
                                            {"delta", cert.delta},
                                            {"min_margin", cert.min_margin},
                                            {"lipschitz_slack", cert.lipschitz_slack},
                                            {"sample_resolution", cert.sample_resolution},
                                            {"worst_point", cert.worst_point},
                                            {"version", version()}});
  return 0;
}

int cmd_evolve(const Context& ctx) {
  const auto& c = ctx.config;
  const auto f = make_force(c);
  const auto init = make_initial(c);
  const auto spec = config_grid(c, init.lipschitz());
  ParabolicProblem pb;
  pb.force = f;
  pb.certificate = certify(c, f);
  pb.initial = init.kind == InitialProfile::Kind::mollified_cone && init.eta == 0.0 ? mollified_cone(spec)
                                                                                     : init.sample(spec);
  pb.lipschitz_bound = std::max(init.lipschitz(), discrete_lipschitz(pb.initial));
  pb.horizon = c.horizon;
  pb.snapshot_times = {0.25 * c.horizon, 0.5 * c.horizon};
  pb.gradient_bound = c.gradient_bound;
  pb.cfl_safety = c.cfl_safety;
  pb.monitor_stride = 100;
  const auto tr = evolve(pb);
  export_trace(tr, (ensure_dir(ctx.out) / "trace").string());
  std::cout << "evolved " << tr.steps << " steps to t = " << tr.final().t << ", max Lipschitz "
            << tr.summary.max_lipschitz << "; trace in " << (ctx.out / "trace").string() << "\n";
  return 0;
}

int cmd_cell(const Context& ctx) {
  const auto& c = ctx.config;
  const auto f = make_force(c);
  const auto mf = build_modified_force(f, certify(c, f), c.gradient_bound.value_or(1.0));
  Vector p(c.force.n);
  for (int a = 0; a < c.force.n; ++a) p[a] = c.momentum[a];
  CellOptions opt;
  opt.stop_tol = c.stop_tol;
  const auto ev = richardson_effective_value(p, mf, GridSpec::torus(c.force.n, c.cell_points), c.lambdas, opt);
  ensure_dir(ctx.out);
  write_csv(ev.corrector.corrector, (ctx.out / "corrector.csv").string());
  write_json(ctx.out / "cell.json", {{"p", c.momentum},
                                     {"effective_value", ev.value},
                                     {"uncertainty", ev.uncertainty},
                                     {"ill_conditioned", ev.ill_conditioned},
                                     {"lambdas", ev.lambdas},
                                     {"per_lambda", ev.per_lambda},
                                     {"residual", ev.corrector.residual},
                                     {"sup_v", ev.corrector.bounds.sup_v},
                                     {"sup_dv", ev.corrector.bounds.sup_dv},
                                     {"sup_d2v", ev.corrector.bounds.sup_d2v},
                                     {"version", version()}});
  std::cout << "effective value " << ev.value << " (spread " << ev.uncertainty << ")\n";
  if (ev.ill_conditioned) std::cerr << "warning: extrapolation spread exceeds 10 stop_tol\n";
  return 0;
}

int cmd_table(const Context& ctx) {
  const double N0 = make_initial(ctx.config).lipschitz();
  const auto f = make_force(ctx.config);
  const auto mf = build_modified_force(f, certify(ctx.config, f), ctx.config.gradient_bound.value_or(std::max(N0, 1.0)));
  TableOptions opt;
  opt.cell.stop_tol = ctx.config.stop_tol;
  opt.required_coverage = N0 + 1.0;
  opt.jobs = ctx.jobs;
  const auto table = build_table(mf, ctx.config.coverage.value_or(N0 + 2.0), ctx.config.samples_per_axis,
                                 GridSpec::torus(f.dimension(), ctx.config.cell_points), ctx.config.lambdas, opt);
  ensure_dir(ctx.out);
  write_table_csv(table, (ctx.out / "table.csv").string());
  const auto b = corrector_bound_report(table);
  std::cout << "table " << table.size() << " samples on [-" << table.coverage() << ", " << table.coverage()
            << "]^" << table.dimension() << "; corrector bounds sup|v| " << b.sup_v << ", sup|Dv| " << b.sup_dv
            << ", sup|D2v| " << b.sup_d2v << "; " << table.ill_conditioned_samples
            << " samples above the spread threshold\n";
  return 0;
}

int cmd_effective(const Context& ctx) {
  const auto& c = ctx.config;
  const auto init = make_initial(c);
  const double N0 = init.lipschitz();
  const auto spec = config_grid(c, N0);
  EffectiveProblem pb;
  pb.hamiltonian = effective_operator(ctx, N0);
  pb.initial = init.kind == InitialProfile::Kind::mollified_cone && init.eta == 0.0 ? mollified_cone(spec)
                                                                                     : init.sample(spec);
  pb.lipschitz_bound = std::max(N0, discrete_lipschitz(pb.initial));
  pb.horizon = c.horizon;
  pb.snapshot_times = {0.25 * c.horizon, 0.5 * c.horizon};
  pb.cfl_safety = c.cfl_safety;
  std::vector<double> theta;
  for (int a = 0; a < pb.hamiltonian.dimension(); ++a) theta.push_back(c.theta_pad * pb.hamiltonian.measured_slope(a));
  pb.theta = theta;
  const auto tr = solve_effective(pb);
  export_trace(tr, (ensure_dir(ctx.out) / "effective").string());
  std::cout << "effective run: " << tr.steps << " steps, " << tr.clamped_queries << " of " << tr.queries
            << " queries clamped; trace in " << (ctx.out / "effective").string() << "\n";
  return 0;
}

int cmd_rate(const Context& ctx) {
  const auto report = run_rate_sweep(rate_settings(ctx.config, ctx.jobs));
  emit_report(report, ctx.out.string(), config_json(ctx.config));
  for (const auto& r : report.records) {
    std::cout << "eps " << r.eps << "  error " << r.error << "  h " << r.h;
    if (!r.failure.empty()) std::cout << "  excluded: " << r.failure;
    std::cout << "\n";
  }
  if (report.fit) std::cout << "fitted exponent " << report.fit->exponent << ", constant " << report.fit->constant << "\n";
  for (const auto& n : report.notes) std::cout << "note: " << n << "\n";
  return 0;
}

int cmd_cone(const Context& ctx) {
  const auto ex = cone_experiment(cone_settings(ctx.config, ctx.jobs));
  emit_report(ex, ctx.out.string(), config_json(ctx.config));
  std::cout << "expander constant " << ex.expander_constant << ", self-similarity residual "
            << ex.self_similarity_residual << ", fitted exponent " << ex.fit.exponent << "\n";
  return 0;
}

int cmd_monitors(const Context& ctx) {
  const auto res = apriori_monitor_suite(monitor_settings(ctx.config));
  ensure_dir(ctx.out);
  auto j = to_json(res);
  j["config"] = config_json(ctx.config);
  write_json(ctx.out / "monitors.json", j);
  for (const auto& ch : res.checks) {
    std::cout << (ch.passed ? "ok   " : "FAIL ") << ch.name << ": " << ch.value << " (limit " << ch.limit << ", t = "
              << ch.time << ")\n";
  }
  std::cout << "N0 " << res.estimates.N0 << ", C1_proxy " << res.estimates.C1_proxy << ", T* " << res.estimates.T_star
            << ", M_emp " << res.estimates.M_emp << "\n";
  if (!res.passed()) {
    for (const auto& ch : res.checks) {
      if (!ch.passed) {
        std::cerr << "error: monitor " << ch.name << " violated at t = " << ch.time << ": " << ch.value << " > "
                  << ch.limit << "\n";
        break;
      }
    }
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Forced graphical mean curvature flow homogenization laboratory"};
  std::string subcommand, config_path, out_dir;
  std::vector<std::string> overrides;
  int jobs = 1;
  bool dump = false;
  app.add_option("subcommand", subcommand, "check, evolve, cell, table, effective, rate, cone or monitors")
      ->required()
      ->check(CLI::IsMember({"check", "evolve", "cell", "table", "effective", "rate", "cone", "monitors"}));
  app.add_option("--config", config_path, "INI scenario file")->required();
  app.add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", out_dir, "output directory (default: [output] dir, then $HOMOG_MCF_OUT)");
  app.add_option("--override", overrides, "section.key=value, repeatable");
  app.add_flag("--dump-config", dump, "print the resolved configuration and exit");
  app.set_version_flag("--version", version());
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    Context ctx;
    ctx.config = parse_config(config_path, overrides);
    ctx.jobs = jobs;
    if (dump) {
      std::cout << serialize_config(ctx.config);
      return 0;
    }
    if (!out_dir.empty()) {
      ctx.out = out_dir;
    } else if (!ctx.config.output_dir.empty()) {
      ctx.out = ctx.config.output_dir;
    } else if (const char* env = std::getenv("HOMOG_MCF_OUT"); env && *env) {
      ctx.out = env;
    } else {
      ctx.out = "homog_out";
    }
    if (subcommand == "check") return cmd_check(ctx);
    if (subcommand == "evolve") return cmd_evolve(ctx);
    if (subcommand == "cell") return cmd_cell(ctx);
    if (subcommand == "table") return cmd_table(ctx);
    if (subcommand == "effective") return cmd_effective(ctx);
    if (subcommand == "rate") return cmd_rate(ctx);
    if (subcommand == "cone") return cmd_cone(ctx);
    return cmd_monitors(ctx);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return is_numerical(e.code()) ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
