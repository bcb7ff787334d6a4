#include "homog/config.hpp"

#include "homog/error.hpp"
#include "homog/format.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace homog {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"scenario", {"name", "seed"}},
      {"force", {"family", "coefficients", "n", "delta", "gradient_bound"}},
      {"grid", {"points", "half_extent", "topology"}},
      {"solver", {"stop_tol", "lambdas", "theta_pad", "cfl_safety"}},
      {"experiment",
       {"eps_list", "horizon", "coverage", "samples_per_axis", "window", "initial", "points_per_eps",
        "effective_refinement", "cell_points", "resolutions", "expander_half_extent", "eps_half_extent",
        "momentum", "fit_window"}},
      {"output", {"dir"}},
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void bad(const std::string& key, const std::string& value, const std::string& why) {
  throw Error(ErrorCode::parse, key + " = '" + value + "': " + why);
}

// Accepts decimals and simple fractions such as 1/64.
double to_number(const std::string& key, const std::string& raw) {
  const std::string text = trim(raw);
  const auto slash = text.find('/');
  try {
    std::size_t used = 0;
    if (slash == std::string::npos) {
      const double v = std::stod(text, &used);
      if (used != text.size()) bad(key, raw, "trailing characters");
      return v;
    }
    const std::string a = trim(text.substr(0, slash)), b = trim(text.substr(slash + 1));
    std::size_t ua = 0, ub = 0;
    const double num = std::stod(a, &ua), den = std::stod(b, &ub);
    if (ua != a.size() || ub != b.size() || den == 0.0) bad(key, raw, "malformed fraction");
    return num / den;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    bad(key, raw, "not a number");
  }
}

int to_int(const std::string& key, const std::string& raw) {
  const double v = to_number(key, raw);
  if (v != std::floor(v) || std::abs(v) > 1e9) bad(key, raw, "not an integer");
  return static_cast<int>(v);
}

std::vector<std::string> split(const std::string& raw) {
  std::vector<std::string> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> to_numbers(const std::string& key, const std::string& raw) {
  std::vector<double> out;
  for (const auto& s : split(raw)) out.push_back(to_number(key, s));
  if (out.empty()) bad(key, raw, "empty list");
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) out += (k ? ", " : "") + format_double(v[k]);
  return out;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::invalid_argument, "config: " + what);
}

void validate(const RunConfig& c) {
  require(c.force.n == 1 || c.force.n == 2, "force.n must be 1 or 2");
  require(c.delta > 0.0, "force.delta must be positive");
  require(!c.gradient_bound || *c.gradient_bound > 0.0, "force.gradient_bound must be positive");
  require(c.points >= 8, "grid.points must be at least 8");
  require(c.half_extent > 0.0, "grid.half_extent must be positive");
  require(c.stop_tol > 0.0, "solver.stop_tol must be positive");
  require(!c.lambdas.empty(), "solver.lambdas must not be empty");
  for (double l : c.lambdas) require(l > 0.0, "solver.lambdas must be positive");
  require(c.theta_pad >= 1.0, "solver.theta_pad must be at least 1");
  require(c.cfl_safety > 0.0 && c.cfl_safety <= 1.0, "solver.cfl_safety must lie in (0, 1]");
  require(!c.eps_list.empty(), "experiment.eps_list must not be empty");
  for (std::size_t k = 0; k < c.eps_list.size(); ++k) {
    require(c.eps_list[k] > 0.0 && c.eps_list[k] <= 1.0, "experiment.eps_list values must lie in (0, 1]");
    require(k == 0 || c.eps_list[k] < c.eps_list[k - 1], "experiment.eps_list must be strictly decreasing");
  }
  require(c.horizon > 0.0, "experiment.horizon must be positive");
  require(!c.coverage || *c.coverage > 0.0, "experiment.coverage must be positive");
  require(c.samples_per_axis >= 2, "experiment.samples_per_axis must be at least 2");
  require(!c.window || *c.window > 0.0, "experiment.window must be positive");
  require(c.points_per_eps >= 16, "experiment.points_per_eps must be at least 16");
  require(c.effective_refinement >= 1, "experiment.effective_refinement must be at least 1");
  require(c.cell_points >= 8, "experiment.cell_points must be at least 8");
  require(!c.resolutions.empty(), "experiment.resolutions must not be empty");
  for (int r : c.resolutions) require(r >= 8, "experiment.resolutions must be at least 8");
  require(c.expander_half_extent > 0.0, "experiment.expander_half_extent must be positive");
  require(c.eps_half_extent > 0.0, "experiment.eps_half_extent must be positive");
  require(static_cast<int>(c.momentum.size()) == c.force.n, "experiment.momentum needs force.n entries");
  require(c.fit_window > 0.0, "experiment.fit_window must be positive");
  InitialProfile::parse(c.initial);
  ForcingField::from_descriptor(c.force);
}

void apply_override(pt::ptree& tree, const std::string& item) {
  const auto eq = item.find('=');
  const auto dot = item.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
    throw Error(ErrorCode::parse, "override '" + item + "' is not of the form section.key=value");
  }
  const std::string section = trim(item.substr(0, dot));
  const std::string key = trim(item.substr(dot + 1, eq - dot - 1));
  tree.put(pt::ptree::path_type(section + "." + key, '.'), trim(item.substr(eq + 1)));
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::vector<std::string>& overrides) {
  pt::ptree tree;
  try {
    std::istringstream is(text);
    pt::ini_parser::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorCode::parse, std::string("config: ") + e.what());
  }
  for (const auto& o : overrides) apply_override(tree, o);

  const auto& keys = known_keys();
  for (const auto& [section, body] : tree) {
    const auto it = keys.find(section);
    if (it == keys.end()) {
      if (body.empty() && !body.data().empty()) {
        throw Error(ErrorCode::parse, "config: key '" + section + "' outside a section");
      }
      throw Error(ErrorCode::parse, "config: unknown section [" + section + "]");
    }
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) throw Error(ErrorCode::parse, "config: unknown key " + section + "." + key);
      if (!value.empty()) throw Error(ErrorCode::parse, "config: nested key under " + section + "." + key);
    }
  }

  RunConfig c;
  auto get = [&](const std::string& section, const std::string& key) -> std::optional<std::string> {
    const auto s = tree.get_child_optional(section);
    if (!s) return std::nullopt;
    const auto v = s->get_optional<std::string>(key);
    if (!v) return std::nullopt;
    return trim(*v);
  };
  auto num = [&](const char* section, const char* key, double& out) {
    if (const auto v = get(section, key)) out = to_number(std::string(section) + "." + key, *v);
  };
  auto opt_num = [&](const char* section, const char* key, std::optional<double>& out) {
    if (const auto v = get(section, key)) {
      if (*v == "auto" || v->empty()) {
        out.reset();
      } else {
        out = to_number(std::string(section) + "." + key, *v);
      }
    }
  };
  auto integer = [&](const char* section, const char* key, int& out) {
    if (const auto v = get(section, key)) out = to_int(std::string(section) + "." + key, *v);
  };
  auto list = [&](const char* section, const char* key, std::vector<double>& out) {
    if (const auto v = get(section, key)) out = to_numbers(std::string(section) + "." + key, *v);
  };

  if (const auto v = get("scenario", "name")) c.name = *v;
  if (const auto v = get("scenario", "seed")) {
    const int s = to_int("scenario.seed", *v);
    require(s >= 0, "scenario.seed must be non-negative");
    c.seed = static_cast<unsigned>(s);
  }
  integer("force", "n", c.force.n);
  if (const auto v = get("force", "family")) c.force.family = parse_force_family(*v);
  list("force", "coefficients", c.force.coefficients);
  num("force", "delta", c.delta);
  opt_num("force", "gradient_bound", c.gradient_bound);
  integer("grid", "points", c.points);
  num("grid", "half_extent", c.half_extent);
  if (const auto v = get("grid", "topology")) c.topology = parse_topology(*v);
  num("solver", "stop_tol", c.stop_tol);
  list("solver", "lambdas", c.lambdas);
  num("solver", "theta_pad", c.theta_pad);
  num("solver", "cfl_safety", c.cfl_safety);
  list("experiment", "eps_list", c.eps_list);
  num("experiment", "horizon", c.horizon);
  opt_num("experiment", "coverage", c.coverage);
  integer("experiment", "samples_per_axis", c.samples_per_axis);
  opt_num("experiment", "window", c.window);
  if (const auto v = get("experiment", "initial")) c.initial = *v;
  integer("experiment", "points_per_eps", c.points_per_eps);
  integer("experiment", "effective_refinement", c.effective_refinement);
  integer("experiment", "cell_points", c.cell_points);
  if (const auto v = get("experiment", "resolutions")) {
    c.resolutions.clear();
    for (const auto& s : split(*v)) c.resolutions.push_back(to_int("experiment.resolutions", s));
  }
  num("experiment", "expander_half_extent", c.expander_half_extent);
  num("experiment", "eps_half_extent", c.eps_half_extent);
  if (get("experiment", "momentum")) {
    list("experiment", "momentum", c.momentum);
  } else {
    c.momentum.assign(c.force.n, 0.0);
  }
  num("experiment", "fit_window", c.fit_window);
  if (const auto v = get("output", "dir")) c.output_dir = *v;
  validate(c);
  return c;
}

RunConfig parse_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::io, "cannot read config " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return parse_config_text(os.str(), overrides);
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream os;
  os << "[scenario]\nname = " << c.name << "\nseed = " << c.seed << "\n\n";
  os << "[force]\nfamily = " << to_string(c.force.family) << "\ncoefficients = " << join(c.force.coefficients)
     << "\nn = " << c.force.n << "\ndelta = " << format_double(c.delta)
     << "\ngradient_bound = " << (c.gradient_bound ? format_double(*c.gradient_bound) : "auto") << "\n\n";
  os << "[grid]\npoints = " << c.points << "\nhalf_extent = " << format_double(c.half_extent)
     << "\ntopology = " << to_string(c.topology) << "\n\n";
  os << "[solver]\nstop_tol = " << format_double(c.stop_tol) << "\nlambdas = " << join(c.lambdas)
     << "\ntheta_pad = " << format_double(c.theta_pad) << "\ncfl_safety = " << format_double(c.cfl_safety)
     << "\n\n";
  std::vector<double> res(c.resolutions.begin(), c.resolutions.end());
  os << "[experiment]\neps_list = " << join(c.eps_list) << "\nhorizon = " << format_double(c.horizon)
     << "\ncoverage = " << (c.coverage ? format_double(*c.coverage) : "auto")
     << "\nsamples_per_axis = " << c.samples_per_axis
     << "\nwindow = " << (c.window ? format_double(*c.window) : "auto") << "\ninitial = " << c.initial
     << "\npoints_per_eps = " << c.points_per_eps << "\neffective_refinement = " << c.effective_refinement
     << "\ncell_points = " << c.cell_points << "\nresolutions = " << join(res)
     << "\nexpander_half_extent = " << format_double(c.expander_half_extent)
     << "\neps_half_extent = " << format_double(c.eps_half_extent) << "\nmomentum = " << join(c.momentum)
     << "\nfit_window = " << format_double(c.fit_window) << "\n";
  if (!c.output_dir.empty()) os << "\n[output]\ndir = " << c.output_dir << "\n";
  return os.str();
}

nlohmann::json config_json(const RunConfig& c) {
  auto opt = [](const std::optional<double>& v) -> nlohmann::json {
    if (v) return *v;
    return "auto";
  };
  return {{"scenario", {{"name", c.name}, {"seed", c.seed}}},
          {"force",
           {{"family", to_string(c.force.family)},
            {"coefficients", c.force.coefficients},
            {"n", c.force.n},
            {"delta", c.delta},
            {"gradient_bound", opt(c.gradient_bound)}}},
          {"grid", {{"points", c.points}, {"half_extent", c.half_extent}, {"topology", to_string(c.topology)}}},
          {"solver",
           {{"stop_tol", c.stop_tol}, {"lambdas", c.lambdas}, {"theta_pad", c.theta_pad}, {"cfl_safety", c.cfl_safety}}},
          {"experiment",
           {{"eps_list", c.eps_list},
            {"horizon", c.horizon},
            {"coverage", opt(c.coverage)},
            {"samples_per_axis", c.samples_per_axis},
            {"window", opt(c.window)},
            {"initial", c.initial},
            {"points_per_eps", c.points_per_eps},
            {"effective_refinement", c.effective_refinement},
            {"cell_points", c.cell_points},
            {"resolutions", c.resolutions},
            {"expander_half_extent", c.expander_half_extent},
            {"eps_half_extent", c.eps_half_extent},
            {"momentum", c.momentum},
            {"fit_window", c.fit_window}}}};
}

ForcingField make_force(const RunConfig& c) { return ForcingField::from_descriptor(c.force); }

InitialProfile make_initial(const RunConfig& c) { return InitialProfile::parse(c.initial); }

RateSweepSettings rate_settings(const RunConfig& c, int jobs) {
  RateSweepSettings s;
  s.force = make_force(c);
  s.delta = c.delta;
  s.gradient_bound = c.gradient_bound;
  s.initial = make_initial(c);
  s.horizon = c.horizon;
  s.eps_list = c.eps_list;
  s.half_extent = c.half_extent;
  s.window = c.window;
  s.points_per_eps = c.points_per_eps;
  s.effective_refinement = c.effective_refinement;
  s.table_coverage = c.coverage;
  s.table_samples = c.samples_per_axis;
  s.cell_points = c.cell_points;
  s.lambdas = c.lambdas;
  s.stop_tol = c.stop_tol;
  s.jobs = jobs;
  return s;
}

ConeSettings cone_settings(const RunConfig& c, int jobs) {
  const auto f = make_force(c);
  require(f.is_constant() && f.value_bound() == 0.0, "the cone example needs the zero force");
  ConeSettings s;
  s.n = c.force.n;
  s.eps_list = c.eps_list;
  s.resolutions = c.resolutions;
  s.half_extent = c.expander_half_extent;
  s.eps_half_extent = c.eps_half_extent;
  s.points_per_eps = c.points_per_eps;
  s.jobs = jobs;
  return s;
}

MonitorSettings monitor_settings(const RunConfig& c) {
  MonitorSettings s;
  s.force = make_force(c);
  s.delta = c.delta;
  s.points = c.points;
  s.horizon = c.horizon;
  s.fit_window = c.fit_window;
  s.initial = make_initial(c).sample(GridSpec::torus(c.force.n, c.points));
  return s;
}

}  // namespace homog
