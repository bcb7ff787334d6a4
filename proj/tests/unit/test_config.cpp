#include <doctest.h>

#include "homog/config.hpp"
#include "homog/error.hpp"

#include <random>

using namespace homog;

namespace {

ErrorCode code_of(const std::string& text, const std::vector<std::string>& overrides = {}) {
  try {
    parse_config_text(text, overrides);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a configuration error");
  return ErrorCode::io;
}

}  // namespace

TEST_CASE("minimal cone config parses with defaults") {
  const auto c = parse_config_text("[force]\nfamily = constant\ncoefficients = 0\n");
  CHECK(c.force.family == ForceFamily::constant);
  CHECK(c.eps_list == std::vector<double>{0.25, 0.125, 0.0625, 0.03125, 0.015625});
  CHECK(c.resolutions == std::vector<int>{256, 512, 1024});
  CHECK(c.momentum == std::vector<double>{0.0});
  CHECK_FALSE(c.coverage.has_value());
  const auto cs = cone_settings(c, 1);
  CHECK(cs.n == 1);
  CHECK(cs.half_extent == 4.0);
}

TEST_CASE("fractions, lists and auto values") {
  const auto c = parse_config_text(
      "[force]\nfamily = sinusoid\ncoefficients = 1, 0.5\nn = 2\n"
      "[experiment]\neps_list = 1/2, 1/8\nmomentum = 0.5, -1\ncoverage = auto\nwindow = 0.75\n");
  CHECK(c.eps_list == std::vector<double>{0.5, 0.125});
  CHECK(c.momentum == std::vector<double>{0.5, -1.0});
  CHECK(c.force.n == 2);
  CHECK_FALSE(c.coverage.has_value());
  CHECK(c.window == 0.75);
}

TEST_CASE("invalid configs are rejected") {
  CHECK(code_of("[experiment]\neps_list = 0.5, 1.5\n") == ErrorCode::invalid_argument);
  CHECK(code_of("[experiment]\neps_list = 0.25, 0.5\n") == ErrorCode::invalid_argument);
  CHECK(code_of("[grid]\nbogus = 1\n") == ErrorCode::parse);
  CHECK(code_of("[nonsense]\nx = 1\n") == ErrorCode::parse);
  CHECK(code_of("[grid]\npoints = 12.5\n") == ErrorCode::parse);
  CHECK(code_of("[grid]\npoints = abc\n") == ErrorCode::parse);
  CHECK(code_of("[grid]\ntopology = sphere\n") == ErrorCode::parse);
  CHECK(code_of("[force]\nfamily = warp\n") == ErrorCode::parse);
  CHECK(code_of("[experiment]\ninitial = paraboloid\n") == ErrorCode::parse);
  CHECK(code_of("[experiment]\nmomentum = 1, 2\n") == ErrorCode::invalid_argument);
  CHECK(code_of("[solver]\ncfl_safety = 1.5\n") == ErrorCode::invalid_argument);
  CHECK(code_of("[grid]\npoints = 4\n") == ErrorCode::invalid_argument);
  CHECK(code_of("", {"grid.points"}) == ErrorCode::parse);
  CHECK(code_of("", {"grid.nothing=1"}) == ErrorCode::parse);
}

TEST_CASE("overrides replace individual keys") {
  const auto c = parse_config_text("[grid]\npoints = 64\n", {"grid.points=128", "experiment.horizon = 2"});
  CHECK(c.points == 128);
  CHECK(c.horizon == 2.0);
}

TEST_CASE("serialization round trip over random configs") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::uniform_int_distribution<int> I(8, 4096);
  for (int trial = 0; trial < 200; ++trial) {
    RunConfig c;
    c.name = "trial" + std::to_string(trial);
    c.seed = static_cast<unsigned>(I(rng));
    c.force.family = trial % 2 ? ForceFamily::sinusoid : ForceFamily::constant;
    c.force.coefficients = trial % 2 ? std::vector<double>{1.0 + U(rng), 0.3 * U(rng)} : std::vector<double>{U(rng)};
    c.delta = 0.01 + U(rng);
    if (trial % 3 == 0) c.gradient_bound = 1.0 + 3.0 * U(rng);
    c.points = I(rng);
    c.half_extent = 0.1 + 5.0 * U(rng);
    c.topology = trial % 4 ? Topology::box : Topology::torus;
    c.stop_tol = 1e-12 + 1e-6 * U(rng);
    c.lambdas = {U(rng) + 1e-3, U(rng) + 1e-3};
    c.theta_pad = 1.0 + U(rng);
    c.cfl_safety = 0.1 + 0.9 * U(rng);
    double e = 1.0;
    c.eps_list.clear();
    for (int k = 0; k < 1 + trial % 5; ++k) c.eps_list.push_back(e *= 0.1 + 0.8 * U(rng));
    c.horizon = 0.01 + 3.0 * U(rng);
    if (trial % 5 == 0) c.coverage = 1.0 + 4.0 * U(rng);
    c.samples_per_axis = I(rng);
    if (trial % 2 == 0) c.window = U(rng) + 0.01;
    c.initial = trial % 3 == 0 ? "flat" : (trial % 3 == 1 ? "mollified_cone(0.01)" : "sine(0.3)");
    c.points_per_eps = 16 + trial % 20;
    c.effective_refinement = 1 + trial % 4;
    c.cell_points = I(rng);
    c.resolutions = {I(rng), I(rng)};
    c.expander_half_extent = 1.0 + U(rng);
    c.eps_half_extent = 0.5 + U(rng);
    c.momentum = {U(rng) - 0.5};
    c.fit_window = U(rng) + 0.01;
    if (trial % 7 == 0) c.output_dir = "out/run" + std::to_string(trial);
    const std::string text = serialize_config(c);
    const RunConfig back = parse_config_text(text);
    CHECK(back == c);
    CHECK(serialize_config(back) == text);
  }
}

TEST_CASE("embedded config omits the output directory") {
  auto c = parse_config_text("[output]\ndir = somewhere\n");
  CHECK(c.output_dir == "somewhere");
  const auto j = config_json(c);
  CHECK_FALSE(j.contains("output"));
  c.output_dir = "elsewhere";
  CHECK(config_json(c) == j);
}
