#include <doctest.h>

#include "homog/cell_problem.hpp"
#include "homog/error.hpp"
#include "oracles/front_speed.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace homog;

namespace {

const ForcingField kSinusoid = ForcingField::sinusoid(1, 1.0, 0.5);
const std::vector<double> kLambdas{1e-2, 5e-3, 2.5e-3};

// -F-bar(0) for c = 1 + 0.5 sin(2 pi y): the slope angle theta = atan(v')
// solves theta' = s - c(y) / cos(theta); s is the smallest value admitting a
// periodic orbit (saddle-node of the Poincare map), computed with scipy DOP853.
constexpr double kSinusoidSpeed = 1.001587516426201;

ModifiedForce modified(const ForcingField& f, double M = 1.0) {
  const double delta = f.dimension() == 1 ? 0.2 : 0.5;
  return build_modified_force(f, check_coercivity(f, delta, 1e-3), M);
}

Vector vec(double a) { return Vector::Constant(1, a); }

}  // namespace

TEST_CASE("constant force has zero corrector and closed-form value") {
  const auto mf = modified(ForcingField::constant(1, 1.0));
  const auto g = GridSpec::torus(1, 64);
  for (double p : {0.0, 0.5, -0.5, 1.0, -1.0}) {
    const auto s = solve_discounted(vec(p), 1e-2, mf, g);
    CHECK(std::abs(s.effective_value + std::sqrt(1.0 + p * p)) < 1e-12);
    CHECK(sup_norm(s.corrector) == 0.0);
    CHECK(s.corrector[0] == 0.0);
    CHECK(s.iterations == 0);
  }
  const auto mf2 = modified(ForcingField::constant(2, 2.0));
  Vector p(2);
  p << 0.3, -0.4;
  const auto s2 = solve_discounted(p, 5e-3, mf2, GridSpec::torus(2, 16));
  CHECK(std::abs(s2.effective_value + 2.0 * std::sqrt(1.25)) < 1e-12);
}

TEST_CASE("saturated slopes give the constant c0 exactly") {
  const auto mf = modified(kSinusoid, 1.0);
  const Vector p = vec(4.0);
  REQUIRE(mf.saturated(p));
  const auto s = solve_discounted(p, 1e-2, mf, GridSpec::torus(1, 128));
  CHECK(s.effective_value == -mf.saturation() * std::sqrt(17.0));
  CHECK(sup_norm(s.corrector) == 0.0);
}

TEST_CASE("sinusoid cell value matches the slope-angle oracle and the front speed") {
  const auto mf = modified(kSinusoid);
  const auto g = GridSpec::torus(1, 256);
  const auto ev = richardson_effective_value(vec(0.0), mf, g, kLambdas);
  CHECK(std::abs(ev.value + kSinusoidSpeed) < 1e-4);
  CHECK(ev.corrector.corrector[0] == 0.0);
  CHECK(ev.per_lambda.size() == 3);

  const double speed =
      oracle::front_speed(kSinusoid, check_coercivity(kSinusoid, 0.2, 1e-3), 256, 10.0);
  CHECK(std::abs(ev.value + speed) <= std::max(1e-3, ev.uncertainty));
}

TEST_CASE("discounted solve converges to the same value from random starts") {
  const auto mf = modified(kSinusoid);
  const auto g = GridSpec::torus(1, 128);
  const CellOptions base;
  const double ref = solve_discounted(vec(0.4), 5e-3, mf, g, base).effective_value;
  std::mt19937 rng(7);
  std::normal_distribution<double> nd(0.0, 0.3);
  for (int trial = 0; trial < 4; ++trial) {
    CellOptions opt;
    // Smooth random periodic start from a few low modes.
    std::vector<double> init(g.size());
    const double a = nd(rng), b = nd(rng), c = nd(rng), d = nd(rng);
    for (std::size_t i = 0; i < init.size(); ++i) {
      const double y = 2.0 * std::numbers::pi * g.position(i)[0];
      init[i] = a * std::sin(y) + b * std::cos(y) + c * std::sin(2 * y) + d * std::cos(3 * y);
    }
    opt.initial = init;
    opt.initial_speed = 5.0 * nd(rng);
    const auto s = solve_discounted(vec(0.4), 5e-3, mf, g, opt);
    CHECK(std::abs(s.effective_value - ref) <= 10.0 * opt.stop_tol);
    CHECK(s.discounted_residual < opt.stop_tol);
  }
}

TEST_CASE("cell residual is controlled by the discount") {
  const auto mf = modified(kSinusoid);
  const auto s = solve_discounted(vec(0.7), 2.5e-3, mf, GridSpec::torus(1, 128));
  // residual = sup |lambda (v - mean v)| up to the stop tolerance.
  double spread = 0.0, mean = 0.0;
  for (double v : s.corrector.values()) mean += v;
  mean /= static_cast<double>(s.corrector.size());
  for (double v : s.corrector.values()) spread = std::max(spread, std::abs(v - mean));
  CHECK(s.residual <= s.lambda * spread + 1e-8);
  const auto [lo, hi] = effective_range(mf, vec(0.7));
  CHECK(s.effective_value >= lo);
  CHECK(s.effective_value <= hi);
}

TEST_CASE("laminated 2D force reproduces the 1D cell value") {
  const auto f2 = ForcingField::sinusoid(2, 2.0, 0.2, {1, 0});
  const auto mf2 = modified(f2);
  const auto mf1 = modified(ForcingField::sinusoid(1, 2.0, 0.2));
  Vector p(2);
  p << 0.6, 0.0;
  const auto a = solve_discounted(p, 1e-2, mf2, GridSpec::torus(2, 32));
  const auto b = solve_discounted(vec(0.6), 1e-2, mf1, GridSpec::torus(1, 32));
  CHECK(std::abs(a.effective_value - b.effective_value) < 1e-9);

  // Oblique slope in 2D: value inside the range bound.
  p << 0.5, -0.8;
  const auto c = solve_discounted(p, 1e-2, mf2, GridSpec::torus(2, 24));
  const auto [lo, hi] = effective_range(mf2, p);
  CHECK(c.effective_value >= lo);
  CHECK(c.effective_value <= hi);
}

TEST_CASE("richardson extrapolation") {
  const auto mf = modified(ForcingField::constant(1, 1.0));
  const auto g = GridSpec::torus(1, 32);
  const auto ev = richardson_effective_value(vec(0.5), mf, g, kLambdas);
  CHECK(ev.uncertainty == 0.0);
  CHECK(ev.value == -std::sqrt(1.25));
  CHECK_FALSE(ev.ill_conditioned);

  const auto two = richardson_effective_value(vec(-1.0), mf, g, {0.5, 0.25});
  CHECK(two.value == two.per_lambda[0]);

  const auto sin = richardson_effective_value(vec(0.0), modified(kSinusoid), g, kLambdas);
  CHECK(sin.uncertainty > 0.0);
  CHECK(sin.ill_conditioned == (sin.uncertainty > 1e-7));

  CHECK_THROWS_AS(richardson_effective_value(vec(0.0), mf, g, {1e-2}), Error);
  CHECK_THROWS_AS(richardson_effective_value(vec(0.0), mf, g, {1e-3, 1e-2}), Error);
}

TEST_CASE("preconditions of the discounted solve") {
  const auto mf = modified(kSinusoid);
  CHECK_THROWS_AS(solve_discounted(vec(0.0), 1e-2, mf, GridSpec::box(1, 16, 1.0, 2.0)), Error);
  CHECK_THROWS_AS(solve_discounted(vec(0.0), 0.0, mf, GridSpec::torus(1, 16)), Error);
  CHECK_THROWS_AS(solve_discounted(vec(0.0), 1.5, mf, GridSpec::torus(1, 16)), Error);
  CellOptions opt;
  opt.max_iterations = 1;
  try {
    solve_discounted(vec(0.3), 1e-3, mf, GridSpec::torus(1, 64), opt);
    FAIL("expected iteration limit");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::iteration_limit);
  }
}

TEST_CASE("constant-force table matches the closed form") {
  const auto mf = modified(ForcingField::constant(1, 1.0));
  const auto t = build_table(mf, 2.0, 9, GridSpec::torus(1, 32), kLambdas);
  REQUIRE(t.size() == 9);
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double p = t.sample_point(k)[0];
    CHECK(std::abs(t.values()[k] + std::sqrt(1.0 + p * p)) < 1e-6);
  }
  const auto b = corrector_bound_report(t);
  CHECK(b.sup_v == 0.0);
  CHECK(b.sup_dv == 0.0);
  CHECK(b.sup_d2v == 0.0);
  // Interpolation reproduces nodes and stays between neighbours.
  CHECK(t.value(vec(-2.0)) == t.values()[0]);
  CHECK(t.value(vec(0.0)) == t.values()[4]);
  bool clamped = false;
  CHECK(t.value(vec(3.0), &clamped) == t.values()[8]);
  CHECK(clamped);
  CHECK(std::abs(t.slope_bound(0) - (std::sqrt(5.0) - std::sqrt(1.0 + 1.5 * 1.5)) / 0.5) < 1e-6);
  CHECK(t.symmetry_defect() < 1e-12);
}

TEST_CASE("even force gives a symmetric table inside the range bound") {
  const auto even = ForcingField::trig(1, 1.0, {{{1}, 0.4, 0.0}});
  const auto mf = modified(even, 1.0);
  TableOptions opt;
  opt.jobs = 2;
  const auto t = build_table(mf, 2.0, 9, GridSpec::torus(1, 64), kLambdas, opt);
  CHECK(t.symmetry_defect() < 1e-7);
  for (std::size_t k = 0; k < t.size(); ++k) {
    CHECK(t.values()[k] >= t.range_low[k] - 1e-6);
    CHECK(t.values()[k] <= t.range_high[k] + 1e-6);
  }
  // Recomputing at a mirrored slope reproduces the table entry.
  const auto mirror = richardson_effective_value(vec(1.5), mf, GridSpec::torus(1, 64), kLambdas);
  CHECK(std::abs(mirror.value - t.value(vec(-1.5))) < 1e-7);
  CHECK(t.second_difference_bound(0) > 0.0);
}

TEST_CASE("out-of-band table entries are saturated exactly") {
  const auto mf = modified(kSinusoid, 0.5);
  // Band ends at sqrt(1.25) + 2, i.e. |p| >= 3.07.
  const auto t = build_table(mf, 4.0, 9, GridSpec::torus(1, 64), kLambdas);
  for (std::size_t k = 0; k < t.size(); ++k) {
    const Vector p = t.sample_point(k);
    if (mf.saturated(p)) {
      CHECK(t.values()[k] == -mf.saturation() * japanese_bracket(p));
      CHECK(t.corrector_bounds[k].sup_v == 0.0);
    }
  }
  CHECK(mf.saturated(vec(4.0)));
}

TEST_CASE("corrector bounds are stable under p-refinement") {
  const auto mf = modified(kSinusoid, 1.0);
  const auto g = GridSpec::torus(1, 64);
  const auto coarse = corrector_bound_report(build_table(mf, 3.0, 7, g, kLambdas));
  const auto fine = corrector_bound_report(build_table(mf, 3.0, 13, g, kLambdas));
  CHECK(coarse.sup_v > 0.0);
  CHECK(std::abs(fine.sup_v / coarse.sup_v - 1.0) < 0.05);
  CHECK(std::abs(fine.sup_dv / coarse.sup_dv - 1.0) < 0.05);
  CHECK(std::abs(fine.sup_d2v / coarse.sup_d2v - 1.0) < 0.05);
}

TEST_CASE("table coverage and validation errors") {
  const auto mf = modified(kSinusoid);
  TableOptions opt;
  opt.required_coverage = 3.0;
  try {
    build_table(mf, 2.0, 5, GridSpec::torus(1, 32), kLambdas, opt);
    FAIL("expected precondition error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::precondition);
  }
  CHECK_THROWS_AS(EffectiveHamiltonianTable(1, 1.0, 3, {0.0, 1.0}, {0.0, 0.0}, "x"), Error);
}

TEST_CASE("table CSV round trip") {
  const auto mf = modified(ForcingField::sinusoid(2, 2.0, 0.2, {1, 1}));
  const auto t = build_table(mf, 1.0, 3, GridSpec::torus(2, 16), {1e-2, 5e-3});
  std::stringstream ss;
  write_table_csv(t, ss);
  const std::string text = ss.str();
  CHECK(text.rfind("# 2, 1, 3, sinusoid[2;0.2;1;1]\n", 0) == 0);
  const auto back = read_table_csv(ss);
  CHECK(back.dimension() == 2);
  CHECK(back.samples_per_axis() == 3);
  CHECK(back.values() == t.values());
  CHECK(back.uncertainties() == t.uncertainties());
  CHECK(back.force_label() == t.force_label());
  Vector q(2);
  q << 0.25, -0.6;
  CHECK(back.value(q) == t.value(q));

  std::stringstream bad("# 1, 1, 3, c\n-1,0,0\n0,0,0\n");
  CHECK_THROWS_AS(read_table_csv(bad), Error);
}
