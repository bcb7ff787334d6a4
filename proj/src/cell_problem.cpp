#include "homog/cell_problem.hpp"

#include "homog/error.hpp"
#include "homog/format.hpp"
#include "homog/parallel.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace homog {

namespace {

using Triplet = Eigen::Triplet<double>;
using SparseMatrix = Eigen::SparseMatrix<double>;

// Discrete cell operator G_i(v) = F~(D^2 v, p + Dv, y_i) with central
// differences on the torus. The c~ sampling is fixed per (force, grid).
class CellOperator {
 public:
  CellOperator(const Vector& p, const ModifiedForce& force, const GridSpec& grid)
      : grid_(grid), p_(p), c0_(force.saturation()), xi_(force.cutoff()) {
    c_.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) c_[i] = force.base().value(grid.position(i));
  }

  std::size_t size() const { return c_.size(); }

  // Fills G and optionally the Jacobian triplets dG_i/dv_j.
  void apply(const std::vector<double>& v, std::vector<double>& G,
             std::vector<Triplet>* jac) const {
    G.resize(v.size());
    if (jac) jac->clear();
    if (grid_.n == 1) {
      apply_1d(v, G, jac);
    } else {
      apply_2d(v, G, jac);
    }
  }

 private:
  double modified(double c, double w) const { return w == 0.0 ? c0_ : w * c + (1.0 - w) * c0_; }

  void apply_1d(const std::vector<double>& v, std::vector<double>& G,
                std::vector<Triplet>* jac) const {
    const int N = grid_.points;
    const double h = grid_.h, inv2h = 0.5 / h, invh2 = 1.0 / (h * h);
    for (int i = 0; i < N; ++i) {
      const int im = (i + N - 1) % N, ip = (i + 1) % N;
      const double P = p_[0] + (v[ip] - v[im]) * inv2h;
      const double X = (v[ip] - 2.0 * v[i] + v[im]) * invh2;
      const double q = 1.0 + P * P, r = std::sqrt(q);
      const double w = xi_(r);
      const double ct = modified(c_[i], w);
      G[i] = -X / q - ct * r;
      if (!jac) continue;
      const double dX = -1.0 / q;
      const double dP = 2.0 * P * X / (q * q) - xi_.derivative(r) * (c_[i] - c0_) * P - ct * P / r;
      jac->emplace_back(i, ip, dX * invh2 + dP * inv2h);
      jac->emplace_back(i, im, dX * invh2 - dP * inv2h);
      jac->emplace_back(i, i, -2.0 * dX * invh2);
    }
  }

  void apply_2d(const std::vector<double>& v, std::vector<double>& G,
                std::vector<Triplet>* jac) const {
    const int N = grid_.points;
    const double h = grid_.h, inv2h = 0.5 / h, invh2 = 1.0 / (h * h), inv4h2 = 0.25 * invh2;
    auto at = [N](int a, int b) { return static_cast<int>(((a + N) % N) + N * ((b + N) % N)); };
    for (int j = 0; j < N; ++j) {
      for (int i = 0; i < N; ++i) {
        const int c = at(i, j), e = at(i + 1, j), wst = at(i - 1, j), nn = at(i, j + 1),
                  s = at(i, j - 1), ne = at(i + 1, j + 1), nw = at(i - 1, j + 1),
                  se = at(i + 1, j - 1), sw = at(i - 1, j - 1);
        const double P0 = p_[0] + (v[e] - v[wst]) * inv2h;
        const double P1 = p_[1] + (v[nn] - v[s]) * inv2h;
        const double X00 = (v[e] - 2.0 * v[c] + v[wst]) * invh2;
        const double X11 = (v[nn] - 2.0 * v[c] + v[s]) * invh2;
        const double X01 = (v[ne] - v[se] - v[nw] + v[sw]) * inv4h2;
        const double q = 1.0 + P0 * P0 + P1 * P1, r = std::sqrt(q);
        const double a00 = 1.0 - P0 * P0 / q, a11 = 1.0 - P1 * P1 / q, a01 = -P0 * P1 / q;
        const double w = xi_(r);
        const double ct = modified(c_[c], w);
        G[c] = -(a00 * X00 + a11 * X11 + 2.0 * a01 * X01) - ct * r;
        if (!jac) continue;
        const double XP0 = X00 * P0 + X01 * P1, XP1 = X01 * P0 + X11 * P1;
        const double pXp = P0 * XP0 + P1 * XP1;
        const double common = xi_.derivative(r) * (c_[c] - c0_) + ct / r;
        const double dP0 = 2.0 * XP0 / q - 2.0 * P0 * pXp / (q * q) - common * P0;
        const double dP1 = 2.0 * XP1 / q - 2.0 * P1 * pXp / (q * q) - common * P1;
        const double d00 = -a00 * invh2, d11 = -a11 * invh2, d01 = -2.0 * a01 * inv4h2;
        jac->emplace_back(c, c, -2.0 * d00 - 2.0 * d11);
        jac->emplace_back(c, e, d00 + dP0 * inv2h);
        jac->emplace_back(c, wst, d00 - dP0 * inv2h);
        jac->emplace_back(c, nn, d11 + dP1 * inv2h);
        jac->emplace_back(c, s, d11 - dP1 * inv2h);
        jac->emplace_back(c, ne, d01);
        jac->emplace_back(c, sw, d01);
        jac->emplace_back(c, se, -d01);
        jac->emplace_back(c, nw, -d01);
      }
    }
  }

  GridSpec grid_;
  Vector p_;
  double c0_;
  CutoffProfile xi_;
  std::vector<double> c_;
};

double sup_abs(const std::vector<double>& x) {
  double m = 0.0;
  for (double a : x) m = std::max(m, std::abs(a));
  return m;
}

double mean_of(const std::vector<double>& x) {
  double s = 0.0;
  for (double a : x) s += a;
  return s / static_cast<double>(x.size());
}

CorrectorBounds measure_bounds(const GridFunction& v) {
  CorrectorBounds b;
  const auto& s = v.spec();
  b.sup_v = sup_norm(v);
  for (std::size_t k = 0; k < v.size(); ++k) {
    const auto idx = s.multi(k);
    b.sup_dv = std::max(b.sup_dv, central_gradient(v, idx).norm());
    b.sup_d2v = std::max(b.sup_d2v, central_hessian(v, idx).norm());
  }
  return b;
}

std::string format_p(const Vector& p) {
  std::string out = "(";
  for (int k = 0; k < p.size(); ++k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%.6g", k ? ", " : "", p[k]);
    out += buf;
  }
  return out + ")";
}

}  // namespace

CorrectorSolution solve_discounted(const Vector& p, double lambda, const ModifiedForce& force,
                                   const GridSpec& grid, const CellOptions& options) {
  if (grid.topology != Topology::torus) {
    throw Error(ErrorCode::precondition, "cell problem needs a torus grid");
  }
  if (p.size() != grid.n || force.dimension() != grid.n) {
    throw Error(ErrorCode::invalid_argument, "slope, force and grid dimensions disagree");
  }
  if (!p.allFinite()) throw Error(ErrorCode::invalid_argument, "slope must be finite");
  if (!(lambda > 0.0 && lambda <= 1.0)) {
    throw Error(ErrorCode::invalid_argument, "discount lambda must lie in (0, 1]");
  }
  if (!(options.stop_tol > 0.0)) throw Error(ErrorCode::invalid_argument, "stop_tol must be positive");

  const CellOperator op(p, force, grid);
  const std::size_t N = op.size();

  // v^lambda = mu / lambda + u with mean(u) = 0, so F-bar = -mu.
  std::vector<double> u(N, 0.0);
  if (options.initial) {
    if (options.initial->size() != N) {
      throw Error(ErrorCode::invalid_argument, "initial corrector has the wrong size");
    }
    u = *options.initial;
    const double m = mean_of(u);
    for (double& x : u) x -= m;
  }
  std::vector<double> G;
  std::vector<Triplet> trip;
  op.apply(u, G, nullptr);
  double mu;
  if (options.initial_speed) {
    mu = *options.initial_speed;
  } else {
    const auto [lo, hi] = std::minmax_element(G.begin(), G.end());
    mu = *lo == *hi ? -*lo : -mean_of(G);
  }

  std::vector<double> R(N);
  auto residual = [&](const std::vector<double>& uu, double m, std::vector<Triplet>* jac) {
    op.apply(uu, G, jac);
    for (std::size_t i = 0; i < N; ++i) R[i] = m + lambda * uu[i] + G[i];
    return sup_abs(R);
  };

  double r = residual(u, mu, &trip);
  // Implicit pseudo-time relaxation v_tau = -R(v): each step of length dtau
  // is a backward Euler step solved by Newton. Failed steps shrink dtau,
  // accepted ones grow it, and dtau -> inf is plain Newton on R.
  double dtau = 1e15;
  int it = 0;
  SparseMatrix J(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
  Eigen::SparseLU<SparseMatrix> lu;
  bool analyzed = false;
  std::vector<double> un, w(N), Rt(N);
  auto fail = [&](const char* why) -> std::string {
    char buf[200];
    std::snprintf(buf, sizeof buf, "discounted cell problem at p = %s, lambda = %g %s; residual %.3e",
                  format_p(p).c_str(), lambda, why, r);
    return buf;
  };
  while (r >= options.stop_tol) {
    if (dtau < 1e-10) throw Error(ErrorCode::divergence, fail("stalled"));
    const double sigma = dtau > 1e12 ? 0.0 : 1.0 / dtau;
    un = u;
    const double mun = mu;
    w = u;
    double mw = mu;
    double rt0 = -1.0;
    bool ok = false;
    op.apply(w, G, &trip);
    for (int inner = 0; inner < 12; ++inner) {
      double rt = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        R[i] = mw + lambda * w[i] + G[i];
        Rt[i] = sigma * ((w[i] - un[i]) + (mw - mun) / lambda) + R[i];
        rt = std::max(rt, std::abs(Rt[i]));
      }
      if (!std::isfinite(rt)) break;
      if (rt0 < 0.0) rt0 = rt;
      if (rt <= std::max(1e-3 * rt0, 0.1 * options.stop_tol) || (sigma == 0.0 && rt < options.stop_tol)) {
        ok = true;
        break;
      }
      if (inner > 2 && rt > rt0) break;
      if (it >= options.max_iterations) throw Error(ErrorCode::iteration_limit, fail("did not converge"));
      ++it;
      for (std::size_t i = 0; i < N; ++i) trip.emplace_back(i, i, lambda + sigma);
      J.setFromTriplets(trip.begin(), trip.end());
      if (!analyzed) {
        lu.analyzePattern(J);
        analyzed = true;
      }
      lu.factorize(J);
      if (lu.info() != Eigen::Success) break;
      const Eigen::VectorXd delta =
          lu.solve(-Eigen::Map<const Eigen::VectorXd>(Rt.data(), static_cast<Eigen::Index>(N)));
      for (std::size_t i = 0; i < N; ++i) w[i] += delta[static_cast<Eigen::Index>(i)];
      const double shift = mean_of(w);
      for (double& x : w) x -= shift;
      mw += lambda * shift;
      op.apply(w, G, &trip);
    }
    if (!ok) {
      dtau = std::min(dtau, 1.0) / 16.0;
      continue;
    }
    u.swap(w);
    mu = mw;
    r = sup_abs(R);
    dtau *= 4.0;
  }
  op.apply(u, G, nullptr);

  CorrectorSolution sol;
  sol.p = p;
  sol.lambda = lambda;
  sol.effective_value = -mu;
  sol.discounted_residual = r;
  sol.iterations = it;
  double res = 0.0;
  for (std::size_t i = 0; i < N; ++i) res = std::max(res, std::abs(G[i] + mu));
  sol.residual = res;
  const double anchor = u[0];
  for (double& x : u) x -= anchor;
  sol.corrector = GridFunction(grid, std::move(u), Units::dimensionless);
  sol.bounds = measure_bounds(sol.corrector);
  return sol;
}

EffectiveValue richardson_effective_value(const Vector& p, const ModifiedForce& force,
                                          const GridSpec& grid, const std::vector<double>& lambdas,
                                          const CellOptions& options) {
  if (lambdas.size() < 2) throw Error(ErrorCode::invalid_argument, "need at least two lambdas");
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    if (!(lambdas[k] > 0.0) || (k > 0 && !(lambdas[k] < lambdas[k - 1]))) {
      throw Error(ErrorCode::invalid_argument, "lambdas must be positive and strictly decreasing");
    }
  }
  EffectiveValue out;
  out.lambdas = lambdas;
  CellOptions opt = options;
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    CorrectorSolution s = solve_discounted(p, lambdas[k], force, grid, opt);
    out.per_lambda.push_back(s.effective_value);
    // Warm start: the periodic part barely moves between lambdas.
    std::vector<double> next = s.corrector.values();
    const double m = mean_of(next);
    for (double& x : next) x -= m;
    opt.initial = std::move(next);
    opt.initial_speed = -s.effective_value;
    if (k + 1 == lambdas.size()) out.corrector = std::move(s);
  }
  const auto [lo, hi] = std::minmax_element(out.per_lambda.begin(), out.per_lambda.end());
  out.uncertainty = *hi - *lo;
  if (out.uncertainty == 0.0) {
    out.value = out.per_lambda.back();
  } else {
    const double m = static_cast<double>(lambdas.size());
    double sx = 0, sy = 0;
    for (std::size_t k = 0; k < lambdas.size(); ++k) {
      sx += lambdas[k];
      sy += out.per_lambda[k];
    }
    const double xm = sx / m, ym = sy / m;
    double sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < lambdas.size(); ++k) {
      sxx += (lambdas[k] - xm) * (lambdas[k] - xm);
      sxy += (lambdas[k] - xm) * (out.per_lambda[k] - ym);
    }
    out.value = ym - (sxy / sxx) * xm;
  }
  out.ill_conditioned = out.uncertainty > 10.0 * options.stop_tol;
  return out;
}

std::pair<double, double> effective_range(const ModifiedForce& force, const Vector& p) {
  const double r = japanese_bracket(p);
  return {-force.max_over_y(p) * r, -force.min_over_y(p) * r};
}

EffectiveHamiltonianTable::EffectiveHamiltonianTable(int n, double P, int samples,
                                                     std::vector<double> values,
                                                     std::vector<double> uncertainties,
                                                     std::string force_label)
    : n_(n),
      P_(P),
      samples_(samples),
      values_(std::move(values)),
      uncertainties_(std::move(uncertainties)),
      force_label_(std::move(force_label)) {
  if (n_ != 1 && n_ != 2) throw Error(ErrorCode::invalid_argument, "table dimension must be 1 or 2");
  if (!(P_ > 0.0) || !std::isfinite(P_)) throw Error(ErrorCode::invalid_argument, "table coverage must be positive");
  if (samples_ < 2) throw Error(ErrorCode::invalid_argument, "table needs at least two samples per axis");
  const std::size_t expect = n_ == 1 ? samples_ : static_cast<std::size_t>(samples_) * samples_;
  if (values_.size() != expect || uncertainties_.size() != expect) {
    throw Error(ErrorCode::invalid_argument, "table size does not match samples_per_axis^n");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::table_validation, "table holds a non-finite value");
  }
}

Vector EffectiveHamiltonianTable::sample_point(std::size_t k) const {
  Vector p(n_);
  const double d = spacing();
  p[0] = -P_ + static_cast<double>(k % samples_) * d;
  if (n_ == 2) p[1] = -P_ + static_cast<double>(k / samples_) * d;
  return p;
}

double EffectiveHamiltonianTable::value(const double* p, bool* clamped) const {
  const double d = spacing();
  int idx[2] = {0, 0};
  double frac[2] = {0.0, 0.0};
  bool hit = false;
  for (int a = 0; a < n_; ++a) {
    double x = p[a];
    if (x < -P_ || x > P_) {
      hit = true;
      x = std::clamp(x, -P_, P_);
    }
    const double t = (x + P_) / d;
    int i = std::min(static_cast<int>(std::floor(t)), samples_ - 2);
    i = std::max(i, 0);
    idx[a] = i;
    frac[a] = t - i;
  }
  if (clamped) *clamped = hit;
  if (n_ == 1) {
    const double v0 = values_[idx[0]], v1 = values_[idx[0] + 1];
    return frac[0] == 0.0 ? v0 : v0 + frac[0] * (v1 - v0);
  }
  const std::size_t S = samples_;
  const std::size_t b = idx[0] + S * idx[1];
  const double f0 = frac[0], f1 = frac[1];
  const double lo = values_[b] + f0 * (values_[b + 1] - values_[b]);
  const double hi = values_[b + S] + f0 * (values_[b + S + 1] - values_[b + S]);
  return lo + f1 * (hi - lo);
}

double EffectiveHamiltonianTable::value(const Vector& p, bool* clamped) const {
  if (p.size() != n_) throw Error(ErrorCode::invalid_argument, "query dimension mismatch");
  return value(p.data(), clamped);
}

double EffectiveHamiltonianTable::slope_bound(int axis) const {
  const std::size_t S = samples_;
  const std::size_t stride = axis == 0 ? 1 : S;
  double m = 0.0;
  for (std::size_t k = 0; k < values_.size(); ++k) {
    const std::size_t i = axis == 0 ? k % S : k / S;
    if (i + 1 < S) m = std::max(m, std::abs(values_[k + stride] - values_[k]));
  }
  return m / spacing();
}

double EffectiveHamiltonianTable::second_difference_bound(int axis) const {
  const std::size_t S = samples_;
  const std::size_t stride = axis == 0 ? 1 : S;
  double m = 0.0;
  for (std::size_t k = 0; k < values_.size(); ++k) {
    const std::size_t i = axis == 0 ? k % S : k / S;
    if (i >= 1 && i + 1 < S) {
      m = std::max(m, std::abs(values_[k + stride] - 2.0 * values_[k] + values_[k - stride]));
    }
  }
  return m / (spacing() * spacing());
}

double EffectiveHamiltonianTable::symmetry_defect() const {
  const std::size_t S = samples_;
  double m = 0.0;
  for (std::size_t k = 0; k < values_.size(); ++k) {
    std::size_t mirror = S - 1 - k % S;
    if (n_ == 2) mirror += S * (S - 1 - k / S);
    m = std::max(m, std::abs(values_[k] - values_[mirror]));
  }
  return m;
}

EffectiveHamiltonianTable build_table(const ModifiedForce& force, double P, int samples_per_axis,
                                      const GridSpec& grid, const std::vector<double>& lambdas,
                                      const TableOptions& options) {
  if (!(P > 0.0)) throw Error(ErrorCode::invalid_argument, "table coverage must be positive");
  if (P < options.required_coverage) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "table coverage P = %g is below the required %g", P,
                  options.required_coverage);
    throw Error(ErrorCode::precondition, buf);
  }
  if (samples_per_axis < 2) throw Error(ErrorCode::invalid_argument, "need at least two samples per axis");
  const int n = force.dimension();
  const std::size_t count =
      n == 1 ? samples_per_axis : static_cast<std::size_t>(samples_per_axis) * samples_per_axis;

  // Placeholder table for sample positions only.
  const EffectiveHamiltonianTable layout(n, P, samples_per_axis, std::vector<double>(count, 0.0),
                                         std::vector<double>(count, 0.0), force.base().label());
  std::vector<EffectiveValue> results(count);
  parallel_for(count, options.jobs, [&](std::size_t k) {
    results[k] = richardson_effective_value(layout.sample_point(k), force, grid, lambdas, options.cell);
  });

  std::vector<double> values(count), unc(count);
  for (std::size_t k = 0; k < count; ++k) {
    values[k] = results[k].value;
    unc[k] = results[k].uncertainty;
  }
  EffectiveHamiltonianTable table(n, P, samples_per_axis, std::move(values), std::move(unc),
                                  force.base().label());
  for (std::size_t k = 0; k < count; ++k) {
    const Vector p = table.sample_point(k);
    const auto [lo, hi] = effective_range(force, p);
    table.range_low.push_back(lo);
    table.range_high.push_back(hi);
    table.corrector_bounds.push_back(results[k].corrector.bounds);
    if (results[k].ill_conditioned) ++table.ill_conditioned_samples;
    const double v = table.values()[k];
    if (v < lo - options.range_slack || v > hi + options.range_slack) {
      char buf[200];
      std::snprintf(buf, sizeof buf, "table entry %zu at p = %s is %.10g, outside [%.10g, %.10g]", k,
                    format_p(p).c_str(), v, lo, hi);
      throw Error(ErrorCode::table_validation, buf);
    }
  }
  return table;
}

CorrectorBounds corrector_bound_report(const EffectiveHamiltonianTable& table) {
  if (table.corrector_bounds.empty()) {
    throw Error(ErrorCode::precondition, "table carries no corrector byproducts");
  }
  CorrectorBounds b;
  for (const auto& c : table.corrector_bounds) {
    b.sup_v = std::max(b.sup_v, c.sup_v);
    b.sup_dv = std::max(b.sup_dv, c.sup_dv);
    b.sup_d2v = std::max(b.sup_d2v, c.sup_d2v);
  }
  return b;
}

void write_table_csv(const EffectiveHamiltonianTable& table, std::ostream& os) {
  os << "# " << table.dimension() << ", " << format_double(table.coverage()) << ", "
     << table.samples_per_axis() << ", " << table.force_label() << "\n";
  for (std::size_t k = 0; k < table.size(); ++k) {
    const Vector p = table.sample_point(k);
    for (int a = 0; a < p.size(); ++a) os << format_double(p[a]) << ',';
    os << format_double(table.values()[k]) << ',' << format_double(table.uncertainties()[k]) << '\n';
  }
}

void write_table_csv(const EffectiveHamiltonianTable& table, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::io, "cannot open table file for writing: " + path);
  write_table_csv(table, os);
  if (!os) throw Error(ErrorCode::io, "failed writing table file: " + path);
}

EffectiveHamiltonianTable read_table_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# ", 0) != 0) {
    throw Error(ErrorCode::parse, "table file lacks a '# n, P, samples, force' header");
  }
  std::vector<std::string> fields;
  {
    std::stringstream ss(line.substr(2));
    std::string f;
    while (std::getline(ss, f, ',')) {
      const auto b = f.find_first_not_of(' ');
      fields.push_back(b == std::string::npos ? "" : f.substr(b));
    }
  }
  if (fields.size() != 4) throw Error(ErrorCode::parse, "table header needs four fields");
  int n = 0, S = 0;
  double P = 0.0;
  try {
    n = std::stoi(fields[0]);
    P = std::stod(fields[1]);
    S = std::stoi(fields[2]);
  } catch (const std::exception&) {
    throw Error(ErrorCode::parse, "malformed table header: " + line);
  }
  std::vector<double> values, unc;
  std::vector<Vector> points;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw Error(ErrorCode::parse, "malformed table row: " + line);
      }
    }
    if (row.size() != static_cast<std::size_t>(n) + 2) {
      throw Error(ErrorCode::parse, "table row has the wrong number of columns: " + line);
    }
    points.push_back(Eigen::Map<Vector>(row.data(), n));
    values.push_back(row[n]);
    unc.push_back(row[n + 1]);
  }
  EffectiveHamiltonianTable t(n, P, S, std::move(values), std::move(unc), fields[3]);
  for (std::size_t k = 0; k < points.size(); ++k) {
    if ((points[k] - t.sample_point(k)).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, P)) {
      throw Error(ErrorCode::parse, "table rows are not on the uniform p-grid in axis-1-fastest order");
    }
  }
  return t;
}

EffectiveHamiltonianTable read_table_csv_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::io, "cannot open table file: " + path);
  return read_table_csv(is);
}

}  // namespace homog
