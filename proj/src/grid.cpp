#include "homog/grid.hpp"

#include "homog/error.hpp"
#include "homog/format.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace homog {

namespace {

int wrap(int i, int n) {
  int r = i % n;
  return r < 0 ? r + n : r;
}

double clamp_slope(double diff, const GridSpec& s) {
  const double cap = *s.extension_cap * s.h;
  return std::clamp(diff, -cap, cap);
}

bool is_boundary(const GridSpec& s, const MultiIndex& idx) {
  for (int a = 0; a < s.n; ++a) {
    if (idx[a] <= 0 || idx[a] >= s.points - 1) return true;
  }
  return false;
}

void check_index(const GridSpec& s, const MultiIndex& idx) {
  for (int a = 0; a < s.n; ++a) {
    if (idx[a] < 0 || idx[a] >= s.points) {
      throw Error(ErrorCode::out_of_domain, "grid index out of range");
    }
  }
  if (s.topology == Topology::box && !s.extension_cap && is_boundary(s, idx)) {
    throw Error(ErrorCode::out_of_domain,
                "boundary stencil on a box without an extension rule");
  }
}

}  // namespace

const char* to_string(Topology t) { return t == Topology::torus ? "torus" : "box"; }

Topology parse_topology(const std::string& name) {
  if (name == "torus") return Topology::torus;
  if (name == "box") return Topology::box;
  throw Error(ErrorCode::parse, "unknown topology '" + name + "'");
}

GridSpec GridSpec::torus(int n, int points) {
  if (n < 1 || n > 2) throw Error(ErrorCode::invalid_argument, "grid dimension must be 1 or 2");
  if (points < 8) throw Error(ErrorCode::invalid_argument, "grids need at least 8 points per axis");
  GridSpec s;
  s.n = n;
  s.topology = Topology::torus;
  s.points = points;
  s.half_extent = 0.5;
  s.h = 1.0 / points;
  return s;
}

GridSpec GridSpec::box(int n, int points, double L, std::optional<double> extension_cap) {
  if (n < 1 || n > 2) throw Error(ErrorCode::invalid_argument, "grid dimension must be 1 or 2");
  if (points < 8) throw Error(ErrorCode::invalid_argument, "grids need at least 8 points per axis");
  if (!(L > 0)) throw Error(ErrorCode::invalid_argument, "box half-extent must be positive");
  if (extension_cap && !(*extension_cap >= 0)) {
    throw Error(ErrorCode::invalid_argument, "extension slope cap must be non-negative");
  }
  GridSpec s;
  s.n = n;
  s.topology = Topology::box;
  s.points = points;
  s.half_extent = L;
  s.h = 2.0 * L / points;
  s.extension_cap = extension_cap;
  return s;
}

std::size_t GridSpec::size() const {
  return n == 1 ? static_cast<std::size_t>(points)
                : static_cast<std::size_t>(points) * static_cast<std::size_t>(points);
}

double GridSpec::coordinate(int i) const {
  return topology == Topology::torus ? i * h : -half_extent + i * h;
}

Vector GridSpec::position(std::size_t flat_index) const {
  Vector x(n);
  const auto m = multi(flat_index);
  for (int a = 0; a < n; ++a) x[a] = coordinate(m[a]);
  return x;
}

std::size_t GridSpec::flat(int i0, int i1) const {
  return static_cast<std::size_t>(i0) + static_cast<std::size_t>(points) * static_cast<std::size_t>(i1);
}

std::array<int, 2> GridSpec::multi(std::size_t f) const {
  return {static_cast<int>(f % points), n == 2 ? static_cast<int>(f / points) : 0};
}

bool GridSpec::same_layout(const GridSpec& o) const {
  return n == o.n && topology == o.topology && points == o.points && h == o.h &&
         half_extent == o.half_extent;
}

GridFunction::GridFunction(GridSpec spec, std::vector<double> values, Units units)
    : spec_(spec), values_(std::move(values)), units_(units) {
  if (values_.size() != spec_.size()) {
    throw Error(ErrorCode::invalid_argument, "grid function size does not match its spec");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::invalid_argument, "grid function has non-finite values");
  }
}

GridFunction GridFunction::constant(const GridSpec& spec, double value, Units units) {
  return GridFunction(spec, std::vector<double>(spec.size(), value), units);
}

GridFunction GridFunction::sample(const GridSpec& spec,
                                  const std::function<double(const Vector&)>& fn, Units units) {
  std::vector<double> v(spec.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(spec.position(i));
  return GridFunction(spec, std::move(v), units);
}

double value_at(const GridSpec& spec, std::span<const double> values, int i0, int i1) {
  const int N = spec.points;
  if (spec.topology == Topology::torus) {
    return values[spec.flat(wrap(i0, N), spec.n == 2 ? wrap(i1, N) : 0)];
  }
  auto inside = [N](int i) { return i >= 0 && i < N; };
  if (inside(i0) && (spec.n == 1 || inside(i1))) return values[spec.flat(i0, i1)];
  if (!spec.extension_cap) {
    throw Error(ErrorCode::out_of_domain, "ghost value requested on a box without an extension rule");
  }
  if (i0 < -1 || i0 > N || (spec.n == 2 && (i1 < -1 || i1 > N))) {
    throw Error(ErrorCode::out_of_domain, "only one ghost layer is available");
  }
  // Extend along axis 2 first, then axis 1.
  if (spec.n == 2 && !inside(i1)) {
    const int edge = i1 < 0 ? 0 : N - 1;
    const int step = i1 < 0 ? 1 : -1;
    const double e = value_at(spec, values, i0, edge);
    return e - clamp_slope(value_at(spec, values, i0, edge + step) - e, spec);
  }
  const int edge = i0 < 0 ? 0 : N - 1;
  const int step = i0 < 0 ? 1 : -1;
  const double e = values[spec.flat(edge, i1)];
  return e - clamp_slope(values[spec.flat(edge + step, i1)] - e, spec);
}

void fill_padded(const GridSpec& spec, std::span<const double> values, std::vector<double>& out) {
  const int N = spec.points;
  const int P = N + 2;
  if (spec.n == 1) {
    out.resize(static_cast<std::size_t>(P));
    std::copy(values.begin(), values.end(), out.begin() + 1);
    out[0] = value_at(spec, values, -1);
    out[P - 1] = value_at(spec, values, N);
    return;
  }
  out.resize(static_cast<std::size_t>(P) * P);
  for (int j = -1; j <= N; ++j) {
    double* row = out.data() + static_cast<std::size_t>(j + 1) * P;
    if (j >= 0 && j < N) {
      std::copy_n(values.data() + spec.flat(0, j), N, row + 1);
      row[0] = value_at(spec, values, -1, j);
      row[P - 1] = value_at(spec, values, N, j);
    } else {
      for (int i = -1; i <= N; ++i) row[i + 1] = value_at(spec, values, i, j);
    }
  }
}

double GridFunction::at(int i0, int i1) const { return value_at(spec_, values_, i0, i1); }

void GridFunction::fill_padded(std::vector<double>& out) const {
  homog::fill_padded(spec_, values_, out);
}

Vector central_gradient(const GridFunction& f, const MultiIndex& idx) {
  const auto& s = f.spec();
  check_index(s, idx);
  Vector g(s.n);
  const double inv = 1.0 / (2.0 * s.h);
  if (s.n == 1) {
    g[0] = (f.at(idx[0] + 1) - f.at(idx[0] - 1)) * inv;
  } else {
    g[0] = (f.at(idx[0] + 1, idx[1]) - f.at(idx[0] - 1, idx[1])) * inv;
    g[1] = (f.at(idx[0], idx[1] + 1) - f.at(idx[0], idx[1] - 1)) * inv;
  }
  return g;
}

Matrix central_hessian(const GridFunction& f, const MultiIndex& idx) {
  const auto& s = f.spec();
  check_index(s, idx);
  Matrix H(s.n, s.n);
  const double inv = 1.0 / (s.h * s.h);
  const int i = idx[0], j = idx[1];
  if (s.n == 1) {
    H(0, 0) = (f.at(i + 1) - 2.0 * f.at(i) + f.at(i - 1)) * inv;
    return H;
  }
  const double c = f.at(i, j);
  H(0, 0) = (f.at(i + 1, j) - 2.0 * c + f.at(i - 1, j)) * inv;
  H(1, 1) = (f.at(i, j + 1) - 2.0 * c + f.at(i, j - 1)) * inv;
  const double mixed =
      (f.at(i + 1, j + 1) - f.at(i + 1, j - 1) - f.at(i - 1, j + 1) + f.at(i - 1, j - 1)) *
      0.25 * inv;
  H(0, 1) = H(1, 0) = mixed;
  return H;
}

double sup_norm(const GridFunction& f, std::optional<double> window) {
  double m = 0.0;
  const auto& s = f.spec();
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (window && s.position(i).norm() > *window) continue;
    m = std::max(m, std::abs(f[i]));
  }
  return m;
}

double sup_norm_diff(const GridFunction& f, const GridFunction& g, std::optional<double> window) {
  if (!f.spec().same_layout(g.spec())) {
    throw Error(ErrorCode::invalid_argument, "sup_norm_diff needs identical grid specs");
  }
  double m = 0.0;
  const auto& s = f.spec();
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (window && s.position(i).norm() > *window) continue;
    m = std::max(m, std::abs(f[i] - g[i]));
  }
  return m;
}

double discrete_lipschitz(const GridFunction& f) {
  const auto& s = f.spec();
  const bool interior_only = s.topology == Topology::box && !s.extension_cap;
  double m = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    const auto idx = s.multi(k);
    if (interior_only && is_boundary(s, idx)) continue;
    m = std::max(m, central_gradient(f, idx).norm());
  }
  return m;
}

void write_csv(const GridFunction& f, std::ostream& os) {
  const auto& s = f.spec();
  os << "# " << s.n << ", " << to_string(s.topology) << ", " << s.points << ", "
     << format_double(s.h) << '\n';
  for (double v : f.values()) os << format_double(v) << '\n';
}

void write_csv(const GridFunction& f, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::io, "cannot write " + path);
  write_csv(f, os);
  if (!os) throw Error(ErrorCode::io, "write failed for " + path);
}

GridFunction read_csv(std::istream& is) {
  std::string header;
  if (!std::getline(is, header) || header.rfind("# ", 0) != 0) {
    throw Error(ErrorCode::parse, "grid CSV must start with '# n, topology, points_per_axis, h'");
  }
  std::stringstream hs(header.substr(2));
  std::string field;
  std::vector<std::string> fields;
  while (std::getline(hs, field, ',')) {
    field.erase(0, field.find_first_not_of(' '));
    fields.push_back(field);
  }
  if (fields.size() != 4) throw Error(ErrorCode::parse, "grid CSV header needs four fields");
  GridSpec spec;
  try {
    const int n = std::stoi(fields[0]);
    const Topology topo = parse_topology(fields[1]);
    const int points = std::stoi(fields[2]);
    const double h = std::stod(fields[3]);
    spec = topo == Topology::torus ? GridSpec::torus(n, points)
                                   : GridSpec::box(n, points, 0.5 * h * points);
    spec.h = h;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::parse, std::string("bad grid CSV header: ") + e.what());
  }
  std::vector<double> values;
  values.reserve(spec.size());
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    try {
      values.push_back(std::stod(line));
    } catch (const std::exception&) {
      throw Error(ErrorCode::parse, "bad grid CSV value '" + line + "'");
    }
  }
  return GridFunction(spec, std::move(values));
}

GridFunction read_csv_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::io, "cannot read " + path);
  return read_csv(is);
}

}  // namespace homog
