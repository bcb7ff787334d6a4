#pragma once

#include "homog/forcing.hpp"

#include <array>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace homog {

enum class Topology { torus, box };

const char* to_string(Topology t);
Topology parse_topology(const std::string& name);

// Uniform grid on the unit torus [0,1)^n or the box [-L, L)^n. Nodes sit at
// i*h (torus) or -L + i*h (box), so the origin is always a node when the
// box has an even number of points per axis.
struct GridSpec {
  int n = 1;
  Topology topology = Topology::torus;
  int points = 0;
  double half_extent = 0.5;  // L for boxes
  double h = 0.0;
  // Ghost values continue the one-sided slope clamped to this cap.
  std::optional<double> extension_cap;

  static GridSpec torus(int n, int points);
  static GridSpec box(int n, int points, double L,
                      std::optional<double> extension_cap = std::nullopt);

  std::size_t size() const;
  double coordinate(int i) const;
  Vector position(std::size_t flat) const;
  std::size_t flat(int i0, int i1 = 0) const;
  std::array<int, 2> multi(std::size_t flat) const;

  bool same_layout(const GridSpec& o) const;
};

using MultiIndex = std::array<int, 2>;

enum class Units { height, dimensionless };

// Values stored with axis x_1 fastest: flat = i1 + points * i2.
class GridFunction {
 public:
  GridFunction(GridSpec spec, std::vector<double> values, Units units = Units::height);
  static GridFunction constant(const GridSpec& spec, double value,
                               Units units = Units::height);
  static GridFunction sample(const GridSpec& spec,
                             const std::function<double(const Vector&)>& fn,
                             Units units = Units::height);

  const GridSpec& spec() const { return spec_; }
  const std::vector<double>& values() const { return values_; }
  Units units() const { return units_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  // Value at a possibly out-of-range index: wraps on the torus, one ghost
  // layer via the clamped linear extension on boxes.
  double at(int i0, int i1 = 0) const;

  // Copy into an array with one ghost layer per side: (points+2)^n entries.
  void fill_padded(std::vector<double>& out) const;

 private:
  GridSpec spec_;
  std::vector<double> values_;
  Units units_;
};

// Same as GridFunction::at / fill_padded on a raw value array.
double value_at(const GridSpec& spec, std::span<const double> values, int i0, int i1 = 0);
void fill_padded(const GridSpec& spec, std::span<const double> values, std::vector<double>& out);

Vector central_gradient(const GridFunction& f, const MultiIndex& idx);
Matrix central_hessian(const GridFunction& f, const MultiIndex& idx);

/// Euclidean window |x| <= radius; nullopt means the whole grid.
double sup_norm(const GridFunction& f, std::optional<double> window = std::nullopt);
double sup_norm_diff(const GridFunction& f, const GridFunction& g,
                     std::optional<double> window = std::nullopt);

/// max |central_gradient| over the grid. Boxes without an extension rule
/// only use interior nodes.
double discrete_lipschitz(const GridFunction& f);

void write_csv(const GridFunction& f, std::ostream& os);
void write_csv(const GridFunction& f, const std::string& path);
GridFunction read_csv(std::istream& is);
GridFunction read_csv_file(const std::string& path);

}  // namespace homog
