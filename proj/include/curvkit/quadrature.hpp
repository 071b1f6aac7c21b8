#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "curvkit/chart.hpp"

namespace curvkit {

enum class RuleKind { gauss_legendre, periodic_trapezoid };

struct AxisRule {
  RuleKind kind = RuleKind::gauss_legendre;
  std::vector<double> cells;  // cell edges (GL) or {lo, hi} (trapezoid)
  std::vector<double> nodes;
  std::vector<double> weights;

  int size() const { return static_cast<int>(nodes.size()); }
};

// Gauss-Legendre with n nodes on [a, b].
AxisRule gauss_legendre(int n, double a, double b);
// n nodes per cell on consecutive cells with the given edges.
AxisRule gauss_legendre_cells(int n_per_cell, std::vector<double> edges);
// n equally spaced nodes on the period [a, b).
AxisRule periodic_trapezoid(int n, double a, double b);

// Tensor product of axis rules.
class QuadratureGrid {
 public:
  QuadratureGrid() = default;
  explicit QuadratureGrid(std::vector<AxisRule> axes);

  int dim() const { return static_cast<int>(axes_.size()); }
  const std::vector<AxisRule>& axes() const { return axes_; }
  std::size_t size() const { return size_; }
  // Node `flat` (last axis fastest); returns its weight.
  double node(std::size_t flat, std::span<double> q) const;
  std::vector<int> node_counts() const;

 private:
  std::vector<AxisRule> axes_;
  std::size_t size_ = 0;
};

// Parameter q -> chart point x; returns |det dx/dq|.
using Parameterization = std::function<double(std::span<const double> q, std::span<double> x)>;

struct Patch {
  MetricChart chart;
  QuadratureGrid grid;
  Parameterization param;  // identity when empty
  PointFunction partition; // 1 when empty
  int orientation = 1;
  MapFn embedding;         // chart point -> ambient point; identity when empty
};

// A field given on ambient coordinates, read in a patch's chart coordinates.
ScalarField on_patch(const Patch& patch, const ScalarField& ambient);
std::vector<double> ambient_point(const Patch& patch, std::span<const double> x);

// One or more charts with a partition of unity and per-chart quadrature.
class Atlas {
 public:
  std::string name;
  std::vector<Patch> patches;
  bool closed = false;
  // max |sum of partition weights - 1| over probe points of the overlaps.
  std::function<double()> partition_check;

  int dim() const { return patches.empty() ? 0 : patches[0].chart.dim(); }
  std::size_t node_count() const;

  struct Node {
    int patch = 0;
    double weight = 0.0;  // rule weight * Jacobian * partition, without sqrt(det g)
  };
  // Node `flat` over the concatenated patch grids; writes the chart point.
  Node node(std::size_t flat, std::span<double> x) const;
};

inline constexpr double kPartitionTolerance = 1e-10;
inline constexpr double kOverlapInner = 0.8;
inline constexpr double kOverlapOuter = 1.25;

// Weight of the north chart at stereographic radius r: 1 for r <= 0.8, 0 for
// r >= 1.25, and psi(r) + psi(1/r) = 1.
double sphere_partition(double r);

// Default nodes per axis: 24 up to dimension 4, 12 beyond.
int default_nodes(int dim);

// Two stereographic charts of the radius-R sphere; in each chart a
// hyperspherical rule: GL in chi = 2 atan|x| on the cells |x| in [0, 0.8] and
// [0.8, 1.25] with n/2 nodes each, polar angles GL with n nodes, azimuth
// trapezoid with n nodes.
Atlas sphere_atlas(int dim, int nodes = 0, double radius = 1.0);
// [0,1]^n periodic trapezoid.
Atlas torus_atlas(int dim, int nodes = 0);
Atlas product_atlas(const Atlas& a, const Atlas& b);
// Fundamental domain [0,1)^3 of the nil3 lattice, trapezoid on every axis.
Atlas nil3_atlas(int nodes = 0);
// A coordinate box of a chart with GL per axis; not closed.
Atlas box_atlas(const MetricChart& chart, const Box& box, int nodes);
// "S4", "S6", "T4", "S2xS2", "nil3", ...
Atlas named_atlas(const std::string& name, int nodes = 0);

// Same atlas with every chart rescaled by c^2.
Atlas homothety(const Atlas& atlas, double c);
// Same atlas with every chart's metric replaced by e^{2f} g (f on ambient coordinates).
Atlas conformal_atlas(const Atlas& atlas, const ScalarField& f);
// Orientation of every patch reversed.
Atlas reversed(const Atlas& atlas);

// Pointwise integrand: writes `width` values at chart point x of a patch.
using Density = std::function<void(const Patch& patch, std::span<const double> x, std::span<double> out)>;

// sum over nodes of weight * sqrt(det g) * density; bit-stable.
std::vector<double> integrate(const Atlas& atlas, const Density& density, int width);
double integrate(const Atlas& atlas, const std::function<double(const Patch&, std::span<const double>)>& density);
double volume(const Atlas& atlas);

}  // namespace curvkit
