#pragma once

#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "curvkit/jet.hpp"

namespace curvkit {

// Axis-aligned coordinate box. Periodic axes accept any coordinate value;
// the component functions must be periodic along them.
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<bool> periodic;

  static Box cube(int n, double lo, double hi);
  int dim() const { return static_cast<int>(lo.size()); }
};

// g_ij as an n*n row-major array of jets in the chart coordinates.
using MetricFn = std::function<JetVec(std::span<const Jet>)>;
using ScalarField = std::function<Jet(std::span<const Jet>)>;
// Maps between coordinate systems, evaluated in jets.
using MapFn = std::function<JetVec(std::span<const Jet>)>;
using PointPredicate = std::function<bool(std::span<const double>)>;
using PointFunction = std::function<double(std::span<const double>)>;

class MetricChart {
 public:
  MetricChart() = default;
  MetricChart(std::string name, int dim, Box domain, MetricFn components);

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  const Box& domain() const { return domain_; }
  // Region used for random sampling in checks; defaults to the domain.
  const Box& sample_region() const { return sample_region_; }
  double injectivity_guard() const { return injectivity_guard_; }

  MetricChart& set_interior(PointPredicate inside);
  MetricChart& set_sample_region(Box region);
  MetricChart& set_injectivity_guard(double radius);
  MetricChart& set_name(std::string name);

  bool contains(std::span<const double> x) const;
  void require_contains(std::span<const double> x) const;

  // Raw evaluation on caller-built coordinate jets.
  JetVec evaluate(std::span<const Jet> x) const { return components_(x); }
  const MetricFn& components() const { return components_; }

  // Truncated Taylor expansion of every g_ij at x.
  JetVec metric_jet(std::span<const double> x, int order) const;
  Eigen::MatrixXd metric_at(std::span<const double> x) const;

 private:
  std::string name_;
  int dim_ = 0;
  Box domain_;
  Box sample_region_;
  MetricFn components_;
  PointPredicate inside_;
  double injectivity_guard_ = 0.0;
};

// Smallest eigenvalue below this fraction of the largest is singular.
inline constexpr double kDegenerateRatio = 1e-10;

// Throws SingularMetricError when g fails the degeneracy threshold.
void require_nondegenerate(const Eigen::MatrixXd& g, std::span<const double> x);

// Values of a jet matrix.
Eigen::MatrixXd values_of(const JetVec& m, int n);

// Deterministic low-discrepancy (Halton) points in the chart's sample region,
// shrunk by `margin` on every side and filtered by the interior predicate.
std::vector<std::vector<double>> sample_points(const MetricChart& chart, int count, int skip = 0,
                                               double margin = 0.05);

struct ChartCheck {
  double max_asymmetry = 0.0;
  double min_eigenvalue = std::numeric_limits<double>::infinity();
  double max_periodic_mismatch = 0.0;
  bool ok = true;
};

// Symmetry, positive definiteness and periodic-face agreement at samples.
ChartCheck validate_chart(const MetricChart& chart, int samples = 20);

}  // namespace curvkit
