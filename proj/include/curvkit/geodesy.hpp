#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "curvkit/chart.hpp"

namespace curvkit {

struct GeodesicState {
  std::vector<double> position;
  std::vector<double> velocity;
  double t = 0.0;
  int steps = 0;
  int rejected = 0;
  double tolerance = 0.0;
};

inline constexpr double kGeodesicTolerance = 1e-10;

// Adaptive Dormand-Prince 5(4) integration of the geodesic equation for
// parameter time t. Throws DomainError (with the exit point) if the curve
// leaves the chart, Error on step-size underflow.
GeodesicState geodesic_shoot(const MetricChart& chart, std::span<const double> x, std::span<const double> v, double t,
                             double tol = kGeodesicTolerance);

enum class VolumeMethod { polar, monte_carlo };

struct VolumeOptions {
  VolumeMethod method = VolumeMethod::polar;
  int radial_nodes = 12;
  int angular_nodes = 12;  // per polar angle; the azimuth uses the same count
  int samples = 4096;      // Monte Carlo
  std::uint64_t seed = 1;
  double tol = 1e-13;
};

struct VolumeEstimate {
  double value = 0.0;
  double error = 0.0;  // standard error (Monte Carlo) or step-halving difference (polar)
};

// Volume of the geodesic ball B_r(x) from the Jacobian of exp_x. Requires
// r below the chart's injectivity guard.
VolumeEstimate ball_volume(const MetricChart& chart, std::span<const double> x, double r,
                           const VolumeOptions& options = {});

// Volume of the Euclidean n-ball of radius r.
double euclidean_ball_volume(int n, double r);

// Vol_E(B_r) (1 + c2 r^2 + c4 r^4) with
//   c2 = -Sc / (6(n+2)),
//   c4 = (-3|Rm|^2 + 8|Ric|^2 + 5 Sc^2 - 18 tr Hess Sc) / (360 (n+2)(n+4)),
// i.e. +18 Delta Sc with the positive-spectrum Laplacian.
struct GrayCoefficients {
  double c2 = 0.0;
  double c4 = 0.0;
  double laplacian_scalar = 0.0;
};
GrayCoefficients gray_coefficients(const MetricChart& chart, std::span<const double> x);
double gray_expansion(const MetricChart& chart, std::span<const double> x, double r);

struct ExpansionRow {
  double r = 0.0;
  double ball = 0.0;
  double gray = 0.0;
  double raw_ratio = 0.0;  // |ball - gray| / r^6
  double ratio = 0.0;      // |ball - gray| / (Vol_E(B_r) r^6)
};
std::vector<ExpansionRow> expansion_compare(const MetricChart& chart, std::span<const double> x,
                                            std::span<const double> radii, const VolumeOptions& options = {});

}  // namespace curvkit
