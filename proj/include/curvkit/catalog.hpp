#pragma once

// Model metrics. Scalar curvature of each family:
//
//   euclidean(n), flat_torus(n)        0
//   sphere_polar(n, R)                 n(n-1)/R^2
//   sphere_stereographic(n, R)         n(n-1)/R^2
//   hyperbolic_ball(n)                 -n(n-1)
//   hyperbolic_halfspace(n)            -n(n-1)
//   product(A, B)                      Sc(A) + Sc(B)
//   berger(eps, lambda)                2 - eps^2 lambda^2 / 2
//   nil3                               -1/2

#include <string>
#include <vector>

#include "curvkit/chart.hpp"

namespace curvkit {

MetricChart euclidean(int n);
// [0,1]^n with every axis periodic.
MetricChart flat_torus(int n);
// Coordinates (theta_1, ..., theta_{n-1}, phi); theta in (0, pi), phi periodic
// with period 2 pi.
MetricChart sphere_polar(int n, double radius = 1.0);
// 4R^2 / (1 + |x|^2)^2 delta, projecting from the pole y_{n+1} = R.
MetricChart sphere_stereographic(int n, double radius = 1.0);
// 4 / (1 - |x|^2)^2 delta on the open unit ball.
MetricChart hyperbolic_ball(int n);
// delta / x_n^2 on x_n > 0.
MetricChart hyperbolic_halfspace(int n);
// Block-diagonal metric on the concatenated coordinates.
MetricChart product(const MetricChart& a, const MetricChart& b);
// Coordinates (theta, phi, t):
//   d theta^2 + sin^2 theta d phi^2 + eps^2 (dt + lambda (1 - cos theta) d phi)^2.
MetricChart berger(double eps, double lambda);
// dx^2 + dy^2 + (dz - x dy)^2. The metric is invariant under
// (x, y, z) -> (x + 1, y, z + y), (x, y + 1, z), (x, y, z + 1); y and z are
// flagged periodic on [0, 1].
MetricChart nil3();
// Constant rescaling c^2 g.
MetricChart homothety(const MetricChart& chart, double c);

// Embedding of sphere_polar(n, R) into R^{n+1}.
JetVec sphere_polar_embedding(std::span<const Jet> x, double radius = 1.0);
// Inverse stereographic projection: (2x, |x|^2 - 1) R / (1 + |x|^2).
JetVec stereographic_embedding(std::span<const Jet> x, double radius = 1.0);

// Parses names such as "E4", "T4", "S4", "S4polar", "H4", "H3half", "S2xS2",
// "H2xS2", "H3xS3", "nil3", "berger". Spheres default to the stereographic
// chart and hyperbolic factors to the ball.
MetricChart named_metric(const std::string& name);

struct CatalogEntry {
  MetricChart chart;
  double scalar;  // expected constant scalar curvature
};

// Every family at representative parameters, used by the property suites.
std::vector<CatalogEntry> catalog();

}  // namespace curvkit
