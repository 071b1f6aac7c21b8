#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "curvkit/chart.hpp"
#include "curvkit/quadrature.hpp"

namespace curvkit {

// 32 pi^2 chi = (1/6) int Sc^2 - 2 int |Ring|^2 + int |W|^2.
struct Gbc4Breakdown {
  double scal2_term = 0.0;
  double ricci_term = 0.0;
  double weyl_term = 0.0;
  double total = 0.0;
  double chi_estimate = 0.0;
  double volume = 0.0;
};
Gbc4Breakdown gbc4(const Atlas& atlas);
// Integrand (1/6) Sc^2 - 2 |Ring|^2 + |W|^2 at one point.
double gbc4_density(const MetricChart& chart, std::span<const double> x);

// 64 pi^3 chi = (1/225) int Sc^3 - (1/10) int Sc |Ring|^2 + (1/4) int tr(Ring^3),
// for locally conformally flat metrics.
struct Gbc6Breakdown {
  double scal3_term = 0.0;
  double scal_ring_term = 0.0;
  double ring3_term = 0.0;
  double total = 0.0;
  double chi_estimate = 0.0;
  double max_weyl_norm = 0.0;
};
inline constexpr double kLcfTolerance = 1e-6;
Gbc6Breakdown gbc6(const Atlas& atlas);

// int |nabla Ring|^2 against (2/15) int |nabla Sc|^2 - (3/2) int tr(Ring^3)
// - (1/5) int Sc |Ring|^2 on a 6-dimensional LCF atlas.
struct GurskyResult {
  double grad_ring = 0.0;
  double grad_scalar = 0.0;
  double ring3 = 0.0;
  double scalar_ring = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;  // |lhs - rhs| / max(1, |lhs|)
};
GurskyResult gursky_identity_residual(const Atlas& atlas);

// (1 / 48 pi^2) int (|W+|^2 - |W-|^2) with each chart's orientation.
double signature_integral(const Atlas& atlas);

// S(g) = int Sc / Vol^{(n-2)/n}.
double hilbert_einstein(const Atlas& atlas);
// int (a |grad u|^2 + Sc u^2) / (int u^{2n/(n-2)})^{(n-2)/n}, a = 4(n-1)/(n-2).
double yamabe_quotient(const Atlas& atlas, const ScalarField& u);
// int (Sc u^2 + 4 |grad u|^2) / int u^2.
double rayleigh_lambda(const Atlas& atlas, const ScalarField& u);
// int |Sc|^{n/2}.
double l_halfpower(const Atlas& atlas);

// Sharp Sobolev inequality on the round sphere.
struct SobolevResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
};
SobolevResult sobolev_check(const Atlas& sphere, const ScalarField& u);
// Same for many fields in one pass over the nodes.
std::vector<SobolevResult> sobolev_check(const Atlas& sphere, const std::vector<ScalarField>& fields);

// A positive random trigonometric polynomial on the ambient coordinates of the
// unit sphere: 1 + sum of small-amplitude products of sin/cos of y_i.
ScalarField random_trig_polynomial(int dim, std::uint64_t seed);
// Ambient coordinate y_{axis} of the stereographic embedding (first harmonic).
ScalarField sphere_harmonic(int axis);

// Minimization of the Yamabe quotient over the conformal class.
struct DescentOptions {
  int max_iters = 200;
  double initial_step = 0.1;
  double armijo = 1e-4;
  double gradient_tolerance = 1e-10;
  double monotonicity_tolerance = 1e-12;
  // Converged after three accepted steps that each lower the quotient by
  // less than this (relative).
  double stall_tolerance = 1e-13;
};
struct DescentStep {
  int iteration = 0;
  double quotient = 0.0;
  double scalar_variance = 0.0;
  double step = 0.0;
  double gradient_norm = 0.0;
  int halvings = 0;
};
struct DescentResult {
  std::vector<DescentStep> trajectory;
  std::vector<double> coefficients;
  double final_quotient = 0.0;
  double final_scalar_variance = 0.0;
  double final_scalar_mean = 0.0;
  bool monotone = true;
  bool converged = false;
  int rejected_nonpositive = 0;
};
DescentResult yamabe_descent(const Atlas& atlas, const ScalarField& u0, const DescentOptions& options = {});

// Hoelder and volume inequalities for e^{2f} g when Sc = -R.
struct ConformalVolumeReport {
  bool precondition_ok = false;
  double min_scalar_margin = 0.0;     // min over nodes of Sc' + R
  double volume = 0.0;                // Vol(g)
  double exp2f_integral = 0.0;        // int e^{2f}
  double new_volume = 0.0;            // Vol(g') = int e^{nf}
  double exp2f_slack = 0.0;           // int e^{2f} - Vol(g)
  double volume_slack = 0.0;          // Vol(g') - Vol(g)
  double holder_slack = 0.0;          // (int e^{nf})^{2/n} Vol^{(n-2)/n} - int e^{2f}
};
ConformalVolumeReport conformal_volume_check(const Atlas& atlas, double R, const ScalarField& f);
// Unconditional Hoelder inequality part only.
double holder_slack(const Atlas& atlas, const ScalarField& f);

// int u Delta u and int |grad u|^2 on a closed atlas.
struct IdentityPair {
  double lhs = 0.0;
  double rhs = 0.0;
};
IdentityPair integration_identity_check(const Atlas& atlas, const ScalarField& u);

}  // namespace curvkit
