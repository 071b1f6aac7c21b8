#pragma once

#include <span>
#include <string>
#include <vector>

#include "curvkit/chart.hpp"

namespace curvkit {

// Components a_i of a 1-form on the base chart.
using OneForm = std::function<JetVec(std::span<const Jet>)>;

// Circle bundle over a base chart with connection form dt + a and fiber
// scale epsilon; the fiber coordinate t has period 2 pi.
struct ConnectionData {
  MetricChart base;
  OneForm potential;
  double epsilon = 1.0;
};

// Validates epsilon > 0 and dimension >= 2.
ConnectionData make_connection(MetricChart base, OneForm potential, double epsilon);

OneForm zero_potential(int n);
// (lambda / 2)(x dy - y dx) on the first two coordinates, omega = lambda dx^dy.
OneForm flat_potential(double lambda);
// lambda (1 - cos theta) dphi on the polar chart of S^2, omega = lambda dA.
OneForm sphere_potential(double lambda);
// (lambda / y) dx on the upper half-plane, omega = lambda dA.
OneForm halfplane_potential(double lambda);
// a + d chi.
OneForm gauge_shift(OneForm a, ScalarField chi);

// g_B + eps^2 a (x) a in the base block, eps^2 a in the mixed block, eps^2 on dt^2.
MetricChart connection_metric(const ConnectionData& data);

// omega_ij = d_i a_j - d_j a_i at a base point, row-major.
std::vector<double> curvature_form(const ConnectionData& data, std::span<const double> x);
// max |d omega| component (cyclic sum); zero up to roundoff for omega = da.
double closedness_residual(const ConnectionData& data, std::span<const double> x);
// sum over a g_B-orthonormal frame of omega(e_a, e_b)^2 (both orders).
double omega_hs_norm(const ConnectionData& data, std::span<const double> x);

// Sc_B - (eps^2 / 4) |omega|^2 at the base point.
double oneill_scalar(const ConnectionData& data, std::span<const double> x);
// |Sc of the connection metric at p - oneill_scalar at the base point|;
// p has the fiber coordinate last.
double oneill_residual(const ConnectionData& data, std::span<const double> p);

// g(nabla_X~ Y~, V) for horizontal lifts of constant base vectors against
// -(eps/2) omega(X, Y), V = d_t / eps.
struct ATensorCheck {
  double computed = 0.0;
  double expected = 0.0;
  double residual = 0.0;
};
ATensorCheck a_tensor_check(const ConnectionData& data, std::span<const double> X, std::span<const double> Y,
                            std::span<const double> p);

// max_k |Gamma^k_tt|: zero iff the fiber circles are geodesics.
double fiber_geodesic_residual(const ConnectionData& data, std::span<const double> p);

// Least-squares fit of Sc(g_eps) at p against eps^2.
struct EpsilonFit {
  double slope = 0.0;
  double intercept = 0.0;
  double expected_slope = 0.0;      // -|omega|^2 / 4
  double expected_intercept = 0.0;  // Sc_B
};
EpsilonFit epsilon_slope_fit(const MetricChart& base, const OneForm& potential, std::span<const double> p,
                             std::span<const double> epsilons);

}  // namespace curvkit
