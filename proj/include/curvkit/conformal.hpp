#pragma once

#include <functional>
#include <span>
#include <string>

#include "curvkit/chart.hpp"

namespace curvkit {

enum class FactorForm { exponential, power };

// g' = e^{2f} g (exponential) or g' = u^{4/(n-2)} g (power).
class ConformalFactor {
 public:
  static ConformalFactor exponential(int dim, ScalarField f);
  static ConformalFactor power(int dim, ScalarField u);

  FactorForm form() const { return form_; }
  int dim() const { return dim_; }
  const ScalarField& field() const { return field_; }

  // f with g' = e^{2f} g.
  Jet log_factor(std::span<const Jet> x) const;
  // u = e^{(n-2) f / 2}; requires n >= 3.
  Jet power_factor(std::span<const Jet> x) const;

  ConformalFactor to_exponential() const;
  ConformalFactor to_power() const;

 private:
  ConformalFactor(FactorForm form, int dim, ScalarField field) : form_(form), dim_(dim), field_(std::move(field)) {}
  FactorForm form_;
  int dim_;
  ScalarField field_;
};

// The rescaled chart. Power factors are checked for positivity at sample
// points of the chart.
MetricChart conformal_scale(const MetricChart& chart, const ConformalFactor& factor);

// e^{-2f} (Sc + 2(n-1) Delta f - (n-2)(n-1) |grad f|^2), all on g.
double conformal_scalar_formula(const MetricChart& chart, const ScalarField& f, std::span<const double> x);

// (4(n-1)/(n-2)) Delta u - (target u^{(n+2)/(n-2)} - Sc u) at x.
double yamabe_residual(const MetricChart& chart, const ConformalFactor& u, const PointFunction& target_scalar,
                       std::span<const double> x);

struct InequalityCheck {
  double slack = 0.0;           // RHS - LHS
  double direct_scalar = 0.0;   // Sc of e^{2f} g
  double identity_residual = 0.0;  // |Sc' + R - 2(n-1) e^{-2f} slack|
  bool consistent = false;      // sign(slack) agrees with Sc' >= -R
};
// Requires Sc = -R on the chart to 1e-6 (checked at sample points and x).
InequalityCheck inequality1_check(const MetricChart& chart, const ScalarField& f, double R, std::span<const double> x);

// Conformal diffeomorphism F with F^* g_target = lambda^2 g_source.
struct ConformalMap {
  std::string name;
  MetricChart source;
  MetricChart target;
  MapFn forward;       // throws DomainError off its domain
  ScalarField factor;  // lambda on source coordinates
};

// Largest |F^* g_target - lambda^2 g_source| entry relative to the largest
// entry of lambda^2 g_source.
double pullback_residual(const ConformalMap& map, std::span<const double> x);
std::vector<double> map_point(const ConformalMap& map, std::span<const double> x);
double factor_value(const ConformalMap& map, std::span<const double> x);

inline constexpr double kSubsphereGuard = 1e-8;

// Stereographic projection of the radius-R sphere (polar chart) from `pole`
// (a vector in R^{m+1}; the last axis when empty) onto R^m, with factor
// (1 + |x|^2) / (2R).
ConformalMap stereographic_map(int m, double radius = 1.0, std::vector<double> pole = {});
// S^m minus the great S^k through the north pole and e_1..e_k, onto
// H^{k+1} (half-space) x S^{m-k-1} (stereographic); factor (1 + |x|^2)/(2 rho)
// with x the stereographic image and rho its distance to the image plane.
ConformalMap sphere_minus_subsphere(int m, int k);
// Inversion x -> x / |x|^2 of R^m minus the origin, factor |x|^-2.
ConformalMap euclidean_inversion(int m);
ConformalMap identity_map(const MetricChart& chart);

// |Delta phi - ((m-2)/2) |grad phi|^2| for phi = -log lambda, with both
// operators taken in the pulled-back target metric lambda^2 g_source.
// Requires both metrics scalar-flat at the point to 1e-6.
struct LiouvilleResidual {
  double laplacian = 0.0;
  double gradient_norm2 = 0.0;
  double residual = 0.0;
};
LiouvilleResidual liouville_phi_residual(const ConformalMap& map, std::span<const double> x);

}  // namespace curvkit
