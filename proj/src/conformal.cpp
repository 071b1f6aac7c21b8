#include "curvkit/conformal.hpp"

#include <cmath>
#include <numbers>

#include "curvkit/catalog.hpp"
#include "curvkit/curvature.hpp"
#include "curvkit/error.hpp"

namespace curvkit {

namespace {

Jet norm_squared(std::span<const Jet> x) {
  Jet s = x[0].zero_like();
  for (const Jet& xi : x) s += xi * xi;
  return s;
}

double plain_value(const ScalarField& f, std::span<const double> x) {
  const JetVec xs = coordinate_jets(x, 0);
  return f(xs).value();
}

}  // namespace

ConformalFactor ConformalFactor::exponential(int dim, ScalarField f) {
  if (dim < 1) throw InvalidArgument("conformal factor: dimension must be positive");
  return ConformalFactor(FactorForm::exponential, dim, std::move(f));
}

ConformalFactor ConformalFactor::power(int dim, ScalarField u) {
  if (dim < 3) throw PreconditionError("power-form conformal factor needs n >= 3");
  return ConformalFactor(FactorForm::power, dim, std::move(u));
}

Jet ConformalFactor::log_factor(std::span<const Jet> x) const {
  if (form_ == FactorForm::exponential) return field_(x);
  const Jet u = field_(x);
  if (!(u.value() > 0.0)) throw PreconditionError("power-form conformal factor must be positive");
  return (2.0 / (dim_ - 2.0)) * log(u);
}

Jet ConformalFactor::power_factor(std::span<const Jet> x) const {
  if (dim_ < 3) throw PreconditionError("power-form conformal factor needs n >= 3");
  if (form_ == FactorForm::power) return field_(x);
  return exp(0.5 * (dim_ - 2.0) * field_(x));
}

ConformalFactor ConformalFactor::to_exponential() const {
  if (form_ == FactorForm::exponential) return *this;
  const ConformalFactor self = *this;
  return exponential(dim_, [self](std::span<const Jet> x) { return self.log_factor(x); });
}

ConformalFactor ConformalFactor::to_power() const {
  if (form_ == FactorForm::power) return *this;
  const ConformalFactor self = *this;
  return power(dim_, [self](std::span<const Jet> x) { return self.power_factor(x); });
}

MetricChart conformal_scale(const MetricChart& chart, const ConformalFactor& factor) {
  if (factor.dim() != chart.dim()) throw InvalidArgument("conformal factor dimension does not match the chart");
  if (factor.form() == FactorForm::power) {
    for (const auto& x : sample_points(chart, 64))
      if (!(plain_value(factor.field(), x) > 0.0))
        throw PreconditionError("power-form conformal factor is nonpositive on the chart");
  }
  const MetricFn base = chart.components();
  const ConformalFactor fac = factor;
  MetricChart out(chart.name() + "'", chart.dim(), chart.domain(), [base, fac](std::span<const Jet> x) {
    JetVec g = base(x);
    const Jet scale = exp(2.0 * fac.log_factor(x));
    for (Jet& gij : g) gij = gij * scale;
    return g;
  });
  out.set_interior([chart](std::span<const double> x) { return chart.contains(x); });
  out.set_sample_region(chart.sample_region());
  return out;
}

double conformal_scalar_formula(const MetricChart& chart, const ScalarField& f, std::span<const double> x) {
  const double n = chart.dim();
  const double sc = curvature_at(chart, x).scalar;
  const double lap = scalar_laplacian(chart, f, x);
  const double grad = gradient_norm2(chart, f, x);
  const double fv = plain_value(f, x);
  return std::exp(-2.0 * fv) * (sc + 2.0 * (n - 1) * lap - (n - 2) * (n - 1) * grad);
}

double yamabe_residual(const MetricChart& chart, const ConformalFactor& u, const PointFunction& target_scalar,
                       std::span<const double> x) {
  const int n = chart.dim();
  if (n < 3) throw PreconditionError("yamabe_residual needs n >= 3");
  if (u.dim() != n) throw InvalidArgument("conformal factor dimension does not match the chart");
  const ConformalFactor p = u.to_power();
  const double uv = plain_value(p.field(), x);
  if (!(uv > 0.0)) throw PreconditionError("yamabe_residual needs u > 0");
  const double a = 4.0 * (n - 1) / (n - 2.0);
  const double lap = scalar_laplacian(chart, p.field(), x);
  const double sc = curvature_at(chart, x).scalar;
  return a * lap - (target_scalar(x) * std::pow(uv, (n + 2.0) / (n - 2.0)) - sc * uv);
}

InequalityCheck inequality1_check(const MetricChart& chart, const ScalarField& f, double R, std::span<const double> x) {
  if (!(R > 0.0)) throw InvalidArgument("inequality1_check: R must be positive");
  auto points = sample_points(chart, 8);
  points.emplace_back(x.begin(), x.end());
  for (const auto& p : points) {
    const double sc = curvature_at(chart, p).scalar;
    if (std::abs(sc + R) > 1e-6) throw PreconditionError("inequality1_check: Sc is not constant -R on the chart");
  }
  const double n = chart.dim();
  const double fv = plain_value(f, x);
  const double lhs = -scalar_laplacian(chart, f, x) + 0.5 * (n - 2) * gradient_norm2(chart, f, x);
  const double rhs = R / (2.0 * (n - 1)) * (std::exp(2.0 * fv) - 1.0);
  InequalityCheck out;
  out.slack = rhs - lhs;
  out.direct_scalar = curvature_at(conformal_scale(chart, ConformalFactor::exponential(chart.dim(), f)), x).scalar;
  out.identity_residual = std::abs(out.direct_scalar + R - 2.0 * (n - 1) * std::exp(-2.0 * fv) * out.slack);
  const bool slack_ok = out.slack >= 0.0, scalar_ok = out.direct_scalar >= -R;
  out.consistent = slack_ok == scalar_ok || std::abs(out.slack) <= 1e-12;
  return out;
}

std::vector<double> map_point(const ConformalMap& map, std::span<const double> x) {
  map.source.require_contains(x);
  const JetVec xs = coordinate_jets(x, 0);
  const JetVec y = map.forward(xs);
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i].value();
  return out;
}

double factor_value(const ConformalMap& map, std::span<const double> x) {
  map.source.require_contains(x);
  return plain_value(map.factor, x);
}

double pullback_residual(const ConformalMap& map, std::span<const double> x) {
  map.source.require_contains(x);
  const int n = map.source.dim(), m = map.target.dim();
  const JetVec xs = coordinate_jets(x, 1);
  const JetVec y = map.forward(xs);
  if (static_cast<int>(y.size()) != m) throw InvalidArgument("conformal map output dimension mismatch");
  Eigen::MatrixXd jac(m, n);
  std::vector<double> yv(m);
  for (int a = 0; a < m; ++a) {
    yv[a] = y[a].value();
    for (int i = 0; i < n; ++i) jac(a, i) = y[a].d(i);
  }
  const Eigen::MatrixXd pulled = jac.transpose() * map.target.metric_at(yv) * jac;
  const double lambda = map.factor(xs).value();
  const Eigen::MatrixXd expected = lambda * lambda * map.source.metric_at(x);
  return (pulled - expected).cwiseAbs().maxCoeff() / expected.cwiseAbs().maxCoeff();
}

namespace {

MetricChart circle_chart(double radius) {
  Box box{{0.0}, {2.0 * std::numbers::pi}, {true}};
  const double r2 = radius * radius;
  MetricChart c("S1", 1, box, [r2](std::span<const Jet> x) { return JetVec{Jet(x[0].basis(), r2)}; });
  c.set_injectivity_guard(std::numbers::pi * radius);
  return c;
}

// Unit vector w in R^{d+1} to stereographic coordinates from the last axis.
JetVec sphere_coordinates(const JetVec& w) {
  const int d = static_cast<int>(w.size()) - 1;
  const Jet denom = 1.0 - w[d];
  if (denom.value() < kSubsphereGuard) throw DomainError("point at the pole of the sphere-factor chart");
  JetVec z;
  for (int i = 0; i < d; ++i) z.push_back(w[i] / denom);
  return z;
}

}  // namespace

ConformalMap stereographic_map(int m, double radius, std::vector<double> pole) {
  if (m < 1) throw InvalidArgument("stereographic_map: m must be >= 1");
  if (!(radius > 0.0)) throw InvalidArgument("stereographic_map: radius must be positive");
  if (pole.empty()) {
    pole.assign(m + 1, 0.0);
    pole[m] = 1.0;
  }
  if (static_cast<int>(pole.size()) != m + 1) throw InvalidArgument("stereographic_map: pole must lie in R^{m+1}");
  Eigen::VectorXd p = Eigen::Map<const Eigen::VectorXd>(pole.data(), m + 1);
  if (!(p.norm() > 0.0)) throw InvalidArgument("stereographic_map: pole must be nonzero");
  p.normalize();
  // Householder reflection taking the pole to the last axis.
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(m + 1, m + 1);
  Eigen::VectorXd v = p - Eigen::VectorXd::Unit(m + 1, m);
  if (v.norm() > 1e-14) h -= 2.0 * v * v.transpose() / v.squaredNorm();

  ConformalMap map;
  map.name = "stereographic";
  map.source = m >= 2 ? sphere_polar(m, radius) : circle_chart(radius);
  map.target = euclidean(m);
  auto forward = [m, h](std::span<const Jet> x) {
    const JetVec y = sphere_polar_embedding(x, 1.0);
    JetVec yr(m + 1, x[0].zero_like());
    for (int a = 0; a <= m; ++a)
      for (int b = 0; b <= m; ++b)
        if (h(a, b) != 0.0) yr[a] += h(a, b) * y[b];
    const Jet denom = 1.0 - yr[m];
    if (denom.value() < kSubsphereGuard) throw DomainError("stereographic_map: point at the projection pole");
    JetVec out;
    for (int a = 0; a < m; ++a) out.push_back(yr[a] / denom);
    return out;
  };
  map.forward = forward;
  map.factor = [forward, radius](std::span<const Jet> x) {
    const JetVec y = forward(x);
    return (1.0 + norm_squared(y)) / (2.0 * radius);
  };
  return map;
}

ConformalMap sphere_minus_subsphere(int m, int k) {
  if (m < 2 || k < 1 || k > m - 2) throw InvalidArgument("sphere_minus_subsphere: need m >= 2 and 1 <= k <= m-2");
  const int d = m - k - 1;
  ConformalMap map;
  map.name = "sphere_minus_subsphere";
  map.source = sphere_polar(m, 1.0);
  map.target = product(hyperbolic_halfspace(k + 1), sphere_stereographic(d));
  // Stereographic image and its distance to the image plane of S^k.
  auto image = [m, k](std::span<const Jet> x, Jet& rho) {
    const JetVec y = sphere_polar_embedding(x, 1.0);
    const Jet denom = 1.0 - y[m];
    if (denom.value() < kSubsphereGuard) throw DomainError("sphere_minus_subsphere: point at the projection pole");
    JetVec s;
    for (int a = 0; a < m; ++a) s.push_back(y[a] / denom);
    Jet r2 = x[0].zero_like();
    for (int a = k; a < m; ++a) r2 += s[a] * s[a];
    if (!(std::sqrt(r2.value()) >= kSubsphereGuard)) throw DomainError("sphere_minus_subsphere: point on the removed subsphere");
    rho = sqrt(r2);
    return s;
  };
  map.forward = [image, m, k](std::span<const Jet> x) {
    Jet rho;
    const JetVec s = image(x, rho);
    JetVec out(s.begin(), s.begin() + k);
    out.push_back(rho);
    JetVec w;
    for (int a = k; a < m; ++a) w.push_back(s[a] / rho);
    for (Jet& z : sphere_coordinates(w)) out.push_back(std::move(z));
    return out;
  };
  map.factor = [image](std::span<const Jet> x) {
    Jet rho;
    const JetVec s = image(x, rho);
    return (1.0 + norm_squared(s)) / (2.0 * rho);
  };
  return map;
}

ConformalMap euclidean_inversion(int m) {
  ConformalMap map;
  map.name = "inversion";
  map.source = euclidean(m);
  map.source.set_interior([](std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s > 1e-16;
  });
  map.target = euclidean(m);
  map.forward = [](std::span<const Jet> x) {
    const Jet inv = reciprocal(norm_squared(x));
    JetVec out;
    for (const Jet& xi : x) out.push_back(xi * inv);
    return out;
  };
  map.factor = [](std::span<const Jet> x) { return reciprocal(norm_squared(x)); };
  return map;
}

ConformalMap identity_map(const MetricChart& chart) {
  ConformalMap map;
  map.name = "identity";
  map.source = chart;
  map.target = chart;
  map.forward = [](std::span<const Jet> x) { return JetVec(x.begin(), x.end()); };
  map.factor = [](std::span<const Jet> x) { return Jet(x[0].basis(), 1.0); };
  return map;
}

LiouvilleResidual liouville_phi_residual(const ConformalMap& map, std::span<const double> x) {
  const std::vector<double> y = map_point(map, x);
  if (std::abs(curvature_at(map.source, x).scalar) > 1e-6 || std::abs(curvature_at(map.target, y).scalar) > 1e-6)
    throw PreconditionError("liouville_phi_residual: source and target must be scalar-flat");
  const int m = map.source.dim();
  const ScalarField lambda = map.factor;
  const MetricChart pulled =
      conformal_scale(map.source, ConformalFactor::exponential(m, [lambda](std::span<const Jet> z) {
                        return log(lambda(z));
                      }));
  const ScalarField phi = [lambda](std::span<const Jet> z) { return -log(lambda(z)); };
  LiouvilleResidual out;
  out.laplacian = scalar_laplacian(pulled, phi, x);
  out.gradient_norm2 = gradient_norm2(pulled, phi, x);
  out.residual = std::abs(out.laplacian - 0.5 * (m - 2.0) * out.gradient_norm2);
  return out;
}

}  // namespace curvkit
