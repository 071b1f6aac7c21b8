#include "curvkit/fibration.hpp"

#include <cmath>
#include <numbers>

#include "curvkit/curvature.hpp"
#include "curvkit/error.hpp"

namespace curvkit {

namespace {

constexpr double kPi = std::numbers::pi;

std::span<const double> base_point(const ConnectionData& data, std::span<const double> p) {
  if (static_cast<int>(p.size()) != data.base.dim() + 1)
    throw InvalidArgument("fibration: total-space point has the wrong dimension");
  return p.first(data.base.dim());
}

// Potential components expanded to first order at x.
JetVec potential_jet(const ConnectionData& data, std::span<const double> x, int order) {
  const JetVec xs = coordinate_jets(x, order);
  JetVec a = data.potential(xs);
  if (static_cast<int>(a.size()) != data.base.dim()) throw InvalidArgument("fibration: potential has the wrong size");
  return a;
}

}  // namespace

ConnectionData make_connection(MetricChart base, OneForm potential, double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidArgument("connection: epsilon must be positive");
  if (base.dim() < 2) throw InvalidArgument("connection: base dimension must be >= 2");
  return {std::move(base), std::move(potential), epsilon};
}

OneForm zero_potential(int n) {
  return [n](std::span<const Jet> x) { return JetVec(n, x[0].zero_like()); };
}

OneForm flat_potential(double lambda) {
  return [lambda](std::span<const Jet> x) {
    JetVec a(x.size(), x[0].zero_like());
    a[0] = -0.5 * lambda * x[1];
    a[1] = 0.5 * lambda * x[0];
    return a;
  };
}

OneForm sphere_potential(double lambda) {
  return [lambda](std::span<const Jet> x) {
    JetVec a(2, x[0].zero_like());
    a[1] = lambda * (1.0 - cos(x[0]));
    return a;
  };
}

OneForm halfplane_potential(double lambda) {
  return [lambda](std::span<const Jet> x) {
    JetVec a(2, x[0].zero_like());
    a[0] = lambda / x[1];
    return a;
  };
}

OneForm gauge_shift(OneForm a, ScalarField chi) {
  return [a, chi](std::span<const Jet> x) {
    JetVec out = a(x);
    // d chi from a jet one order higher than x carries.
    const int order = x[0].order();
    if (order + 1 > kMaxJetOrder) throw InvalidArgument("gauge_shift: jet order too high");
    std::vector<double> point(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) point[i] = x[i].value();
    const JetVec up = coordinate_jets(point, order + 1);
    const Jet c = chi(up);
    for (std::size_t i = 0; i < x.size(); ++i) {
      // The derivative lives on the lower basis; rebuild it on x's basis by
      // composing with the displacement h = x - x0.
      const Jet d = c.derivative(static_cast<int>(i));
      Jet v(x[0].basis(), 0.0);
      const MonomialBasis& b = d.basis();
      for (int k = 0; k < b.size(); ++k) {
        if (d.coeff(k) == 0.0) continue;
        Jet term(x[0].basis(), d.coeff(k));
        const auto& e = b.exponent(k);
        for (std::size_t j = 0; j < x.size(); ++j)
          for (int r = 0; r < e[j]; ++r) term *= x[j] - point[j];
        v += term;
      }
      out[i] += v;
    }
    return out;
  };
}

MetricChart connection_metric(const ConnectionData& data) {
  if (!(data.epsilon > 0.0)) throw InvalidArgument("connection: epsilon must be positive");
  const int n = data.base.dim(), m = n + 1;
  Box box = data.base.domain();
  box.lo.push_back(0.0);
  box.hi.push_back(2.0 * kPi);
  box.periodic.push_back(true);
  Box sample = data.base.sample_region();
  sample.lo.push_back(0.0);
  sample.hi.push_back(2.0 * kPi);
  sample.periodic.push_back(true);
  const MetricChart base = data.base;
  const OneForm a = data.potential;
  const double e2 = data.epsilon * data.epsilon;
  MetricChart chart(
      base.name() + "~conn", m, box, [base, a, e2, n, m](std::span<const Jet> x) {
        const auto xb = x.first(n);
        const JetVec gb = base.evaluate(xb);
        const JetVec av = a(xb);
        JetVec g(m * m, x[0].zero_like());
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) g[i * m + j] = gb[i * n + j] + e2 * av[i] * av[j];
        for (int i = 0; i < n; ++i) g[i * m + n] = g[n * m + i] = e2 * av[i];
        g[n * m + n] = Jet(x[0].basis(), e2);
        return g;
      });
  chart.set_sample_region(sample);
  chart.set_interior([base](std::span<const double> p) { return base.contains(p.first(base.dim())); });
  chart.set_injectivity_guard(std::min(base.injectivity_guard(), kPi * data.epsilon));
  return chart;
}

std::vector<double> curvature_form(const ConnectionData& data, std::span<const double> x) {
  const int n = data.base.dim();
  const JetVec a = potential_jet(data, x, 1);
  std::vector<double> w(n * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) w[i * n + j] = a[j].d(i) - a[i].d(j);
  return w;
}

double closedness_residual(const ConnectionData& data, std::span<const double> x) {
  const int n = data.base.dim();
  if (n < 3) return 0.0;
  const JetVec a = potential_jet(data, x, 2);
  auto dw = [&](int k, int i, int j) { return a[j].d2(k, i) - a[i].d2(k, j); };
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) worst = std::max(worst, std::abs(dw(i, j, k) + dw(j, k, i) + dw(k, i, j)));
  return worst;
}

double omega_hs_norm(const ConnectionData& data, std::span<const double> x) {
  const int n = data.base.dim();
  const std::vector<double> w = curvature_form(data, x);
  const Eigen::MatrixXd e = orthonormal_frame(data.base.metric_at(x));
  Eigen::MatrixXd wm(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) wm(i, j) = w[i * n + j];
  return (e.transpose() * wm * e).squaredNorm();
}

double oneill_scalar(const ConnectionData& data, std::span<const double> x) {
  const double e2 = data.epsilon * data.epsilon;
  return curvature_at(data.base, x).scalar - 0.25 * e2 * omega_hs_norm(data, x);
}

double oneill_residual(const ConnectionData& data, std::span<const double> p) {
  const auto x = base_point(data, p);
  const double direct = curvature_at(connection_metric(data), p).scalar;
  return std::abs(direct - oneill_scalar(data, x));
}

ATensorCheck a_tensor_check(const ConnectionData& data, std::span<const double> X, std::span<const double> Y,
                            std::span<const double> p) {
  const int n = data.base.dim(), m = n + 1;
  if (static_cast<int>(X.size()) != n || static_cast<int>(Y.size()) != n)
    throw InvalidArgument("a_tensor_check: base vectors have the wrong dimension");
  const auto x = base_point(data, p);
  const MetricChart total = connection_metric(data);
  const JetVec a = potential_jet(data, x, 1);
  // Horizontal lifts X~ = X^i d_i - X^i a_i d_t.
  std::vector<double> xl(m, 0.0), yl(m, 0.0), dyl(m * m, 0.0);  // dyl[c * m + b] = d_c Y~^b
  for (int i = 0; i < n; ++i) {
    xl[i] = X[i];
    yl[i] = Y[i];
    xl[n] -= X[i] * a[i].value();
    yl[n] -= Y[i] * a[i].value();
    for (int c = 0; c < n; ++c) dyl[c * m + n] -= Y[i] * a[i].d(c);
  }
  const ChristoffelData cd = christoffel_at(total, p, false);
  std::vector<double> cov(m, 0.0);
  for (int b = 0; b < m; ++b) {
    double s = 0.0;
    for (int c = 0; c < m; ++c) s += xl[c] * dyl[c * m + b];
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) s += cd.christoffel[(b * m + i) * m + j] * xl[i] * yl[j];
    cov[b] = s;
  }
  const Eigen::MatrixXd g = total.metric_at(p);
  // V = d_t / eps, so g(cov, V) = (g cov)_t / eps.
  double gv = 0.0;
  for (int b = 0; b < m; ++b) gv += g(n, b) * cov[b];
  const std::vector<double> w = curvature_form(data, x);
  double wxy = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) wxy += w[i * n + j] * X[i] * Y[j];
  ATensorCheck r;
  r.computed = gv / data.epsilon;
  r.expected = -0.5 * data.epsilon * wxy;
  r.residual = std::abs(r.computed - r.expected);
  return r;
}

double fiber_geodesic_residual(const ConnectionData& data, std::span<const double> p) {
  base_point(data, p);
  const MetricChart total = connection_metric(data);
  const int m = total.dim(), t = m - 1;
  const ChristoffelData cd = christoffel_at(total, p, false);
  double worst = 0.0;
  for (int k = 0; k < m; ++k) worst = std::max(worst, std::abs(cd.christoffel[(k * m + t) * m + t]));
  return worst;
}

EpsilonFit epsilon_slope_fit(const MetricChart& base, const OneForm& potential, std::span<const double> p,
                             std::span<const double> epsilons) {
  if (epsilons.size() < 2) throw InvalidArgument("epsilon_slope_fit: need at least two epsilon values");
  const int k = static_cast<int>(epsilons.size());
  Eigen::MatrixXd a(k, 2);
  Eigen::VectorXd b(k);
  for (int i = 0; i < k; ++i) {
    const ConnectionData d = make_connection(base, potential, epsilons[i]);
    a(i, 0) = epsilons[i] * epsilons[i];
    a(i, 1) = 1.0;
    b[i] = curvature_at(connection_metric(d), p).scalar;
  }
  const Eigen::Vector2d coef = a.colPivHouseholderQr().solve(b);
  const ConnectionData d0 = make_connection(base, potential, 1.0);
  const auto x = p.first(base.dim());
  EpsilonFit fit;
  fit.slope = coef[0];
  fit.intercept = coef[1];
  fit.expected_slope = -0.25 * omega_hs_norm(d0, x);
  fit.expected_intercept = curvature_at(base, x).scalar;
  return fit;
}

}  // namespace curvkit
