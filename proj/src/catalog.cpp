#include "curvkit/catalog.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>

#include "curvkit/error.hpp"

namespace curvkit {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

Jet constant_like(const Jet& x, double v) { return Jet(x.basis(), v); }

JetVec scaled_identity(const Jet& factor, int n) {
  JetVec g(n * n, factor.zero_like());
  for (int i = 0; i < n; ++i) g[i * n + i] = factor;
  return g;
}

Jet norm_squared(std::span<const Jet> x) {
  Jet s = x[0].zero_like();
  for (const Jet& xi : x) s += xi * xi;
  return s;
}

void require_dim(int n, int min) {
  if (n < min) throw InvalidArgument("model metric: dimension too small");
}

}  // namespace

MetricChart euclidean(int n) {
  require_dim(n, 1);
  MetricChart chart("E" + std::to_string(n), n, Box::cube(n, -1e3, 1e3),
                    [n](std::span<const Jet> x) { return scaled_identity(constant_like(x[0], 1.0), n); });
  chart.set_sample_region(Box::cube(n, -1.0, 1.0));
  chart.set_injectivity_guard(kInf);
  return chart;
}

MetricChart flat_torus(int n) {
  require_dim(n, 1);
  Box box = Box::cube(n, 0.0, 1.0);
  box.periodic.assign(n, true);
  MetricChart chart("T" + std::to_string(n), n, box,
                    [n](std::span<const Jet> x) { return scaled_identity(constant_like(x[0], 1.0), n); });
  chart.set_injectivity_guard(0.5);
  return chart;
}

MetricChart sphere_polar(int n, double radius) {
  require_dim(n, 2);
  if (!(radius > 0.0)) throw InvalidArgument("sphere_polar: radius must be positive");
  Box box = Box::cube(n, 1e-2, kPi - 1e-2);
  box.lo[n - 1] = 0.0;
  box.hi[n - 1] = 2.0 * kPi;
  box.periodic[n - 1] = true;
  const double r2 = radius * radius;
  MetricChart chart("S" + std::to_string(n) + "polar", n, box, [n, r2](std::span<const Jet> x) {
    JetVec g(n * n, x[0].zero_like());
    Jet w = constant_like(x[0], r2);
    g[0] = w;
    for (int i = 1; i < n; ++i) {
      w = w * square(sin(x[i - 1]));
      g[i * n + i] = w;
    }
    return g;
  });
  Box sample = Box::cube(n, 0.3, kPi - 0.3);
  sample.lo[n - 1] = 0.0;
  sample.hi[n - 1] = 2.0 * kPi;
  sample.periodic[n - 1] = true;
  chart.set_sample_region(sample);
  chart.set_injectivity_guard(kPi * radius);
  return chart;
}

MetricChart sphere_stereographic(int n, double radius) {
  require_dim(n, 1);
  if (!(radius > 0.0)) throw InvalidArgument("sphere_stereographic: radius must be positive");
  const double c = 4.0 * radius * radius;
  MetricChart chart("S" + std::to_string(n), n, Box::cube(n, -1e3, 1e3), [n, c](std::span<const Jet> x) {
    return scaled_identity(c * reciprocal(square(1.0 + norm_squared(x))), n);
  });
  chart.set_sample_region(Box::cube(n, -1.5, 1.5));
  chart.set_injectivity_guard(kPi * radius);
  return chart;
}

MetricChart hyperbolic_ball(int n) {
  require_dim(n, 1);
  MetricChart chart("H" + std::to_string(n), n, Box::cube(n, -1.0, 1.0), [n](std::span<const Jet> x) {
    return scaled_identity(4.0 * reciprocal(square(1.0 - norm_squared(x))), n);
  });
  chart.set_interior([](std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s < 1.0;
  });
  chart.set_sample_region(Box::cube(n, -0.6, 0.6));
  chart.set_injectivity_guard(kInf);
  return chart;
}

MetricChart hyperbolic_halfspace(int n) {
  require_dim(n, 1);
  Box box = Box::cube(n, -1e3, 1e3);
  box.lo[n - 1] = 0.0;
  MetricChart chart("H" + std::to_string(n) + "half", n, box, [n](std::span<const Jet> x) {
    return scaled_identity(reciprocal(square(x[n - 1])), n);
  });
  chart.set_interior([n](std::span<const double> x) { return x[n - 1] > 0.0; });
  Box sample = Box::cube(n, -1.0, 1.0);
  sample.lo[n - 1] = 0.5;
  sample.hi[n - 1] = 2.0;
  chart.set_sample_region(sample);
  chart.set_injectivity_guard(kInf);
  return chart;
}

MetricChart product(const MetricChart& a, const MetricChart& b) {
  const int na = a.dim(), nb = b.dim(), n = na + nb;
  auto concat = [](const Box& p, const Box& q) {
    Box out = p;
    out.lo.insert(out.lo.end(), q.lo.begin(), q.lo.end());
    out.hi.insert(out.hi.end(), q.hi.begin(), q.hi.end());
    out.periodic.insert(out.periodic.end(), q.periodic.begin(), q.periodic.end());
    return out;
  };
  const MetricFn fa = a.components(), fb = b.components();
  MetricChart chart(a.name() + "x" + b.name(), n, concat(a.domain(), b.domain()),
                    [na, nb, n, fa, fb](std::span<const Jet> x) {
                      const JetVec ga = fa(x.subspan(0, na));
                      const JetVec gb = fb(x.subspan(na, nb));
                      JetVec g(n * n, x[0].zero_like());
                      for (int i = 0; i < na; ++i)
                        for (int j = 0; j < na; ++j) g[i * n + j] = ga[i * na + j];
                      for (int i = 0; i < nb; ++i)
                        for (int j = 0; j < nb; ++j) g[(na + i) * n + na + j] = gb[i * nb + j];
                      return g;
                    });
  chart.set_interior([a, b, na, nb](std::span<const double> x) {
    return a.contains(x.subspan(0, na)) && b.contains(x.subspan(na, nb));
  });
  chart.set_sample_region(concat(a.sample_region(), b.sample_region()));
  chart.set_injectivity_guard(std::min(a.injectivity_guard(), b.injectivity_guard()));
  return chart;
}

MetricChart berger(double eps, double lambda) {
  if (!(eps > 0.0)) throw InvalidArgument("berger: eps must be positive");
  Box box{{1e-2, 0.0, 0.0}, {kPi - 1e-2, 2.0 * kPi, 2.0 * kPi}, {false, true, true}};
  const double e2 = eps * eps;
  MetricChart chart("berger", 3, box, [e2, lambda](std::span<const Jet> x) {
    const Jet a = lambda * (1.0 - cos(x[0]));
    JetVec g(9, x[0].zero_like());
    g[0] = constant_like(x[0], 1.0);
    g[4] = square(sin(x[0])) + e2 * a * a;
    g[5] = g[7] = e2 * a;
    g[8] = constant_like(x[0], e2);
    return g;
  });
  Box sample = box;
  sample.lo[0] = 0.3;
  sample.hi[0] = kPi - 0.3;
  chart.set_sample_region(sample);
  chart.set_injectivity_guard(std::min(kPi, kPi * eps));
  return chart;
}

MetricChart nil3() {
  Box box{{-2.0, 0.0, 0.0}, {3.0, 1.0, 1.0}, {false, true, true}};
  MetricChart chart("nil3", 3, box, [](std::span<const Jet> x) {
    JetVec g(9, x[0].zero_like());
    const Jet one = constant_like(x[0], 1.0);
    g[0] = one;
    g[4] = 1.0 + x[0] * x[0];
    g[5] = g[7] = -x[0];
    g[8] = one;
    return g;
  });
  chart.set_sample_region(Box{{0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}, {false, true, true}});
  chart.set_injectivity_guard(0.5);
  return chart;
}

MetricChart homothety(const MetricChart& chart, double c) {
  if (!(c > 0.0)) throw InvalidArgument("homothety: factor must be positive");
  const MetricFn f = chart.components();
  const double c2 = c * c;
  MetricChart out(chart.name(), chart.dim(), chart.domain(), [f, c2](std::span<const Jet> x) {
    JetVec g = f(x);
    for (Jet& gij : g) gij *= c2;
    return g;
  });
  out.set_interior([chart](std::span<const double> x) { return chart.contains(x); });
  out.set_sample_region(chart.sample_region());
  out.set_injectivity_guard(chart.injectivity_guard() * c);
  return out;
}

JetVec sphere_polar_embedding(std::span<const Jet> x, double radius) {
  const int n = static_cast<int>(x.size());
  JetVec y;
  y.reserve(n + 1);
  Jet s = constant_like(x[0], radius);
  for (int i = 0; i < n - 1; ++i) {
    y.push_back(s * cos(x[i]));
    s = s * sin(x[i]);
  }
  y.push_back(s * cos(x[n - 1]));
  y.push_back(s * sin(x[n - 1]));
  return y;
}

JetVec stereographic_embedding(std::span<const Jet> x, double radius) {
  const Jet r2 = norm_squared(x);
  const Jet inv = radius * reciprocal(1.0 + r2);
  JetVec y;
  y.reserve(x.size() + 1);
  for (const Jet& xi : x) y.push_back(2.0 * xi * inv);
  y.push_back((r2 - 1.0) * inv);
  return y;
}

namespace {

MetricChart factor_metric(const std::string& token) {
  if (token == "nil3") return nil3();
  if (token == "berger") return berger(0.5, 1.0);
  std::size_t pos = 1;
  while (pos < token.size() && std::isdigit(static_cast<unsigned char>(token[pos]))) ++pos;
  if (token.empty() || pos == 1) throw InvalidArgument("unknown metric name '" + token + "'");
  const int n = std::stoi(token.substr(1, pos - 1));
  const std::string suffix = token.substr(pos);
  switch (token[0]) {
    case 'E':
      if (suffix.empty()) return euclidean(n);
      break;
    case 'T':
      if (suffix.empty()) return flat_torus(n);
      break;
    case 'S':
      if (suffix.empty()) return sphere_stereographic(n);
      if (suffix == "polar") return sphere_polar(n);
      break;
    case 'H':
      if (suffix.empty()) return hyperbolic_ball(n);
      if (suffix == "half") return hyperbolic_halfspace(n);
      break;
    default:
      break;
  }
  throw InvalidArgument("unknown metric name '" + token + "'");
}

}  // namespace

MetricChart named_metric(const std::string& name) {
  std::vector<std::string> tokens;
  std::size_t start = 0;
  while (true) {
    const std::size_t at = name.find('x', start);
    tokens.push_back(name.substr(start, at - start));
    if (at == std::string::npos) break;
    start = at + 1;
  }
  MetricChart chart = factor_metric(tokens[0]);
  for (std::size_t i = 1; i < tokens.size(); ++i) chart = product(chart, factor_metric(tokens[i]));
  return chart;
}

std::vector<CatalogEntry> catalog() {
  std::vector<CatalogEntry> out;
  out.push_back({euclidean(4), 0.0});
  out.push_back({flat_torus(3), 0.0});
  out.push_back({sphere_polar(2, 1.0), 2.0});
  out.push_back({sphere_polar(4, 1.0), 12.0});
  out.push_back({sphere_stereographic(4, 1.0), 12.0});
  out.push_back({sphere_stereographic(3, 2.0), 1.5});
  out.push_back({hyperbolic_ball(4), -12.0});
  out.push_back({hyperbolic_halfspace(3), -6.0});
  out.push_back({product(sphere_stereographic(2), sphere_stereographic(2)), 4.0});
  out.push_back({product(hyperbolic_ball(2), sphere_polar(2, 1.0)), 0.0});
  out.push_back({product(hyperbolic_ball(3), sphere_stereographic(3)), 0.0});
  out.push_back({berger(0.5, 1.0), 2.0 - 0.25 * 0.5});
  out.push_back({nil3(), -0.5});
  return out;
}

}  // namespace curvkit
