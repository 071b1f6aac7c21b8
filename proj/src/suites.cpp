#include "curvkit/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "curvkit/catalog.hpp"
#include "curvkit/conformal.hpp"
#include "curvkit/curvature.hpp"
#include "curvkit/error.hpp"
#include "curvkit/fibration.hpp"
#include "curvkit/geodesy.hpp"
#include "curvkit/globalint.hpp"
#include "curvkit/parallel.hpp"
#include "curvkit/quadrature.hpp"

namespace curvkit {

namespace {

constexpr double kPi = std::numbers::pi;

class Context {
 public:
  Context(const SuiteConfig& config, const std::vector<std::string>& ids) : config_(config), ids_(ids) {}
  const SuiteConfig& config() const { return config_; }
  std::uint64_t seed(std::uint64_t salt) const { return config_.seed ^ (salt * 0x9e3779b97f4a7c15ULL); }

  void add(const std::string& id, const std::string& anchor, double computed, double expected, double tol_abs,
           double tol_rel) {
    if (std::find(ids_.begin(), ids_.end(), id) == ids_.end()) throw Error("internal: undeclared check id " + id);
    CheckRecord r = make_check(id, anchor, computed, expected, tol_abs, tol_rel);
    if (const auto it = config_.tolerances.find(id); it != config_.tolerances.end())
      apply_tolerance(r, it->second.abs.value_or(r.tol_abs), it->second.rel.value_or(r.tol_rel));
    records.push_back(std::move(r));
  }
  // Nonnegative violation amount, passing when it is at most `tol`.
  void bound(const std::string& id, const std::string& anchor, double violation, double tol) {
    add(id, anchor, std::max(0.0, violation), 0.0, tol, 0.0);
  }

  std::vector<CheckRecord> records;

 private:
  const SuiteConfig& config_;
  const std::vector<std::string>& ids_;
};

struct Group {
  std::string suite;
  std::string name;
  std::vector<std::string> ids;
  std::function<void(Context&)> run;
};

double max_of(std::initializer_list<double> v) { return *std::max_element(v.begin(), v.end()); }

// The chart y -> A y + b of another chart: g'(y) = A^T g(A y + b) A.
MetricChart affine_pullback(const MetricChart& chart, const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  const int n = chart.dim();
  MetricChart out(chart.name() + "~affine", n, Box::cube(n, -1e6, 1e6), [chart, a, b, n](std::span<const Jet> y) {
    JetVec x;
    for (int i = 0; i < n; ++i) {
      Jet xi = y[0].zero_like() + b[i];
      for (int j = 0; j < n; ++j) xi += a(i, j) * y[j];
      x.push_back(std::move(xi));
    }
    const JetVec g = chart.evaluate(x);
    JetVec h(n * n, y[0].zero_like());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) h[i * n + j] += a(k, i) * a(l, j) * g[k * n + l];
    return h;
  });
  return out;
}

// Unit-sphere point of the polar chart, written out independently of the library embedding.
std::vector<double> polar_to_ambient(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<double> y(n + 1);
  double s = 1.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    y[i] = s * std::cos(x[i]);
    s *= std::sin(x[i]);
  }
  y[n - 1] = s * std::cos(x[n - 1]);
  y[n] = s * std::sin(x[n - 1]);
  return y;
}

ScalarField constant_field(double c) {
  return [c](std::span<const Jet> x) { return x[0].zero_like() + c; };
}

ScalarField shifted(ScalarField f, double c, double scale) {
  return [f, c, scale](std::span<const Jet> x) { return scale * (f(x) - c); };
}

// ---------------------------------------------------------------- tensors

void hyperbolic_identity(Context& ctx) {
  const MetricChart h4 = hyperbolic_ball(4);
  std::mt19937_64 rng(ctx.seed(1));
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;
  double worst = 216.0;
  for (int i = 0; i < ctx.config().tensors_points; ++i) {
    std::vector<double> x(4);
    double norm = 0.0;
    for (double& v : x) {
      v = normal(rng);
      norm += v * v;
    }
    const double r = 0.95 * std::pow(unit(rng), 0.25) / std::sqrt(norm);
    for (double& v : x) v *= r;
    const CurvaturePoint cp = curvature_at(h4, x);
    const double value = -3.0 * cp.rm_norm2 + 8.0 * cp.ric_norm2;
    if (std::abs(value - 216.0) >= std::abs(worst - 216.0)) worst = value;
  }
  ctx.add("hyperbolic/identity216", "-3|Rm|^2 + 8|Ric|^2 = 216 on hyperbolic 4-space", worst, 216.0, 1e-8, 0.0);
}

void catalog_invariants(Context& ctx) {
  double sym = 0.0, traces = 0.0, decomp = 0.0, scalar = 0.0, bianchi = 0.0;
  const int points = ctx.config().fast ? 3 : 6;
  for (const auto& entry : catalog()) {
    for (const auto& x : sample_points(entry.chart, points)) {
      const CurvaturePoint cp = curvature_at(entry.chart, x);
      const double scale = std::max(1.0, std::sqrt(cp.rm_norm2));
      const PointInvariants pi = point_invariants(cp);
      sym = std::max(sym, max_of({pi.antisymmetry, pi.pair_symmetry, pi.first_bianchi}) / scale);
      traces = std::max(traces, max_of({pi.ricci_trace, pi.ring_trace, pi.weyl_traces, pi.ring_norm_identity}) / scale);
      if (entry.chart.dim() >= 3) {
        const DecompositionResiduals d = rm_decomposition_residuals(cp);
        decomp = std::max(decomp, std::max(d.ricci_form, d.traceless_form) / (scale * scale));
      }
      scalar = std::max(scalar, std::abs(cp.scalar - entry.scalar) / std::max(1.0, std::abs(entry.scalar)));
      bianchi = std::max(bianchi, contracted_bianchi_residual(entry.chart, x) / scale);
    }
  }
  const std::string a = "curvature tensor identities on the model catalog";
  ctx.add("tensors/symmetries", a, sym, 0.0, 1e-10, 0.0);
  ctx.add("tensors/traces", a, traces, 0.0, 1e-10, 0.0);
  ctx.add("tensors/decomposition", "|Rm|^2 splitting into Weyl, Ricci and scalar parts", decomp, 0.0, 1e-10, 0.0);
  ctx.add("tensors/constant_scalar", "scalar curvature of the model metrics", scalar, 0.0, 1e-10, 0.0);
  ctx.add("tensors/contracted_bianchi", "div Ric = dSc / 2", bianchi, 0.0, 1e-8, 0.0);
}

void chart_independence(Context& ctx) {
  // Scalar invariants must agree at corresponding points of two charts.
  double worst = 0.0;
  auto compare = [&](const CurvaturePoint& p, const CurvaturePoint& q) {
    const double s = std::max(1.0, std::sqrt(p.rm_norm2));
    worst = std::max({worst, std::abs(p.scalar - q.scalar) / s, std::abs(p.rm_norm2 - q.rm_norm2) / (s * s),
                      std::abs(p.ric_norm2 - q.ric_norm2) / (s * s), std::abs(p.weyl_norm2 - q.weyl_norm2) / (s * s)});
  };
  std::mt19937_64 rng(ctx.seed(2));
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const ScalarField bump = [](std::span<const Jet> x) {
    Jet r2 = x[0].zero_like();
    for (const Jet& v : x) r2 += v * v;
    return 0.3 * exp(-r2) + 0.1 * sin(x[0] + 2.0 * x[1]);
  };
  const std::vector<MetricChart> charts = {
      product(sphere_stereographic(2), sphere_stereographic(2)), berger(0.5, 1.0), nil3(),
      conformal_scale(euclidean(4), ConformalFactor::exponential(4, bump)), hyperbolic_halfspace(3)};
  for (const MetricChart& chart : charts) {
    const int n = chart.dim();
    for (const auto& x : sample_points(chart, ctx.config().fast ? 2 : 4)) {
      Eigen::MatrixXd a(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = (i == j ? 1.0 : 0.0) + 0.3 * unit(rng);
      const Eigen::VectorXd b = Eigen::VectorXd::NullaryExpr(n, [&] { return unit(rng); });
      const Eigen::VectorXd xv = Eigen::Map<const Eigen::VectorXd>(x.data(), n);
      const Eigen::VectorXd y = a.fullPivLu().solve(xv - b);
      compare(curvature_at(chart, x), curvature_at(affine_pullback(chart, a, b), std::vector<double>(y.data(), y.data() + n)));
    }
  }
  // Polar and stereographic charts of the round 4-sphere.
  const MetricChart polar = sphere_polar(4), stereo = sphere_stereographic(4);
  for (const auto& x : sample_points(polar, ctx.config().fast ? 2 : 4)) {
    const std::vector<double> y = polar_to_ambient(x);
    std::vector<double> s(4);
    for (int i = 0; i < 4; ++i) s[i] = y[i] / (1.0 - y[4]);
    compare(curvature_at(polar, x), curvature_at(stereo, s));
  }
  ctx.add("tensors/chart_independence", "scalar curvature invariants are coordinate independent", worst, 0.0, 1e-9, 0.0);
}

void homothety_scaling(Context& ctx) {
  const double c = 1.7;
  double worst = 0.0;
  for (const auto& entry : catalog()) {
    const MetricChart scaled = homothety(entry.chart, c);
    for (const auto& x : sample_points(entry.chart, 2)) {
      const CurvaturePoint p = curvature_at(entry.chart, x), q = curvature_at(scaled, x);
      const double s = std::max(1.0, std::sqrt(p.rm_norm2));
      worst = std::max({worst, std::abs(q.scalar * c * c - p.scalar) / s,
                        std::abs(q.rm_norm2 * std::pow(c, 4) - p.rm_norm2) / (s * s)});
    }
  }
  ctx.add("tensors/homothety", "Sc(c^2 g) = Sc(g) / c^2 and |Rm|^2(c^2 g) = |Rm|^2(g) / c^4", worst, 0.0, 1e-10, 0.0);
}

void weyl_flatness(Context& ctx) {
  double lcf = 0.0;
  for (const MetricChart& chart : {sphere_stereographic(4), hyperbolic_ball(4), product(hyperbolic_ball(2), sphere_polar(2))})
    for (const auto& x : sample_points(chart, 4)) lcf = std::max(lcf, curvature_at(chart, x).weyl_norm2);
  ctx.add("tensors/weyl_flat", "|W|^2 = 0 for conformally flat models", lcf, 0.0, 1e-10, 0.0);
  double kulkarni = 0.0;
  for (const auto& x : sample_points(sphere_stereographic(4), 2))
    kulkarni = std::max(kulkarni, kulkarni_lcf_residual(sphere_stereographic(4), x));
  ctx.add("tensors/kulkarni", "biorthogonal curvature criterion on the round 4-sphere", kulkarni, 0.0, 1e-9, 0.0);
}

// ---------------------------------------------------------------- conformal

void ncsc(Context& ctx) {
  const std::vector<MetricChart> charts = {sphere_stereographic(4), hyperbolic_ball(4),
                                           product(sphere_stereographic(2), sphere_stereographic(2)), berger(0.5, 1.0),
                                           nil3()};
  double worst_diff = -1.0, direct = 0.0, formula = 0.0;
  for (std::size_t c = 0; c < charts.size(); ++c) {
    const MetricChart& chart = charts[c];
    const int n = chart.dim();
    const auto points = sample_points(chart, ctx.config().conformal_fields, 7);
    for (int k = 0; k < ctx.config().conformal_fields; ++k) {
      const ScalarField f = shifted(random_trig_polynomial(n, ctx.seed(100 + 1000 * c + k)), 1.0, 2.0);
      const auto& x = points[k];
      const double d = curvature_at(conformal_scale(chart, ConformalFactor::exponential(n, f)), x).scalar;
      const double p = conformal_scalar_formula(chart, f, x);
      const double diff = std::abs(d - p) / std::max(1.0, std::abs(p));
      if (diff > worst_diff) {
        worst_diff = diff;
        direct = d;
        formula = p;
      }
    }
  }
  ctx.add("conformal/ncsc", "scalar curvature of e^{2f} g", direct, formula, 1e-8, 1e-8);
}

void inequality1(Context& ctx) {
  const MetricChart h4 = hyperbolic_ball(4);
  double identity = 0.0;
  int inconsistent = 0;
  const auto points = sample_points(h4, 10, 3);
  for (int k = 0; k < 10; ++k) {
    const ScalarField f = shifted(random_trig_polynomial(4, ctx.seed(300 + k)), 1.0, 3.0);
    const InequalityCheck r = inequality1_check(h4, f, 12.0, points[k]);
    identity = std::max(identity, r.identity_residual / std::max(1.0, std::abs(r.direct_scalar)));
    inconsistent += !r.consistent;
  }
  const std::string a = "Sc(e^{2f} g) >= -R iff the Laplacian inequality holds, Sc(g) = -R";
  ctx.add("conformal/inequality1", a, identity, 0.0, 1e-8, 0.0);
  ctx.add("conformal/inequality1/consistent", a, inconsistent, 0.0, 0.0, 0.0);
}

void yamabe_pde(Context& ctx) {
  const MetricChart s4 = sphere_stereographic(4);
  double worst = 0.0;
  const auto points = sample_points(s4, 10, 11);
  for (int k = 0; k < 10; ++k) {
    const ScalarField f = shifted(random_trig_polynomial(4, ctx.seed(400 + k)), 1.0, 2.0);
    const ConformalFactor u = ConformalFactor::exponential(4, f).to_power();
    const MetricChart scaled = conformal_scale(s4, u);
    const PointFunction target = [&](std::span<const double> x) { return curvature_at(scaled, x).scalar; };
    worst = std::max(worst, std::abs(yamabe_residual(s4, u, target, points[k])));
  }
  ctx.add("conformal/yamabe_pde", "power-form conformal scalar curvature equation", worst, 0.0, 1e-8, 0.0);
}

void liouville(Context& ctx) {
  const ConformalMap inv = euclidean_inversion(4);
  double worst = 0.0;
  for (const auto& x : sample_points(inv.source, 10)) worst = std::max(worst, liouville_phi_residual(inv, x).residual);
  ctx.add("conformal/liouville", "Delta phi = ((m-2)/2) |grad phi|^2 for a flat-to-flat conformal map", worst, 0.0, 1e-9,
          0.0);
}

// ---------------------------------------------------------------- gbc

int gbc_nodes(const Context& ctx, int dim) {
  const int base = ctx.config().gbc_nodes > 0 ? ctx.config().gbc_nodes : default_nodes(dim);
  return base;
}

void gbc4_s4(Context& ctx) {
  const Gbc4Breakdown b = gbc4(sphere_atlas(4, gbc_nodes(ctx, 4)));
  ctx.add("gbc4/S4", "4D Gauss-Bonnet-Chern, chi(S^4) = 2", b.total, 64.0 * kPi * kPi, 0.0, 1e-5);
  ctx.add("gbc4/S4/volume", "Vol(S^4) = 8 pi^2 / 3", b.volume, 8.0 * kPi * kPi / 3.0, 0.0, 1e-5);
}

void gbc4_s2s2(Context& ctx) {
  const Atlas atlas = named_atlas("S2xS2", gbc_nodes(ctx, 4));
  const Gbc4Breakdown b = gbc4(atlas);
  ctx.add("gbc4/S2xS2", "4D Gauss-Bonnet-Chern, chi(S^2 x S^2) = 4", b.chi_estimate, 4.0, 1e-6, 0.0);
  ctx.add("gbc4/S2xS2/weyl", "int |W|^2 / Vol on S^2 x S^2", b.weyl_term / b.volume, 16.0 / 3.0, 1e-4, 0.0);
  ctx.add("signature/S2xS2", "signature from int |W+|^2 - |W-|^2", signature_integral(atlas), 0.0, 1e-6, 0.0);
}

void gbc4_t4(Context& ctx) {
  const Gbc4Breakdown b = gbc4(torus_atlas(4, ctx.config().fast ? 4 : 8));
  ctx.add("gbc4/T4", "4D Gauss-Bonnet-Chern, chi(T^4) = 0", b.chi_estimate, 0.0, 1e-12, 0.0);
}

void gbc6_s6(Context& ctx) {
  const Gbc6Breakdown b = gbc6(sphere_atlas(6, ctx.config().gbc6_nodes));
  ctx.add("gbc6/S6", "6D Gauss-Bonnet-Chern for LCF metrics, chi(S^6) = 2", b.total, 128.0 * kPi * kPi * kPi, 0.0, 1e-4);
}

// ---------------------------------------------------------------- expansion

double sphere_ball_oracle(double r) {
  const double h = 2.0 * std::sin(0.5 * r) * std::sin(0.5 * r);  // 1 - cos r
  return 2.0 * kPi * kPi * h * h * (2.0 + std::cos(r)) / 3.0;
}

double hyperbolic_ball_oracle(double r) {
  const double h = 2.0 * std::sinh(0.5 * r) * std::sinh(0.5 * r);  // cosh r - 1
  return 2.0 * kPi * kPi * h * h * (std::cosh(r) + 2.0) / 3.0;
}

void gray(Context& ctx, const std::string& name, const MetricChart& chart, double (*oracle)(double)) {
  VolumeOptions opt;
  opt.radial_nodes = ctx.config().expansion_radial_nodes;
  opt.angular_nodes = ctx.config().expansion_angular_nodes;
  const std::vector<double> x(chart.dim(), 0.0);
  const auto rows = expansion_compare(chart, x, ctx.config().expansion_radii, opt);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0, oracle_err = 0.0;
  for (const auto& row : rows) {
    lo = std::min(lo, row.ratio);
    hi = std::max(hi, row.ratio);
    oracle_err = std::max(oracle_err, std::abs(row.ball - oracle(row.r)) / oracle(row.r));
  }
  ctx.add("gray/" + name + "/ratio_spread", "geodesic ball volume expansion to order r^4", hi / lo, 1.0, 1.0, 0.0);
  ctx.add("gray/" + name + "/ball_oracle", "geodesic ball volume against the radial integral", oracle_err, 0.0, 1e-9, 0.0);
}

// ---------------------------------------------------------------- oneill

void oneill(Context& ctx) {
  struct Base {
    std::string name;
    MetricChart chart;
    OneForm potential;
    std::vector<double> point;
  };
  const double lambda = 0.7;
  const std::vector<Base> bases = {
      {"E2", euclidean(2), flat_potential(lambda), {0.3, -0.2, 0.5}},
      {"S2", sphere_polar(2), sphere_potential(lambda), {1.1, 0.4, 0.3}},
      {"H2", hyperbolic_halfspace(2), halfplane_potential(lambda), {0.4, 1.3, 0.2}},
  };
  const std::string a = "scalar curvature of a circle-bundle connection metric";
  for (const Base& b : bases) {
    double residual = 0.0, tensor = 0.0;
    for (double eps : ctx.config().oneill_epsilons) {
      const ConnectionData data = make_connection(b.chart, b.potential, eps);
      residual = std::max(residual, oneill_residual(data, b.point));
      const std::vector<double> X = {1.0, 0.3}, Y = {-0.4, 0.8};
      tensor = std::max(tensor, a_tensor_check(data, X, Y, b.point).residual);
    }
    ctx.add("oneill/" + b.name + "/residual", a, residual, 0.0, 1e-8, 0.0);
    ctx.add("oneill/" + b.name + "/a_tensor", "A-tensor of the circle bundle", tensor, 0.0, 1e-10, 0.0);
    const EpsilonFit fit = epsilon_slope_fit(b.chart, b.potential, b.point, ctx.config().oneill_epsilons);
    ctx.add("oneill/" + b.name + "/slope", "d Sc / d(eps^2) = -|omega|^2 / 4", fit.slope, fit.expected_slope, 1e-6, 0.0);
  }
}

// ---------------------------------------------------------------- stereographic

void subsphere(Context& ctx) {
  const ConformalMap map = sphere_minus_subsphere(4, 1);
  double pull = 0.0, factor = 0.0;
  for (const auto& x : sample_points(map.source, ctx.config().stereographic_points, 0, 0.02)) {
    const std::vector<double> y = polar_to_ambient(x);
    double s2 = 0.0, rho2 = 0.0;
    for (int i = 0; i < 4; ++i) {
      const double s = y[i] / (1.0 - y[4]);
      s2 += s * s;
      if (i >= 1) rho2 += s * s;
    }
    const double expected = std::pow((1.0 + s2) / (2.0 * std::sqrt(rho2)), 2);
    const double lam = factor_value(map, x);
    pull = std::max(pull, pullback_residual(map, x));
    factor = std::max(factor, std::abs(lam * lam - expected) / expected);
  }
  const std::string a = "S^4 minus a great circle is conformal to H^2 x S^2";
  ctx.add("stereographic/subsphere/pullback", a, pull, 0.0, 1e-9, 0.0);
  ctx.add("stereographic/subsphere/factor", a, factor, 0.0, 1e-12, 0.0);
}

void projection(Context& ctx) {
  const ConformalMap map = stereographic_map(4);
  double pull = 0.0;
  for (const auto& x : sample_points(map.source, 100, 0, 0.05)) pull = std::max(pull, pullback_residual(map, x));
  ctx.add("stereographic/projection", "stereographic projection is conformal", pull, 0.0, 1e-9, 0.0);
}

// ---------------------------------------------------------------- sobolev

void sobolev(Context& ctx) {
  const Atlas s4 = sphere_atlas(4, ctx.config().sobolev_nodes);
  const SobolevResult c = sobolev_check(s4, constant_field(1.0));
  std::vector<ScalarField> fields;
  for (int k = 0; k < ctx.config().sobolev_samples; ++k) fields.push_back(random_trig_polynomial(4, ctx.seed(500 + k)));
  double min_slack = std::numeric_limits<double>::infinity();
  for (const SobolevResult& r : sobolev_check(s4, fields)) min_slack = std::min(min_slack, r.slack);
  const std::string a = "sharp Sobolev inequality on the round sphere";
  ctx.bound("sobolev/random", a, -min_slack, 1e-9);
  ctx.add("sobolev/constant", a, c.slack, 0.0, 1e-8, 0.0);
  ctx.bound("sobolev/strict", "equality only for constants", 1e-8 - min_slack, 0.0);
}

// ---------------------------------------------------------------- yamabe

void yamabe(Context& ctx) {
  const Atlas s4 = sphere_atlas(4, ctx.config().yamabe_nodes);
  const ScalarField h = sphere_harmonic(0);
  const ScalarField u0 = [h](std::span<const Jet> y) { return 1.0 + 0.3 * h(y); };
  DescentOptions opt;
  opt.max_iters = ctx.config().yamabe_iterations;
  const DescentResult r = yamabe_descent(s4, u0, opt);
  const double target = 12.0 * std::sqrt(8.0 * kPi * kPi / 3.0);
  ctx.add("yamabe/variance", "constant scalar curvature at the Yamabe minimizer", r.final_scalar_variance, 0.0, 1e-4, 0.0);
  ctx.add("yamabe/quotient", "Yamabe invariant of the round 4-sphere", r.final_quotient, target, 0.0, 5e-3);
  ctx.add("yamabe/monotone", "descent never increases the quotient", r.monotone ? 0.0 : 1.0, 0.0, 0.0, 0.0);
}

// ---------------------------------------------------------------- kleinian

GroupSpec two_boosts(double length, int max_length) {
  GroupSpec s;
  s.generators = {make_boost(3, 0, length), make_boost(3, 1, length)};
  s.max_length = max_length;
  return s;
}

void schottky(Context& ctx) {
  const SuiteConfig& c = ctx.config();
  const GroupSpec spec = kleinian_spec(c);
  const OrbitSample orbit = orbit_enumerate(spec);
  const ExponentEstimate g = critical_exponent_estimate(orbit, ExponentMethod::growth_fit);
  const ExponentEstimate k = critical_exponent_estimate(orbit, ExponentMethod::series_knee);
  const LimitSetSample ls = limit_set_sample(spec, c.kleinian_word_length, c.kleinian_points, ctx.seed(600));
  const DimensionEstimate d = box_dimension(ls.points, automatic_ladder(ls.points));
  const std::string a = "critical exponent equals the limit set dimension";
  ctx.add("delta/schottky/growth_vs_knee", a, g.value, k.value, 0.05, 0.0);
  ctx.add("delta/schottky/box_vs_growth", a, d.value, g.value, 0.05, 0.0);
  ctx.add("delta/schottky/box_vs_knee", a, d.value, k.value, 0.05, 0.0);
}

void cyclic(Context& ctx) {
  const SuiteConfig& c = ctx.config();
  GroupSpec spec;
  spec.generators = {make_boost(3, 0, c.kleinian_cyclic_length)};
  spec.max_length = c.kleinian_cyclic_max_length;
  const OrbitSample orbit = orbit_enumerate(spec);
  const double raw = std::max(critical_exponent_estimate(orbit, ExponentMethod::growth_fit).value,
                              critical_exponent_estimate(orbit, ExponentMethod::series_knee).value);
  const ExponentEstimate guarded = critical_exponent_estimate(spec, ExponentMethod::growth_fit);
  const LimitSetSample ls = limit_set_sample(spec, c.kleinian_word_length, 200, ctx.seed(700));
  const std::string a = "a cyclic loxodromic group has a two-point limit set";
  ctx.add("delta/cyclic", a, raw, 0.0, 0.05, 0.0);
  ctx.add("delta/cyclic/elementary", a, guarded.elementary ? 1.0 : 0.0, 1.0, 0.0, 0.0);
  ctx.add("delta/cyclic/clusters", a, count_clusters(ls.points, kElementaryClusterRadius), 2.0, 0.0, 0.0);
}

void monotone(Context& ctx) {
  const int L = ctx.config().kleinian_max_length;
  const ExponentEstimate d6 = critical_exponent_estimate(orbit_enumerate(two_boosts(6.0, L)), ExponentMethod::series_knee);
  const ExponentEstimate d8 = critical_exponent_estimate(orbit_enumerate(two_boosts(8.0, L)), ExponentMethod::series_knee);
  const std::string a = "critical exponent of a Schottky group";
  ctx.bound("delta/range", a, d6.value > 0.0 && d6.value < 1.0 ? 0.0 : 1.0, 0.0);
  ctx.bound("delta/monotone", a, d8.value - d6.value, 0.0);
}

void basepoint(Context& ctx) {
  GroupSpec spec = kleinian_spec(ctx.config());
  const ExponentEstimate a = critical_exponent_estimate(orbit_enumerate(spec), ExponentMethod::growth_fit);
  spec.basepoint = make_boost(spec.generators.front().dim(), spec.generators.front().dim() - 1, 2.0)
                       .apply(hyperboloid_origin(spec.generators.front().dim()));
  const ExponentEstimate b = critical_exponent_estimate(orbit_enumerate(spec), ExponentMethod::growth_fit);
  ctx.add("delta/basepoint", "the critical exponent does not depend on the basepoint", b.value, a.value,
          std::max(a.uncertainty, b.uncertainty), 0.0);
}

// ---------------------------------------------------------------- registry

const std::vector<Group>& groups() {
  static const std::vector<Group> table = [] {
    std::vector<Group> g;
    g.push_back({"tensors", "hyperbolic/identity216", {"hyperbolic/identity216"}, hyperbolic_identity});
    g.push_back({"tensors", "tensors/catalog",
                 {"tensors/symmetries", "tensors/traces", "tensors/decomposition", "tensors/constant_scalar",
                  "tensors/contracted_bianchi"},
                 catalog_invariants});
    g.push_back({"tensors", "tensors/chart_independence", {"tensors/chart_independence"}, chart_independence});
    g.push_back({"tensors", "tensors/homothety", {"tensors/homothety"}, homothety_scaling});
    g.push_back({"tensors", "tensors/weyl", {"tensors/weyl_flat", "tensors/kulkarni"}, weyl_flatness});
    g.push_back({"conformal", "conformal/ncsc", {"conformal/ncsc"}, ncsc});
    g.push_back({"conformal", "conformal/inequality1", {"conformal/inequality1", "conformal/inequality1/consistent"},
                 inequality1});
    g.push_back({"conformal", "conformal/yamabe_pde", {"conformal/yamabe_pde"}, yamabe_pde});
    g.push_back({"conformal", "conformal/liouville", {"conformal/liouville"}, liouville});
    g.push_back({"gbc", "gbc4/S4", {"gbc4/S4", "gbc4/S4/volume"}, gbc4_s4});
    g.push_back({"gbc", "gbc4/S2xS2", {"gbc4/S2xS2", "gbc4/S2xS2/weyl", "signature/S2xS2"}, gbc4_s2s2});
    g.push_back({"gbc", "gbc4/T4", {"gbc4/T4"}, gbc4_t4});
    g.push_back({"gbc", "gbc6/S6", {"gbc6/S6"}, gbc6_s6});
    g.push_back({"expansion", "gray/S4", {"gray/S4/ratio_spread", "gray/S4/ball_oracle"},
                 [](Context& c) { gray(c, "S4", sphere_stereographic(4), sphere_ball_oracle); }});
    g.push_back({"expansion", "gray/H4", {"gray/H4/ratio_spread", "gray/H4/ball_oracle"},
                 [](Context& c) { gray(c, "H4", hyperbolic_ball(4), hyperbolic_ball_oracle); }});
    std::vector<std::string> oneill_ids;
    for (const char* b : {"E2", "S2", "H2"})
      for (const char* k : {"residual", "a_tensor", "slope"}) oneill_ids.push_back(std::string("oneill/") + b + "/" + k);
    g.push_back({"oneill", "oneill", oneill_ids, oneill});
    g.push_back({"stereographic", "stereographic/subsphere",
                 {"stereographic/subsphere/pullback", "stereographic/subsphere/factor"}, subsphere});
    g.push_back({"stereographic", "stereographic/projection", {"stereographic/projection"}, projection});
    g.push_back({"sobolev", "sobolev", {"sobolev/random", "sobolev/constant", "sobolev/strict"}, sobolev});
    g.push_back({"yamabe_descent", "yamabe/S4", {"yamabe/variance", "yamabe/quotient", "yamabe/monotone"}, yamabe});
    g.push_back({"kleinian", "delta/schottky",
                 {"delta/schottky/growth_vs_knee", "delta/schottky/box_vs_growth", "delta/schottky/box_vs_knee"},
                 schottky});
    g.push_back({"kleinian", "delta/cyclic", {"delta/cyclic", "delta/cyclic/elementary", "delta/cyclic/clusters"},
                 cyclic});
    g.push_back({"kleinian", "delta/monotone", {"delta/range", "delta/monotone"}, monotone});
    g.push_back({"kleinian", "delta/basepoint", {"delta/basepoint"}, basepoint});
    return g;
  }();
  return table;
}

}  // namespace

std::vector<std::string> suite_names() {
  return {"tensors", "conformal", "gbc", "expansion", "oneill", "stereographic", "sobolev", "yamabe_descent", "kleinian"};
}

std::vector<std::string> check_groups(const std::string& suite) {
  std::vector<std::string> out;
  for (const Group& g : groups())
    if (g.suite == suite) out.push_back(g.name);
  return out;
}

std::vector<std::string> all_check_groups() {
  std::vector<std::string> out;
  for (const Group& g : groups()) out.push_back(g.name);
  return out;
}

std::vector<std::string> known_check_ids() {
  std::vector<std::string> out;
  for (const Group& g : groups()) out.insert(out.end(), g.ids.begin(), g.ids.end());
  return out;
}

LorentzIsometry parse_generator(const std::string& text, int dim) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty()) throw InvalidArgument("generator '" + text + "': bad number '" + s + "'");
    return v;
  };
  auto axis = [&](const std::string& s) {
    const double v = number(s);
    if (v != std::floor(v) || v < 0 || v >= dim)
      throw InvalidArgument("generator '" + text + "': axis must be an integer in [0, " + std::to_string(dim) + ")");
    return static_cast<int>(v);
  };
  if (parts.size() == 3 && parts[0] == "translation") {
    const int k = axis(parts[1]);
    Eigen::VectorXd p = Eigen::VectorXd::Zero(dim);
    p[k] = 1.0;
    return make_translation(number(parts[2]), p, -p);
  }
  if (parts.size() == 4 && parts[0] == "rotation") return make_rotation(dim, number(parts[3]), axis(parts[1]), axis(parts[2]));
  throw InvalidArgument("generator '" + text + "': expected translation:<axis>:<length> or rotation:<i>:<j>:<angle>");
}

GroupSpec kleinian_spec(const SuiteConfig& config) {
  GroupSpec spec;
  if (config.kleinian_generators.empty()) {
    spec.generators = {make_boost(config.kleinian_dim, 0, config.kleinian_length),
                       make_boost(config.kleinian_dim, 1, config.kleinian_length)};
  } else {
    for (const auto& g : config.kleinian_generators) spec.generators.push_back(parse_generator(g, config.kleinian_dim));
  }
  spec.max_length = config.kleinian_max_length;
  spec.free = true;
  return spec;
}

SuiteConfig fast_variant(const SuiteConfig& config) {
  SuiteConfig c = config;
  c.fast = true;
  c.tensors_points = std::max(1, c.tensors_points / 5);
  c.conformal_fields = std::max(1, c.conformal_fields / 5);
  c.gbc_nodes = (c.gbc_nodes > 0 ? c.gbc_nodes : 24) / 2;
  c.gbc6_nodes = std::max(6, c.gbc6_nodes * 2 / 3);
  c.stereographic_points = std::max(1, c.stereographic_points / 5);
  c.sobolev_samples = std::max(1, c.sobolev_samples / 5);
  c.sobolev_nodes = std::max(8, c.sobolev_nodes / 2);
  c.kleinian_points = std::max(1000, c.kleinian_points / 5);
  c.kleinian_max_length = std::max(9, c.kleinian_max_length - 2);
  return c;
}

SuiteReport run_suite(const std::string& name, const SuiteConfig& config) {
  const auto names = suite_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) throw InvalidArgument("unknown suite '" + name + "'");
  SuiteReport report;
  report.name = name;
  report.fast = config.fast;
  for (const Group& g : groups()) {
    if (g.suite != name) continue;
    if (!config.checks.empty() && std::find(config.checks.begin(), config.checks.end(), g.name) == config.checks.end())
      continue;
    Context ctx(config, g.ids);
    try {
      g.run(ctx);
    } catch (const std::exception& e) {
      // Keep what finished; the rest of the group fails with the message.
      for (const auto& id : g.ids) {
        const bool done = std::any_of(ctx.records.begin(), ctx.records.end(), [&](const CheckRecord& r) { return r.id == id; });
        if (!done) ctx.records.push_back(failed_check(id, g.name, e.what()));
      }
    }
    report.checks.insert(report.checks.end(), ctx.records.begin(), ctx.records.end());
  }
  return report;
}

VerificationReport run_suites(const std::string& which, const SuiteConfig& config) {
  VerificationReport report;
  if (config.threads > 0) set_thread_cap(config.threads);
  report.environment.threads = thread_count();
  report.environment.seeds["seed"] = config.seed;
  const std::vector<std::string> names = which == "all" ? suite_names() : std::vector<std::string>{which};
  for (const auto& name : names) {
    const auto t0 = std::chrono::steady_clock::now();
    SuiteReport s = run_suite(name, config);
    if (s.checks.empty()) continue;
    report.environment.seconds[name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.suites.push_back(std::move(s));
  }
  return report;
}

}  // namespace curvkit
