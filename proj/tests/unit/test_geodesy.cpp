#include <cmath>
#include <numbers>

#include <doctest.h>

#include "curvkit/catalog.hpp"
#include "curvkit/error.hpp"
#include "curvkit/geodesy.hpp"

using namespace curvkit;
using std::numbers::pi;

namespace {

double speed2(const MetricChart& chart, const std::vector<double>& x, const std::vector<double>& v) {
  const Eigen::MatrixXd g = chart.metric_at(x);
  const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  return w.dot(g * w);
}

double cap_volume_s4(double r) { return 2.0 * pi * pi * (2.0 / 3.0 - std::cos(r) + std::pow(std::cos(r), 3) / 3.0); }
// 2 pi^2 int_0^r sinh^3 t dt.
double ball_volume_h4(double r) { return 2.0 * pi * pi * (std::pow(std::cosh(r), 3) / 3.0 - std::cosh(r) + 2.0 / 3.0); }

}  // namespace

TEST_CASE("geodesics of the model spaces") {
  const std::vector<double> x{0.3, -0.2, 0.1}, v{0.5, 1.0, -2.0};
  const GeodesicState line = geodesic_shoot(euclidean(3), x, v, 1.7);
  for (int i = 0; i < 3; ++i) {
    CHECK(line.position[i] == doctest::Approx(x[i] + 1.7 * v[i]).epsilon(1e-12));
    CHECK(line.velocity[i] == doctest::Approx(v[i]).epsilon(1e-12));
  }

  // Unit-speed equator of the stereographic S^2 chart closes after 2 pi.
  const MetricChart s2 = sphere_stereographic(2);
  const std::vector<double> e{1.0, 0.0}, ev{0.0, 1.0};
  const GeodesicState loop = geodesic_shoot(s2, e, ev, 2.0 * pi);
  CHECK(std::abs(loop.position[0] - 1.0) <= 1e-6);
  CHECK(std::abs(loop.position[1]) <= 1e-6);
  // Same on the polar chart, along the periodic azimuth.
  const GeodesicState polar = geodesic_shoot(sphere_polar(2), std::vector<double>{pi / 2, 0.0},
                                             std::vector<double>{0.0, 1.0}, 2.0 * pi);
  CHECK(std::abs(polar.position[0] - pi / 2) <= 1e-6);
  CHECK(std::abs(std::remainder(polar.position[1], 2.0 * pi)) <= 1e-6);

  // Radial hyperbolic geodesic: |x(t)| = tanh(t / 2); unit speed is |v| = 1/2 at the origin.
  const MetricChart h4 = hyperbolic_ball(4);
  for (double t : {0.5, 1.0, 2.5}) {
    const GeodesicState ray = geodesic_shoot(h4, std::vector<double>(4, 0.0), std::vector<double>{0.5, 0, 0, 0}, t);
    CHECK(ray.position[0] == doctest::Approx(std::tanh(t / 2.0)).epsilon(1e-9));
    CHECK(std::abs(ray.position[1]) <= 1e-14);
  }
}

TEST_CASE("geodesic speed is conserved") {
  int shot = 0;
  for (const auto& entry : catalog()) {
    const MetricChart& chart = entry.chart;
    const auto x = sample_points(chart, 1, 9, 0.3)[0];
    std::vector<double> v(chart.dim());
    for (int i = 0; i < chart.dim(); ++i) v[i] = 0.05 * std::cos(1.0 + 2.0 * i);
    const double t = 1.0;
    try {
      const GeodesicState s = geodesic_shoot(chart, x, v, t);
      const double before = speed2(chart, x, v), after = speed2(chart, s.position, s.velocity);
      INFO(chart.name());
      CHECK(std::abs(after - before) <= 1e-9 * before * t);
      CHECK(s.steps > 0);
      ++shot;
    } catch (const DomainError&) {
      // Short rays may still cross a chart edge.
    }
  }
  CHECK(shot >= 8);
}

TEST_CASE("geodesic errors") {
  CHECK_THROWS_AS(geodesic_shoot(sphere_polar(2), std::vector<double>{0.5, 0.0}, std::vector<double>{-1.0, 0.0}, 1.0),
                  DomainError);
  CHECK_THROWS_AS(geodesic_shoot(euclidean(2), std::vector<double>{0.0, 0.0}, std::vector<double>{1.0}, 1.0),
                  InvalidArgument);
}

TEST_CASE("geodesic ball volumes") {
  const std::vector<double> o4(4, 0.0);
  CHECK(euclidean_ball_volume(4, 1.0) == doctest::Approx(pi * pi / 2.0).epsilon(1e-15));
  CHECK(ball_volume(euclidean(4), o4, 1.0).value == doctest::Approx(pi * pi / 2.0).epsilon(1e-12));
  CHECK(ball_volume(sphere_stereographic(4), o4, 0.5).value == doctest::Approx(cap_volume_s4(0.5)).epsilon(1e-9));
  CHECK(ball_volume(hyperbolic_ball(4), o4, 0.5).value == doctest::Approx(ball_volume_h4(0.5)).epsilon(1e-9));

  // Base-point independence on homogeneous models.
  for (const std::vector<double>& x : {std::vector<double>{0.2, -0.1, 0.3, 0.05}}) {
    CHECK(ball_volume(sphere_stereographic(4), x, 0.5).value == doctest::Approx(cap_volume_s4(0.5)).epsilon(1e-6));
    CHECK(ball_volume(hyperbolic_ball(4), x, 0.5).value == doctest::Approx(ball_volume_h4(0.5)).epsilon(1e-6));
    CHECK(ball_volume(sphere_polar(4), std::vector<double>{1.2, 1.4, 1.7, 0.3}, 0.5).value ==
          doctest::Approx(cap_volume_s4(0.5)).epsilon(1e-6));
  }

  const double r = 0.3;
  VolumeOptions coarse;
  coarse.radial_nodes = coarse.angular_nodes = 6;
  const double vh = ball_volume(hyperbolic_ball(4), o4, r, coarse).value, ve = euclidean_ball_volume(4, r),
               vs = ball_volume(sphere_stereographic(4), o4, r, coarse).value;
  CHECK(vh > ve);
  CHECK(ve > vs);

  CHECK_THROWS_AS(ball_volume(sphere_stereographic(4), o4, 4.0), PreconditionError);
  CHECK_THROWS_AS(ball_volume(sphere_stereographic(4), o4, -1.0), InvalidArgument);
}

TEST_CASE("Monte Carlo ball volume") {
  const std::vector<double> x{0.1, 0.0, -0.1, 0.2};
  VolumeOptions mc;
  mc.method = VolumeMethod::monte_carlo;
  mc.samples = 400;
  mc.seed = 99;
  for (const MetricChart& chart : {hyperbolic_ball(4), product(sphere_stereographic(2), hyperbolic_ball(2))}) {
    const VolumeEstimate p = ball_volume(chart, x, 0.6), m = ball_volume(chart, x, 0.6, mc);
    INFO(chart.name(), " polar ", p.value, " mc ", m.value, " +- ", m.error);
    CHECK(m.error > 0.0);
    CHECK(std::abs(p.value - m.value) <= 3.0 * std::hypot(p.error, m.error));
    const VolumeEstimate again = ball_volume(chart, x, 0.6, mc);
    CHECK(again.value == m.value);
  }
}

TEST_CASE("Gray coefficients") {
  const std::vector<double> o4(4, 0.0);
  const GrayCoefficients s = gray_coefficients(sphere_stereographic(4), o4);
  CHECK(s.c2 == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
  CHECK(s.c4 == doctest::Approx(936.0 / 17280.0).epsilon(1e-10));
  const GrayCoefficients h = gray_coefficients(hyperbolic_ball(4), o4);
  CHECK(h.c2 == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(h.c4 == doctest::Approx(936.0 / 17280.0).epsilon(1e-10));
  CHECK(gray_expansion(euclidean(4), o4, 0.7) == euclidean_ball_volume(4, 0.7));

  // Homogeneous metrics: the quartic coefficient does not move.
  for (const MetricChart& chart : {sphere_stereographic(4), hyperbolic_ball(4), product(sphere_stereographic(2), sphere_stereographic(2)),
                                   product(hyperbolic_ball(2), sphere_polar(2))}) {
    const auto pts = sample_points(chart, 4);
    const double c4 = gray_coefficients(chart, pts[0]).c4;
    for (const auto& x : pts) CHECK(gray_coefficients(chart, x).c4 == doctest::Approx(c4).epsilon(1e-9).scale(1.0));
  }

  // Delta Sc enters with the positive-spectrum sign; the flipped sign leaves
  // an r^4 error that the ratio exposes.
  MetricChart bump("bump", 4, Box::cube(4, -2, 2), [](std::span<const Jet> x) {
    Jet r2 = x[0].zero_like();
    for (const Jet& v : x) r2 += v * v;
    const Jet e = exp(0.4 * exp(-r2));
    JetVec g(16, x[0].zero_like());
    for (int i = 0; i < 4; ++i) g[i * 5] = e;
    return g;
  });
  bump.set_injectivity_guard(1.0);
  const GrayCoefficients b = gray_coefficients(bump, o4);
  CHECK(b.laplacian_scalar != 0.0);
  VolumeOptions fine;
  fine.radial_nodes = 16;
  fine.angular_nodes = 16;
  double prev = -1.0;
  for (double r : {0.2, 0.1, 0.05}) {
    const double ball = ball_volume(bump, o4, r, fine).value;
    const double with = gray_expansion(bump, o4, r);
    const double ratio = std::abs(ball - with) / (euclidean_ball_volume(4, r) * std::pow(r, 6));
    const double flipped = with + euclidean_ball_volume(4, r) * 36.0 * b.laplacian_scalar / (360.0 * 6 * 8) * std::pow(r, 4);
    const double flipped_ratio = std::abs(ball - flipped) / (euclidean_ball_volume(4, r) * std::pow(r, 6));
    CHECK(ratio < flipped_ratio);
    if (prev > 0.0) CHECK(ratio <= 2.0 * prev);
    prev = ratio;
  }
}

TEST_CASE("expansion comparison") {
  const std::vector<double> o4(4, 0.0), radii{0.05, 0.1, 0.2};
  for (const MetricChart& chart : {sphere_stereographic(4), hyperbolic_ball(4)}) {
    const auto rows = expansion_compare(chart, o4, radii);
    REQUIRE(rows.size() == 3);
    double lo = rows[0].ratio, hi = rows[0].ratio;
    for (const auto& row : rows) {
      lo = std::min(lo, row.ratio);
      hi = std::max(hi, row.ratio);
    }
    CHECK(lo > 0.0);
    CHECK(hi / lo <= 2.0);
  }
  for (const auto& row : expansion_compare(euclidean(4), o4, radii)) CHECK(std::abs(row.ball - row.gray) <= 1e-12);
}
