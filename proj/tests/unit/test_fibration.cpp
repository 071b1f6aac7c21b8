#include <cmath>
#include <numbers>

#include <doctest.h>

#include "curvkit/catalog.hpp"
#include "curvkit/curvature.hpp"
#include "curvkit/error.hpp"
#include "curvkit/fibration.hpp"
#include "curvkit/quadrature.hpp"

using namespace curvkit;
using std::numbers::pi;

namespace {

std::vector<double> lift(std::vector<double> x, double t) {
  x.push_back(t);
  return x;
}

}  // namespace

TEST_CASE("connection metric components") {
  const double eps = 0.7, lambda = 1.3;
  const ConnectionData d = make_connection(euclidean(2), flat_potential(lambda), eps);
  const MetricChart total = connection_metric(d);
  REQUIRE(total.dim() == 3);
  CHECK(total.domain().periodic[2]);
  const std::vector<double> p{0.4, -0.3, 1.1};
  const double a0 = -0.5 * lambda * p[1], a1 = 0.5 * lambda * p[0], e2 = eps * eps;
  const Eigen::MatrixXd g = total.metric_at(p);
  CHECK(g(0, 0) == doctest::Approx(1.0 + e2 * a0 * a0).epsilon(1e-14));
  CHECK(g(0, 1) == doctest::Approx(e2 * a0 * a1).epsilon(1e-14));
  CHECK(g(1, 1) == doctest::Approx(1.0 + e2 * a1 * a1).epsilon(1e-14));
  CHECK(g(0, 2) == doctest::Approx(e2 * a0).epsilon(1e-14));
  CHECK(g(1, 2) == doctest::Approx(e2 * a1).epsilon(1e-14));
  CHECK(g(2, 2) == doctest::Approx(e2).epsilon(1e-14));

  // a = 0 is the product metric.
  const MetricChart prod = connection_metric(make_connection(sphere_polar(2), zero_potential(2), 0.5));
  const Eigen::MatrixXd gp = prod.metric_at(std::vector<double>{1.0, 0.2, 0.0});
  CHECK(gp(1, 1) == doctest::Approx(std::sin(1.0) * std::sin(1.0)).epsilon(1e-14));
  CHECK(gp(2, 2) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(gp(0, 2) == 0.0);
  CHECK(gp(1, 2) == 0.0);

  CHECK_THROWS_AS(make_connection(euclidean(2), flat_potential(1.0), 0.0), InvalidArgument);
  CHECK_THROWS_AS(make_connection(euclidean(2), flat_potential(1.0), -1.0), InvalidArgument);
  CHECK_THROWS_AS(make_connection(euclidean(1), zero_potential(1), 1.0), InvalidArgument);
}

TEST_CASE("curvature form and its norm") {
  const double lambda = 0.9;
  const ConnectionData flat = make_connection(euclidean(2), flat_potential(lambda), 1.0);
  const ConnectionData round = make_connection(sphere_polar(2), sphere_potential(lambda), 1.0);
  const ConnectionData hyp = make_connection(hyperbolic_halfspace(2), halfplane_potential(lambda), 1.0);
  for (const auto& x : {std::vector<double>{0.3, 0.7}, std::vector<double>{1.2, 2.0}, std::vector<double>{2.5, 0.4}}) {
    const auto w = curvature_form(flat, x);
    CHECK(w[1] == doctest::Approx(lambda).epsilon(1e-14));
    CHECK(w[2] == doctest::Approx(-lambda).epsilon(1e-14));
    CHECK(omega_hs_norm(flat, x) == doctest::Approx(2 * lambda * lambda).epsilon(1e-12));
    // d(lambda (1 - cos theta)) = lambda sin theta d theta.
    CHECK(curvature_form(round, x)[1] == doctest::Approx(lambda * std::sin(x[0])).epsilon(1e-13));
    CHECK(omega_hs_norm(round, x) == doctest::Approx(2 * lambda * lambda).epsilon(1e-10));
    CHECK(omega_hs_norm(hyp, x) == doctest::Approx(2 * lambda * lambda).epsilon(1e-10));
    CHECK(omega_hs_norm(make_connection(euclidean(2), zero_potential(2), 1.0), x) == 0.0);
  }

  // Closed in higher dimension, with a generic potential.
  const OneForm twisted = [](std::span<const Jet> x) {
    JetVec a(3, x[0].zero_like());
    a[0] = sin(x[1] * x[2]);
    a[1] = x[0] * x[0] * cos(x[2]);
    a[2] = exp(0.3 * x[0]) * x[1];
    return a;
  };
  const ConnectionData d3 = make_connection(euclidean(3), twisted, 0.4);
  CHECK(closedness_residual(d3, std::vector<double>{0.2, -0.5, 0.8}) <= 1e-10);

  // Norm is frame independent: a rescaled base scales it by the inverse square.
  const ConnectionData scaled = make_connection(homothety(euclidean(2), 3.0), flat_potential(lambda), 1.0);
  CHECK(omega_hs_norm(scaled, std::vector<double>{0.1, 0.2}) ==
        doctest::Approx(2 * lambda * lambda / 81.0).epsilon(1e-10));
}

TEST_CASE("O'Neill scalar curvature") {
  for (double eps : {0.1, 0.5, 1.0, 2.0}) {
    for (double lambda : {0.0, 0.7, 1.5}) {
      const ConnectionData flat = make_connection(euclidean(2), flat_potential(lambda), eps);
      const ConnectionData round = make_connection(sphere_polar(2), sphere_potential(lambda), eps);
      const std::vector<double> pf{0.3, -0.2, 0.9}, ps{1.1, 0.4, 2.0};
      const double hand = -eps * eps * lambda * lambda / 2.0;
      CHECK(curvature_at(connection_metric(flat), pf).scalar == doctest::Approx(hand).epsilon(1e-9).scale(1.0));
      CHECK(curvature_at(connection_metric(round), ps).scalar == doctest::Approx(2.0 + hand).epsilon(1e-9));
      CHECK(oneill_residual(flat, pf) <= 1e-8);
      CHECK(oneill_residual(round, ps) <= 1e-8);
    }
  }
  // Non-constant |omega| over a hyperbolic and a generic base.
  const ConnectionData hyp = make_connection(hyperbolic_halfspace(2), halfplane_potential(0.8), 0.6);
  CHECK(oneill_residual(hyp, std::vector<double>{0.3, 0.7, 1.0}) <= 1e-8);
  const OneForm bumpy = [](std::span<const Jet> x) {
    JetVec a(3, x[0].zero_like());
    a[0] = x[1] * exp(-x[2] * x[2]);
    a[1] = sin(x[0]) * x[2];
    a[2] = 0.5 * x[0] * x[1];
    return a;
  };
  const ConnectionData gen = make_connection(nil3(), bumpy, 0.7);
  for (const auto& x : sample_points(nil3(), 5, 3)) CHECK(oneill_residual(gen, lift(x, 0.5)) <= 1e-8);

  CHECK_THROWS_AS(oneill_residual(hyp, std::vector<double>{0.3, 0.7}), InvalidArgument);
}

TEST_CASE("fibers are geodesics") {
  const ConnectionData round = make_connection(sphere_polar(2), sphere_potential(1.2), 0.8);
  const ConnectionData hyp = make_connection(hyperbolic_halfspace(2), halfplane_potential(0.5), 1.5);
  for (double t : {0.0, 1.0, 4.0}) {
    CHECK(fiber_geodesic_residual(round, std::vector<double>{0.9, 0.3, t}) <= 1e-9);
    CHECK(fiber_geodesic_residual(hyp, std::vector<double>{-0.4, 1.3, t}) <= 1e-9);
  }
}

TEST_CASE("A-tensor") {
  const double eps = 0.6, lambda = 1.4;
  const ConnectionData flat = make_connection(euclidean(2), flat_potential(lambda), eps);
  const std::vector<double> p{0.25, -0.6, 0.3}, ex{1.0, 0.0}, ey{0.0, 1.0};
  const ATensorCheck c = a_tensor_check(flat, ex, ey, p);
  CHECK(std::abs(c.computed) == doctest::Approx(eps * lambda / 2.0).epsilon(1e-10));
  CHECK(c.residual <= 1e-8);
  // omega(RX, RY) = omega(X, Y) for a rotation R.
  for (double angle : {0.3, 1.2, 2.9}) {
    const double co = std::cos(angle), si = std::sin(angle);
    const std::vector<double> rx{co, si}, ry{-si, co};
    const ATensorCheck r = a_tensor_check(flat, rx, ry, p);
    CHECK(r.residual <= 1e-8);
    CHECK(r.computed == doctest::Approx(c.computed).epsilon(1e-10));
  }
  const ATensorCheck zero = a_tensor_check(make_connection(euclidean(2), zero_potential(2), eps), ex, ey, p);
  CHECK(std::abs(zero.computed) <= 1e-14);

  const ConnectionData round = make_connection(sphere_polar(2), sphere_potential(0.9), 1.3);
  const std::vector<double> X{0.4, -1.1}, Y{0.8, 0.5};
  CHECK(a_tensor_check(round, X, Y, std::vector<double>{1.0, 0.6, 2.2}).residual <= 1e-8);
  CHECK_THROWS_AS(a_tensor_check(round, std::vector<double>{1.0}, Y, std::vector<double>{1.0, 0.6, 2.2}),
                  InvalidArgument);
}

TEST_CASE("small-fiber limit") {
  const std::vector<double> eps{0.1, 0.2, 0.4};
  const EpsilonFit s = epsilon_slope_fit(sphere_polar(2), sphere_potential(1.1), std::vector<double>{0.8, 0.2, 0.0}, eps);
  CHECK(std::abs(s.slope - s.expected_slope) <= 1e-6);
  CHECK(s.expected_slope == doctest::Approx(-2 * 1.1 * 1.1 / 4.0).epsilon(1e-10));
  CHECK(std::abs(s.intercept - 2.0) <= 1e-8);
  const EpsilonFit h = epsilon_slope_fit(hyperbolic_halfspace(2), halfplane_potential(0.6),
                                         std::vector<double>{0.1, 0.9, 1.0}, eps);
  CHECK(std::abs(h.slope - h.expected_slope) <= 1e-6);
  CHECK(std::abs(h.intercept + 2.0) <= 1e-8);
  CHECK_THROWS_AS(epsilon_slope_fit(euclidean(2), flat_potential(1.0), std::vector<double>{0, 0, 0},
                                    std::vector<double>{0.1}),
                  InvalidArgument);
}

TEST_CASE("gauge invariance") {
  const ScalarField chi = [](std::span<const Jet> x) { return sin(x[0]) * x[1] + 0.3 * x[0] * x[0]; };
  const double eps = 0.8;
  const ConnectionData d = make_connection(euclidean(2), flat_potential(1.2), eps);
  const ConnectionData g = make_connection(euclidean(2), gauge_shift(flat_potential(1.2), chi), eps);
  for (const std::vector<double>& x : {std::vector<double>{0.3, 0.4}, std::vector<double>{-1.0, 0.7}}) {
    // t' = t - chi(x) sends one metric to the other.
    const double c = std::sin(x[0]) * x[1] + 0.3 * x[0] * x[0];
    const double sc = curvature_at(connection_metric(d), lift(x, 1.0)).scalar;
    const double sg = curvature_at(connection_metric(g), lift(x, 1.0 - c)).scalar;
    CHECK(std::abs(sc - sg) <= 1e-9);
    const auto w = curvature_form(d, x), wg = curvature_form(g, x);
    for (std::size_t i = 0; i < w.size(); ++i) CHECK(wg[i] == doctest::Approx(w[i]).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("total space volume") {
  const double eps = 0.45;
  const ConnectionData torus = make_connection(flat_torus(2), flat_potential(0.8), eps);
  const int n = 16;
  Atlas a;
  a.name = "T2~conn";
  a.closed = true;
  a.patches.push_back(Patch{connection_metric(torus),
                            QuadratureGrid({periodic_trapezoid(n, 0, 1), periodic_trapezoid(n, 0, 1),
                                            periodic_trapezoid(n, 0, 2 * pi)}),
                            {}, {}, 1, {}});
  CHECK(volume(a) == doctest::Approx(eps * 2 * pi * 1.0).epsilon(1e-8));

  const ConnectionData round = make_connection(sphere_polar(2), sphere_potential(0.7), eps);
  const MetricChart total = connection_metric(round);
  Box box = total.domain();
  box.lo[0] = 0.0;
  box.hi[0] = pi;
  CHECK(volume(box_atlas(total, box, 16)) == doctest::Approx(eps * 2 * pi * 4 * pi).epsilon(1e-8));
}
