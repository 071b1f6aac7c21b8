#include <cmath>
#include <numbers>

#include <doctest.h>

#include "curvkit/catalog.hpp"
#include "curvkit/curvature.hpp"
#include "curvkit/error.hpp"
#include "curvkit/globalint.hpp"
#include "curvkit/quadrature.hpp"

using namespace curvkit;
using std::numbers::pi;

namespace {

const double kVolS4 = 8.0 * pi * pi / 3.0;
const double kVolS6 = 16.0 * pi * pi * pi / 15.0;

ScalarField constant_field(double c) {
  return [c](std::span<const Jet> x) { return Jet(x[0].basis(), c); };
}

// Flat T^6 read with many nodes on the first two axes and one on the rest;
// exact for fields that depend on x_0 and x_1 only.
Atlas thin_torus6(int nodes) {
  Atlas atlas = torus_atlas(6, 1);
  std::vector<AxisRule> axes(6, periodic_trapezoid(1, 0.0, 1.0));
  axes[0] = axes[1] = periodic_trapezoid(nodes, 0.0, 1.0);
  atlas.patches[0].grid = QuadratureGrid(axes);
  return atlas;
}

}  // namespace

TEST_CASE("axis rules") {
  const AxisRule gl = gauss_legendre(7, -1.0, 2.0);
  double s = 0.0, m = 0.0;
  for (int i = 0; i < gl.size(); ++i) {
    CHECK(gl.weights[i] > 0.0);
    s += gl.weights[i];
    m += gl.weights[i] * std::pow(gl.nodes[i], 13);
  }
  CHECK(s == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(m == doctest::Approx((std::pow(2.0, 14) - 1.0) / 14.0).epsilon(1e-13));
  const AxisRule tr = periodic_trapezoid(9, 0.0, 2.0 * pi);
  double c = 0.0;
  for (int i = 0; i < tr.size(); ++i) c += tr.weights[i] * std::cos(4.0 * tr.nodes[i]) * std::cos(4.0 * tr.nodes[i]);
  CHECK(c == doctest::Approx(pi).epsilon(1e-14));
  CHECK_THROWS_AS(gauss_legendre_cells(3, {0.0, 1.0, 0.5}), InvalidArgument);
}

TEST_CASE("sphere atlas volumes and partition of unity") {
  const Atlas s4 = sphere_atlas(4);
  CHECK(s4.partition_check() <= kPartitionTolerance);
  CHECK(volume(s4) == doctest::Approx(kVolS4).epsilon(1e-6));
  CHECK(volume(sphere_atlas(6, 12)) == doctest::Approx(kVolS6).epsilon(1e-6));
  CHECK(volume(sphere_atlas(3, 16, 2.0)) == doctest::Approx(2.0 * pi * pi * 8.0).epsilon(1e-8));
  CHECK(integrate(s4, [](const Patch&, std::span<const double>) { return 0.0; }) == 0.0);
  for (double r : {0.1, 0.8, 0.9, 1.0, 1.1, 1.25, 2.0}) {
    CHECK(sphere_partition(r) + sphere_partition(1.0 / r) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(sphere_partition(r) >= 0.0);
  }
}

TEST_CASE("quadrature error falls by at least 16 per doubling") {
  for (int n : {4, 6}) {
    const double coarse = std::abs(volume(sphere_atlas(4, n)) / kVolS4 - 1.0);
    const double fine = std::abs(volume(sphere_atlas(4, 2 * n)) / kVolS4 - 1.0);
    INFO("n=", n, " coarse=", coarse, " fine=", fine);
    CHECK(fine <= coarse / 16.0);
  }
}

TEST_CASE("quadrature is bit-stable") {
  const Atlas s4 = sphere_atlas(4, 8);
  const double a = volume(s4), b = volume(s4);
  CHECK(a == b);
}

TEST_CASE("gbc4 on closed 4-manifolds") {
  const Gbc4Breakdown s4 = gbc4(sphere_atlas(4, 16));
  CHECK(s4.total == doctest::Approx(64.0 * pi * pi).epsilon(1e-10));
  CHECK(s4.scal2_term == doctest::Approx(144.0 / 6.0 * kVolS4).epsilon(1e-10));
  CHECK(std::abs(s4.ricci_term) <= 1e-9);
  CHECK(std::abs(s4.weyl_term) <= 1e-9);
  CHECK(std::lround(s4.chi_estimate) == 2);

  const Gbc4Breakdown t4 = gbc4(torus_atlas(4, 4));
  CHECK(t4.total == 0.0);
  CHECK(std::lround(t4.chi_estimate) == 0);

  const Gbc4Breakdown p = gbc4(named_atlas("S2xS2", 12));
  CHECK(p.chi_estimate == doctest::Approx(4.0).epsilon(1e-8));
  CHECK(p.weyl_term == doctest::Approx(16.0 / 3.0 * 16.0 * pi * pi).epsilon(1e-8));
  CHECK(p.scal2_term == doctest::Approx(16.0 / 6.0 * 16.0 * pi * pi).epsilon(1e-8));
  CHECK(p.weyl_term / p.volume == doctest::Approx(16.0 / 3.0).epsilon(1e-10));

  CHECK_THROWS_AS(gbc4(box_atlas(euclidean(4), Box::cube(4, 0, 1), 2)), PreconditionError);
  CHECK_THROWS_AS(gbc4(sphere_atlas(3, 4)), PreconditionError);
}

TEST_CASE("gbc4 density is scale invariant") {
  for (const auto& entry : catalog()) {
    if (entry.chart.dim() != 4) continue;
    const MetricChart scaled = homothety(entry.chart, 2.3);
    for (const auto& x : sample_points(entry.chart, 4)) {
      const double a = gbc4_density(entry.chart, x), b = gbc4_density(scaled, x);
      CHECK(std::abs(a * std::pow(2.3, -4) - b) <= 1e-9 * std::max(1.0, std::abs(a)));
    }
  }
}

TEST_CASE("gbc6 on flat and LCF 6-manifolds") {
  const Gbc6Breakdown t6 = gbc6(torus_atlas(6, 2));
  CHECK(t6.total == 0.0);
  CHECK(std::lround(t6.chi_estimate) == 0);
  // S^6 integrand is (1/225) 30^3 pointwise.
  const Gbc6Breakdown s6 = gbc6(sphere_atlas(6, 6));
  CHECK(s6.scal3_term == doctest::Approx(27000.0 / 225.0 * volume(sphere_atlas(6, 6))).epsilon(1e-12));
  CHECK(std::abs(s6.scal_ring_term) <= 1e-8 * s6.scal3_term);
  // Equal-scale H^3 x S^3 has Ring = diag(-2, -2, -2, 2, 2, 2) in a frame.
  const MetricChart hs = product(hyperbolic_ball(3), sphere_stereographic(3));
  for (const auto& x : sample_points(hs, 4)) {
    const CurvaturePoint cp = curvature_at(hs, x);
    CHECK(std::abs(cp.scalar) <= 1e-12);
    CHECK(cp.ring_norm2 == doctest::Approx(24.0).epsilon(1e-12));
    CHECK(std::abs(trace_cubed(cp.traceless_ricci, cp.inverse_metric)) <= 1e-11);
    const RingDerivativeData d = ring_derivative_data(hs, x);
    CHECK(std::abs(d.grad_ring_norm2) <= 1e-10);
    CHECK(std::abs(d.grad_scalar_norm2) <= 1e-10);
    CHECK(std::abs(d.trace_ring_cubed) <= 1e-11);
    CHECK(std::abs(d.scalar_ring_norm2) <= 1e-10);
  }
  const Gbc6Breakdown box = gbc6(box_atlas(hs, Box::cube(6, -0.3, 0.3), 2));
  CHECK(std::abs(box.total) <= 1e-10);
  CHECK_THROWS_AS(gbc6(named_atlas("S2xS4", 2)), PreconditionError);
}

TEST_CASE("Gursky identity") {
  // Round S^6 and H^3 x S^3: every integral vanishes.
  const MetricChart hs = product(hyperbolic_ball(3), sphere_stereographic(3));
  const GurskyResult h = gursky_identity_residual(box_atlas(hs, Box::cube(6, -0.3, 0.3), 2));
  CHECK(std::abs(h.lhs) <= 1e-9);
  CHECK(std::abs(h.rhs) <= 1e-9);
  const GurskyResult s = gursky_identity_residual(torus_atlas(6, 2));
  CHECK(s.residual == 0.0);

  // A conformally flat metric on T^6 is LCF and closed.
  const ScalarField f = [](std::span<const Jet> x) {
    return 0.15 * sin(2.0 * pi * x[0]) + 0.1 * cos(2.0 * pi * x[1]) * sin(2.0 * pi * x[0] + 0.4);
  };
  const GurskyResult coarse = gursky_identity_residual(conformal_atlas(thin_torus6(16), f));
  const GurskyResult fine = gursky_identity_residual(conformal_atlas(thin_torus6(32), f));
  CHECK(fine.lhs > 0.0);
  CHECK(fine.residual <= 1e-4);
  CHECK(std::abs(fine.lhs - coarse.lhs) <= 1e-4 * fine.lhs);
  CHECK_THROWS_AS(gursky_identity_residual(named_atlas("S2xS4", 2)), PreconditionError);
}

TEST_CASE("signature") {
  CHECK(std::abs(signature_integral(sphere_atlas(4, 8))) <= 1e-12);
  CHECK(std::abs(signature_integral(named_atlas("S2xS2", 8))) <= 1e-10);
  CHECK_THROWS_AS(signature_integral(box_atlas(euclidean(4), Box::cube(4, 0, 1), 2)), PreconditionError);
  // Reversal flips the pointwise integrand of a chart with W+ != W-.
  const MetricChart b("generic", 4, Box::cube(4, -1, 1), [](std::span<const Jet> x) {
    const JetVec s{sin(x[0]), x[1] * x[2], cos(x[3]) * x[0], x[1] + 0.5 * x[3] * x[3]};
    JetVec g;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) g.push_back((i == j ? 1.0 : 0.0) + 0.3 * s[i] * s[j]);
    return g;
  });
  const CurvaturePoint cp = curvature_at(b, std::vector<double>{0.5, 0.4, -0.2, 0.3});
  const WeylSplit w = weyl_pm_norms(cp, 1), r = weyl_pm_norms(cp, -1);
  CHECK(std::abs(w.plus - w.minus) > 1e-3);
  CHECK((r.plus - r.minus) == doctest::Approx(-(w.plus - w.minus)).epsilon(1e-12));
  const Atlas s2s2 = named_atlas("S2xS2", 8);
  CHECK(signature_integral(reversed(s2s2)) == doctest::Approx(-signature_integral(s2s2)).scale(1.0).epsilon(1e-12));
}

TEST_CASE("normalized functionals") {
  const Atlas s4 = sphere_atlas(4, 12);
  CHECK(hilbert_einstein(s4) == doctest::Approx(12.0 * std::sqrt(kVolS4)).epsilon(1e-8));
  CHECK(hilbert_einstein(homothety(s4, 1.9)) == doctest::Approx(hilbert_einstein(s4)).epsilon(1e-8));
  CHECK(yamabe_quotient(s4, constant_field(1.0)) == doctest::Approx(12.0 * std::sqrt(kVolS4)).epsilon(1e-8));
  CHECK(rayleigh_lambda(s4, constant_field(1.0)) == doctest::Approx(12.0).epsilon(1e-8));
  CHECK(l_halfpower(s4) == doctest::Approx(144.0 * kVolS4).epsilon(1e-8));
  const ScalarField u = [](std::span<const Jet> y) { return 1.0 + 0.3 * y[0]; };
  CHECK(yamabe_quotient(homothety(s4, 0.7), u) == doctest::Approx(yamabe_quotient(s4, u)).epsilon(1e-8));
  // The first harmonic raises the Rayleigh quotient above 12.
  CHECK(rayleigh_lambda(s4, u) > 12.0);

  const Atlas t4 = torus_atlas(4, 6);
  CHECK(hilbert_einstein(t4) == 0.0);
  CHECK(l_halfpower(t4) == 0.0);
  CHECK(rayleigh_lambda(t4, constant_field(1.0)) == 0.0);
  CHECK(l_halfpower(named_atlas("nil3", 6)) > 0.0);
  CHECK_THROWS_AS(yamabe_quotient(s4, constant_field(-1.0)), PreconditionError);
}

TEST_CASE("sharp Sobolev inequality on S^4") {
  const Atlas coarse = sphere_atlas(4, 12), fine = sphere_atlas(4, 16);
  const SobolevResult one = sobolev_check(fine, constant_field(1.0));
  CHECK(std::abs(one.slack) <= 1e-9);
  const ScalarField u = [](std::span<const Jet> y) { return 1.0 + 0.5 * y[0]; };
  const SobolevResult a = sobolev_check(coarse, u), b = sobolev_check(fine, u);
  CHECK(b.slack > 1e-3);
  CHECK(std::abs(a.slack - b.slack) <= 1e-6 * b.slack);
  std::vector<ScalarField> fields{u};
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    fields.push_back(random_trig_polynomial(4, seed));
    const SobolevResult r = sobolev_check(coarse, fields.back());
    CHECK(r.slack >= -1e-9);
    CHECK(r.slack > 1e-8);
  }
  const auto batch = sobolev_check(coarse, fields);
  REQUIRE(batch.size() == fields.size());
  CHECK(batch[0].slack == doctest::Approx(a.slack).epsilon(1e-12));
  CHECK(batch[5].lhs == doctest::Approx(sobolev_check(coarse, fields[5]).lhs).epsilon(1e-12));
}

TEST_CASE("Yamabe descent") {
  const Atlas s4 = sphere_atlas(4, 8);
  const DescentResult fixed = yamabe_descent(s4, constant_field(1.0));
  CHECK(fixed.converged);
  CHECK(fixed.trajectory.size() <= 1);
  CHECK(fixed.final_scalar_variance <= 1e-20);

  const ScalarField u0 = [](std::span<const Jet> y) {
    return 1.0 + 0.2 * sin(2.0 * pi * y[0]) + 0.1 * cos(2.0 * pi * y[2]) * cos(2.0 * pi * y[3]);
  };
  const DescentResult t = yamabe_descent(torus_atlas(4, 6), u0);
  CHECK(t.monotone);
  CHECK(t.final_quotient >= -1e-12);
  CHECK(t.final_quotient <= t.trajectory.front().quotient);
  for (std::size_t i = 1; i < t.trajectory.size(); ++i)
    CHECK(t.trajectory[i].quotient <= t.trajectory[i - 1].quotient + 1e-12);
  CHECK_THROWS_AS(yamabe_descent(s4, constant_field(-1.0)), PreconditionError);
}

TEST_CASE("conformal volume comparison on the Heisenberg quotient") {
  const Atlas nil = named_atlas("nil3", 8);
  const ConformalVolumeReport zero = conformal_volume_check(nil, 0.5, constant_field(0.0));
  CHECK(zero.precondition_ok);
  CHECK(std::abs(zero.exp2f_slack) <= 1e-14);
  CHECK(std::abs(zero.volume_slack) <= 1e-14);
  CHECK(std::abs(zero.holder_slack) <= 1e-14);
  const ConformalVolumeReport up = conformal_volume_check(nil, 0.5, constant_field(0.1));
  CHECK(up.precondition_ok);
  CHECK(up.new_volume == doctest::Approx(std::exp(0.3) * up.volume).epsilon(1e-12));
  CHECK(up.volume_slack > 0.0);
  int tested = 0;
  for (int k = 0; k < 12; ++k) {
    const double a = 0.0005 * (k + 1);
    const ScalarField f = [a, k](std::span<const Jet> x) {
      return 0.2 + a * sin(2.0 * pi * x[0] + k) * cos(2.0 * pi * x[2]);
    };
    CHECK(holder_slack(nil, f) >= -1e-12);
    const ConformalVolumeReport r = conformal_volume_check(nil, 0.5, f);
    if (!r.precondition_ok) continue;
    ++tested;
    CHECK(r.exp2f_slack >= -1e-12);
    CHECK(r.volume_slack >= -1e-12);
    CHECK(r.holder_slack >= -1e-12);
  }
  CHECK(tested > 0);
  CHECK_THROWS_AS(conformal_volume_check(sphere_atlas(4, 4), 0.5, constant_field(0.0)), PreconditionError);
}
