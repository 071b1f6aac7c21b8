#include <cmath>
#include <map>
#include <random>

#include <doctest.h>

#include "curvkit/error.hpp"
#include "curvkit/kleinian.hpp"

using namespace curvkit;

namespace {

GroupSpec two_boosts(double length, int max_length) {
  GroupSpec s;
  s.generators = {make_boost(3, 0, length), make_boost(3, 1, length)};
  s.max_length = max_length;
  return s;
}

Eigen::VectorXd unit(int dim, int axis) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
  v[axis] = 1.0;
  return v;
}

// Uniform points on the unit sphere of the first `sphere_dim + 1` axes of R^ambient.
std::vector<Eigen::VectorXd> round_sphere(int ambient, int sphere_dim, int count, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  std::vector<Eigen::VectorXd> pts;
  for (int i = 0; i < count; ++i) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(ambient);
    for (int k = 0; k <= sphere_dim; ++k) v[k] = n01(rng);
    pts.push_back(v.normalized());
  }
  return pts;
}

}  // namespace

TEST_CASE("Lorentz invariant survives long random products") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::vector<LorentzIsometry> pool{make_boost(3, 0, 0.8), make_boost(3, 2, 0.5), make_rotation(3, 0.9, 0, 1),
                                          make_rotation(3, 2.1, 1, 2),
                                          make_translation(0.6, unit(3, 1), Eigen::Vector3d(0.6, 0.0, 0.8))};
  double worst = 0.0, lowest = 2.0;
  for (int trial = 0; trial < 10000; ++trial) {
    LorentzIsometry g = LorentzIsometry::identity(3);
    for (int step = 1; step <= 40; ++step) {
      const LorentzIsometry& h = pool[static_cast<std::size_t>((u(rng) + 1.0) * 2.5) % pool.size()];
      g = u(rng) > 0.0 ? g * h : g * h.inverse();
      if (step % kRenormalizeEvery == 0) g = renormalize(g);
    }
    worst = std::max(worst, g.lorentz_residual());
    lowest = std::min(lowest, g.matrix()(3, 3));
  }
  CHECK(worst <= 1e-9);
  CHECK(lowest >= 1.0 - 1e-12);

  Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(4, 4);
  bad(0, 1) = 0.1;
  CHECK_THROWS_AS(LorentzIsometry{bad}, InvalidArgument);
  Eigen::MatrixXd flip = Eigen::MatrixXd::Identity(4, 4);
  flip(3, 3) = -1.0;
  CHECK_THROWS_AS(LorentzIsometry{flip}, InvalidArgument);
}

TEST_CASE("translations and rotations") {
  const double l = 1.0;
  const LorentzIsometry b = make_boost(3, 0, l);
  CHECK(b.matrix()(0, 0) == doctest::Approx(std::cosh(l)).epsilon(1e-15));
  CHECK(b.matrix()(3, 3) == doctest::Approx(std::cosh(l)).epsilon(1e-15));
  CHECK(std::abs(b.matrix()(0, 3)) == doctest::Approx(std::sinh(l)).epsilon(1e-15));
  CHECK(b.translation_length() == doctest::Approx(l).epsilon(1e-12));
  const Eigen::VectorXd o = hyperboloid_origin(3);
  CHECK(hyperbolic_distance(o, b.apply(o)) == doctest::Approx(l).epsilon(1e-12));

  // gamma^k by repeated matrix products.
  const LorentzIsometry t = make_translation(0.7, Eigen::Vector3d(0.0, 0.6, 0.8), Eigen::Vector3d(1.0, 0.0, 0.0));
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(4, 4);
  for (int k = 1; k <= 6; ++k) {
    power = power * t.matrix();
    CHECK(LorentzIsometry(power).translation_length() == doctest::Approx(0.7 * k).epsilon(1e-9));
  }
  // Eigenvalues e^{+-l} on the null directions of the axis.
  const Eigen::Vector4d attract(0.0, 0.6, 0.8, 1.0), repel(1.0, 0.0, 0.0, 1.0);
  CHECK((t.matrix() * attract - std::exp(0.7) * attract).norm() <= 1e-12);
  CHECK((t.matrix() * repel - std::exp(-0.7) * repel).norm() <= 1e-12);
  // Points on the axis move by exactly l.
  const Eigen::VectorXd mid = (attract + repel) / std::sqrt(-minkowski(attract + repel, attract + repel));
  CHECK(hyperbolic_distance(mid, t.apply(mid)) == doctest::Approx(0.7).epsilon(1e-10));

  const LorentzIsometry r = make_rotation(3, 1.3, 0, 2);
  CHECK((r * t * r.inverse()).translation_length() == doctest::Approx(0.7).epsilon(1e-10));
  CHECK(r.translation_length() == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));

  CHECK_THROWS_AS(make_translation(1.0, unit(3, 0), unit(3, 0)), InvalidArgument);
  CHECK_THROWS_AS(make_translation(-1.0, unit(3, 0), -unit(3, 0)), InvalidArgument);
}

TEST_CASE("hyperbolic distance") {
  const Eigen::VectorXd o = hyperboloid_origin(2);
  for (double l : {0.3, 1.0, 4.0}) {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(2);
    b[0] = std::tanh(l / 2.0);
    CHECK(hyperbolic_distance(o, ball_to_hyperboloid(b)) == doctest::Approx(l).epsilon(1e-12));
    CHECK((hyperboloid_to_ball(ball_to_hyperboloid(b)) - b).norm() <= 1e-14);
  }
  CHECK(hyperbolic_distance(o, o) == 0.0);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.95, 0.95);
  auto random_point = [&] {
    Eigen::VectorXd b(3);
    do {
      for (int i = 0; i < 3; ++i) b[i] = u(rng);
    } while (b.norm() >= 0.97);
    return ball_to_hyperboloid(b);
  };
  for (int i = 0; i < 200; ++i) {
    const Eigen::VectorXd x = random_point(), y = random_point(), z = random_point();
    const double xy = hyperbolic_distance(x, y), yz = hyperbolic_distance(y, z), xz = hyperbolic_distance(x, z);
    CHECK(xy == doctest::Approx(hyperbolic_distance(y, x)).epsilon(1e-12));
    CHECK(xz <= xy + yz + 1e-9);
  }
  Eigen::VectorXd off = o;
  off[2] = 1.5;
  CHECK_THROWS_AS(require_on_sheet(off), InvalidArgument);
  CHECK_THROWS_AS(hyperbolic_distance(o, off), InvalidArgument);
  CHECK_THROWS_AS(require_on_sheet(-o), InvalidArgument);
}

TEST_CASE("orbit enumeration") {
  GroupSpec cyclic;
  cyclic.generators = {make_boost(3, 0, 1.0)};
  cyclic.max_length = 5;
  const OrbitSample c = orbit_enumerate(cyclic);
  REQUIRE(c.size() == 10);
  std::vector<int> seen(6, 0);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double k = std::round(c.distance[i]);
    CHECK(c.distance[i] == doctest::Approx(k).epsilon(1e-10));
    CHECK(c.length[i] == static_cast<int>(k));
    ++seen[static_cast<int>(k)];
  }
  for (int k = 1; k <= 5; ++k) CHECK(seen[k] == 2);
  CHECK(c.complete_length == 5);
  CHECK_FALSE(c.truncated);

  const OrbitSample two = orbit_enumerate(two_boosts(2.0, 3));
  CHECK(two.size() == 52);
  for (std::size_t i = 0; i < two.size(); ++i) {
    const auto w = two.word(i);
    CHECK(static_cast<int>(w.size()) == two.length[i]);
    for (std::size_t j = 1; j < w.size(); ++j) CHECK(w[j] != (w[j - 1] + 2) % 4);
  }

  // Inverse words sit at the same distance.
  const OrbitSample big = orbit_enumerate(two_boosts(6.0, 4));
  std::map<std::vector<int>, double> by_word;
  for (std::size_t i = 0; i < big.size(); ++i) by_word[big.word(i)] = big.distance[i];
  for (const auto& [w, d] : by_word) {
    std::vector<int> inv(w.rbegin(), w.rend());
    for (int& x : inv) x = (x + 2) % 4;
    CHECK(by_word.at(inv) == doctest::Approx(d).epsilon(1e-9));
  }

  // Lower quasi-isometry bound against word length.
  const OrbitSample long_words = orbit_enumerate(two_boosts(6.0, 7));
  for (std::size_t i = 0; i < long_words.size(); ++i) CHECK(long_words.distance[i] >= 5.0 * long_words.length[i]);

  GroupSpec tight = two_boosts(6.0, 12);
  tight.memory_budget = 1 << 16;
  const OrbitSample partial = orbit_enumerate(tight);
  CHECK(partial.truncated);
  CHECK(partial.complete_length < 12);

  GroupSpec empty;
  CHECK_THROWS(orbit_enumerate(empty));
}

TEST_CASE("Poincare partial sums") {
  GroupSpec cyclic;
  cyclic.generators = {make_boost(3, 0, 1.0)};
  cyclic.max_length = 40;
  const OrbitSample c = orbit_enumerate(cyclic);
  const double limit = 2.0 * std::exp(-1.0) / (1.0 - std::exp(-1.0));
  double prev = 0.0;
  for (int L : {1, 2, 5, 10, 20, 40}) {
    const double s = poincare_partial_sum(c, 1.0, L);
    CHECK(s > prev);
    CHECK(s <= limit + 1e-12);
    prev = s;
  }
  CHECK(prev == doctest::Approx(limit).epsilon(1e-12));
  CHECK(poincare_partial_sum(c, 0.0) == doctest::Approx(80.0));

  const OrbitSample two = orbit_enumerate(two_boosts(6.0, 6));
  double last = poincare_partial_sum(two, 0.0);
  CHECK(last == doctest::Approx(static_cast<double>(two.size())));
  for (double s : {0.1, 0.2, 0.5, 1.0}) {
    const double v = poincare_partial_sum(two, s);
    CHECK(v < last);
    last = v;
  }
  CHECK(poincare_partial_sum(two, 0.3, 6) >= poincare_partial_sum(two, 0.3, 3));
}

TEST_CASE("critical exponent") {
  const OrbitSample o6 = orbit_enumerate(two_boosts(6.0, 8)), o8 = orbit_enumerate(two_boosts(8.0, 8));
  const ExponentEstimate g6 = critical_exponent_estimate(o6, ExponentMethod::growth_fit);
  const ExponentEstimate k6 = critical_exponent_estimate(o6, ExponentMethod::series_knee);
  const ExponentEstimate k8 = critical_exponent_estimate(o8, ExponentMethod::series_knee);
  CHECK(g6.value > 0.0);
  CHECK(g6.value < 1.0);
  CHECK(k8.value < k6.value);
  CHECK(std::abs(g6.value - k6.value) <= 0.05);
  // For long generators delta is close to log 3 / l.
  CHECK(k6.value == doctest::Approx(std::log(3.0) / (6.0 - std::log(2.0))).epsilon(0.05));

  // A cyclic subgroup never exceeds the full group.
  GroupSpec sub;
  sub.generators = {make_boost(3, 0, 6.0)};
  sub.max_length = 250;
  const OrbitSample cyc = orbit_enumerate(sub);
  CHECK(critical_exponent_estimate(cyc, ExponentMethod::growth_fit).value <= 0.05);
  CHECK(critical_exponent_estimate(cyc, ExponentMethod::series_knee).value <= g6.value + g6.uncertainty);
  const ExponentEstimate guarded = critical_exponent_estimate(sub, ExponentMethod::growth_fit);
  CHECK(guarded.elementary);
  CHECK(guarded.value == 0.0);

  // Conjugating every generator by a fixed isometry.
  const LorentzIsometry h = make_rotation(3, 0.4, 0, 2) * make_boost(3, 1, 0.7);
  GroupSpec conj = two_boosts(6.0, 8);
  for (auto& g : conj.generators) g = h * g * h.inverse();
  const ExponentEstimate gc = critical_exponent_estimate(orbit_enumerate(conj), ExponentMethod::growth_fit);
  CHECK(std::abs(gc.value - g6.value) <= std::max({gc.uncertainty, g6.uncertainty, 0.01}));

  CHECK_THROWS_AS(critical_exponent_estimate(orbit_enumerate(two_boosts(6.0, 3)), ExponentMethod::growth_fit),
                  PreconditionError);
}

TEST_CASE("limit set samples") {
  GroupSpec cyclic;
  cyclic.generators = {make_boost(3, 0, 2.0)};
  const LimitSetSample c = limit_set_sample(cyclic, 6, 100, 5);
  CHECK(count_clusters(c.points, kElementaryClusterRadius) == 2);
  CHECK(is_elementary(c.points));

  const GroupSpec fuchsian = two_boosts(3.0, 8);
  const LimitSetSample a = limit_set_sample(fuchsian, 10, 300, 11), b = limit_set_sample(fuchsian, 10, 300, 11);
  REQUIRE(a.points.size() == b.points.size());
  double planar = 0.0, radial = 0.0;
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(a.points[i] == b.points[i]);
    planar = std::max(planar, std::abs(a.points[i][2]));
    radial = std::max(radial, std::abs(a.points[i].norm() - 1.0));
  }
  CHECK(planar <= 1e-8);
  CHECK(radial <= 1e-10);
  CHECK_FALSE(is_elementary(a.points));

  GroupSpec elliptic;
  elliptic.generators = {make_rotation(3, 0.3, 0, 1)};
  const LimitSetSample e = limit_set_sample(elliptic, 3, 10, 1);
  CHECK(e.skipped == 10);
  CHECK(e.points.empty());
}

TEST_CASE("box dimension") {
  const auto circle = round_sphere(3, 1, 20000, 21);
  const DimensionEstimate d1 = box_dimension(circle, scale_ladder(0.05, 0.5, 5));
  CHECK(std::abs(d1.value - 1.0) <= 0.05);
  CHECK(d1.fit_error >= 0.0);
  CHECK(d1.counts.size() == 5);

  const auto s2 = round_sphere(4, 2, 100000, 22);
  CHECK(std::abs(box_dimension(s2, automatic_ladder(s2)).value - 2.0) <= 0.1);

  const auto ladder = automatic_ladder(circle);
  CHECK(ladder.size() == 6);
  CHECK(std::abs(box_dimension(circle, ladder).value - 1.0) <= 0.05);

  CHECK_THROWS_AS(box_dimension(round_sphere(3, 1, 400, 1), scale_ladder(0.2, 0.6, 5)), PreconditionError);
  CHECK_THROWS_AS(box_dimension(circle, scale_ladder(0.2, 0.6, 3)), InvalidArgument);
  CHECK_THROWS_AS(box_dimension(circle, {0.2, 0.1, 0.1, 0.05}), InvalidArgument);
}
