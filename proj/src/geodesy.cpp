#include "curvkit/geodesy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "curvkit/curvature.hpp"
#include "curvkit/error.hpp"
#include "curvkit/parallel.hpp"
#include "curvkit/quadrature.hpp"

namespace curvkit {

namespace {

namespace odeint = boost::numeric::odeint;
using State = std::vector<double>;
using Stepper = odeint::runge_kutta_dopri5<State>;

constexpr double kPi = std::numbers::pi;

// Thrown by the right-hand side when a stage point leaves the chart.
struct OffChart {};

std::string format_point(std::span<const double> x) {
  std::ostringstream os;
  os.precision(10);
  os << "(";
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ")";
  return os.str();
}

// Geodesic flow, optionally with m Jacobi fields (J, J') appended.
struct GeodesicSystem {
  const MetricChart* chart;
  int n;
  int m;

  void operator()(const State& y, State& dy, double) const {
    const std::span<const double> x(y.data(), n);
    if (!chart->contains(x)) throw OffChart{};
    const ChristoffelData cd = christoffel_at(*chart, x, m > 0);
    const double* v = y.data() + n;
    for (int i = 0; i < n; ++i) dy[i] = v[i];
    for (int k = 0; k < n; ++k) {
      double s = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) s += cd.christoffel[(k * n + i) * n + j] * v[i] * v[j];
      dy[n + k] = -s;
    }
    if (m == 0) return;
    const double* jac = y.data() + 2 * n;
    const double* djac = jac + n * m;
    double* out_j = dy.data() + 2 * n;
    double* out_dj = out_j + n * m;
    // d_m G^k_ij v^i v^j, then contracted with J^m.
    std::vector<double> dgvv(n * n, 0.0);
    for (int mm = 0; mm < n; ++mm)
      for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) s += cd.dchristoffel[((mm * n + k) * n + i) * n + j] * v[i] * v[j];
        dgvv[mm * n + k] = s;
      }
    std::vector<double> gv(n * n, 0.0);  // G^k_ij v^i at [k n + j]
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += cd.christoffel[(k * n + i) * n + j] * v[i];
        gv[k * n + j] = s;
      }
    for (int a = 0; a < m; ++a) {
      for (int k = 0; k < n; ++k) {
        out_j[a * n + k] = djac[a * n + k];
        double s = 0.0;
        for (int mm = 0; mm < n; ++mm) s += dgvv[mm * n + k] * jac[a * n + mm];
        for (int j = 0; j < n; ++j) s += 2.0 * gv[k * n + j] * djac[a * n + j];
        out_dj[a * n + k] = -s;
      }
    }
  }
};

// Integrates y from t0 to t1 with step control; returns the final step size.
double advance(const GeodesicSystem& sys, State& y, double t0, double t1, double tol, double dt, int& steps,
               int& rejected) {
  auto stepper = odeint::make_controlled<Stepper>(tol, tol);
  double t = t0;
  dt = std::min(dt, t1 - t0);
  bool hit_boundary = false;
  while (t < t1) {
    if (t + dt > t1) dt = t1 - t;
    odeint::controlled_step_result res;
    try {
      res = stepper.try_step(sys, y, t, dt);
    } catch (const OffChart&) {
      hit_boundary = true;
      dt *= 0.5;
      res = odeint::fail;
    }
    if (res == odeint::success) {
      ++steps;
      continue;
    }
    ++rejected;
    if (dt < 1e-14 * std::max(1.0, std::abs(t))) {
      const std::span<const double> x(y.data(), sys.n);
      if (hit_boundary)
        throw DomainError("geodesic leaves chart '" + sys.chart->name() + "' at " + format_point(x) +
                          ", t = " + std::to_string(t));
      throw Error("geodesic_shoot: step size underflow at t = " + std::to_string(t));
    }
  }
  return dt;
}

// Orthonormal complement of the unit vector u: columns 1..n-1 of the
// Householder reflection sending e_0 to u.
Eigen::MatrixXd perpendicular_basis(const Eigen::VectorXd& u) {
  const int n = static_cast<int>(u.size());
  Eigen::VectorXd w = u;
  w[0] -= 1.0;
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);
  const double ww = w.squaredNorm();
  if (ww > 1e-30) h -= 2.0 * w * w.transpose() / ww;
  return h.rightCols(n - 1);
}

// Unit direction from hyperspherical angles; returns the S^{n-1} density.
double direction(std::span<const double> angles, Eigen::VectorXd& u) {
  const int n = static_cast<int>(angles.size()) + 1;
  u.resize(n);
  double s = 1.0, w = 1.0;
  for (int i = 0; i < n - 2; ++i) {
    u[i] = s * std::cos(angles[i]);
    const double si = std::sin(angles[i]);
    w *= std::pow(si, n - 2 - i);
    s *= si;
  }
  u[n - 2] = s * std::cos(angles[n - 2]);
  u[n - 1] = s * std::sin(angles[n - 2]);
  return w;
}

double jacobian_determinant(const MetricChart& chart, const State& y, int n) {
  const int m = n - 1;
  const Eigen::MatrixXd g = chart.metric_at(std::span<const double>(y.data(), n));
  Eigen::MatrixXd j(n, m);
  for (int a = 0; a < m; ++a)
    for (int k = 0; k < n; ++k) j(k, a) = y[2 * n + a * n + k];
  const double det = (j.transpose() * g * j).determinant();
  return std::sqrt(std::max(0.0, det));
}

State initial_state(std::span<const double> x, const Eigen::VectorXd& v, const Eigen::MatrixXd& perp) {
  const int n = static_cast<int>(x.size()), m = static_cast<int>(perp.cols());
  State y(2 * n + 2 * n * m, 0.0);
  for (int i = 0; i < n; ++i) {
    y[i] = x[i];
    y[n + i] = v[i];
  }
  for (int a = 0; a < m; ++a)
    for (int k = 0; k < n; ++k) y[2 * n + n * m + a * n + k] = perp(k, a);
  return y;
}

void require_guard(const MetricChart& chart, double r) {
  if (!(r > 0.0)) throw InvalidArgument("ball_volume: radius must be positive");
  if (!(r < chart.injectivity_guard()))
    throw PreconditionError("ball_volume: radius " + std::to_string(r) + " exceeds the injectivity guard " +
                            std::to_string(chart.injectivity_guard()) + " of chart '" + chart.name() + "'");
}

}  // namespace

GeodesicState geodesic_shoot(const MetricChart& chart, std::span<const double> x, std::span<const double> v, double t,
                             double tol) {
  const int n = chart.dim();
  if (static_cast<int>(x.size()) != n || static_cast<int>(v.size()) != n)
    throw InvalidArgument("geodesic_shoot: dimension mismatch");
  chart.require_contains(x);
  if (!(t >= 0.0)) throw InvalidArgument("geodesic_shoot: t must be nonnegative");
  const GeodesicSystem sys{&chart, n, 0};
  State y(2 * n);
  for (int i = 0; i < n; ++i) {
    y[i] = x[i];
    y[n + i] = v[i];
  }
  GeodesicState out;
  if (t > 0.0) advance(sys, y, 0.0, t, tol, std::min(t, 0.01), out.steps, out.rejected);
  out.position.assign(y.begin(), y.begin() + n);
  out.velocity.assign(y.begin() + n, y.end());
  out.t = t;
  out.tolerance = tol;
  return out;
}

double euclidean_ball_volume(int n, double r) {
  return std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n + 1.0) * std::pow(r, n);
}

VolumeEstimate ball_volume(const MetricChart& chart, std::span<const double> x, double r,
                           const VolumeOptions& options) {
  const int n = chart.dim();
  if (n < 2) throw InvalidArgument("ball_volume: dimension must be >= 2");
  chart.require_contains(x);
  require_guard(chart, r);
  const Eigen::MatrixXd frame = orthonormal_frame(chart.metric_at(x));
  const GeodesicSystem sys{&chart, n, n - 1};
  const std::vector<double> base(x.begin(), x.end());

  if (options.method == VolumeMethod::monte_carlo) {
    if (options.samples < 2) throw InvalidArgument("ball_volume: need at least 2 samples");
    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<Eigen::VectorXd> dirs(options.samples);
    std::vector<double> radii(options.samples);
    for (int s = 0; s < options.samples; ++s) {
      Eigen::VectorXd u(n);
      for (int i = 0; i < n; ++i) u[i] = normal(rng);
      dirs[s] = u.normalized();
      radii[s] = r * std::pow(unif(rng), 1.0 / n);
    }
    const auto sums = parallel_sum(options.samples, 2, [&](std::size_t s, std::span<double> out) {
      State y = initial_state(base, frame * dirs[s], frame * perpendicular_basis(dirs[s]));
      int steps = 0, rejected = 0;
      advance(sys, y, 0.0, radii[s], options.tol, radii[s], steps, rejected);
      const double rho = jacobian_determinant(chart, y, n) / std::pow(radii[s], n - 1);
      out[0] = rho;
      out[1] = rho * rho;
    });
    const double mean = sums[0] / options.samples;
    const double var = std::max(0.0, sums[1] / options.samples - mean * mean) * options.samples / (options.samples - 1);
    const double ve = euclidean_ball_volume(n, r);
    return {ve * mean, ve * std::sqrt(var / options.samples)};
  }

  // Polar: GL in t over [0, r] (full and half rules), GL in the polar
  // angles, trapezoid in the azimuth.
  const AxisRule fine = gauss_legendre(options.radial_nodes, 0.0, r);
  const AxisRule coarse = gauss_legendre(std::max(1, options.radial_nodes / 2), 0.0, r);
  std::vector<std::pair<double, int>> stops;  // (t, 0 fine / 1 coarse) sorted
  for (int i = 0; i < fine.size(); ++i) stops.emplace_back(fine.nodes[i], i);
  for (int i = 0; i < coarse.size(); ++i) stops.emplace_back(coarse.nodes[i], fine.size() + i);
  std::sort(stops.begin(), stops.end());

  std::vector<AxisRule> axes;
  for (int i = 0; i < n - 2; ++i) axes.push_back(gauss_legendre(options.angular_nodes, 0.0, kPi));
  axes.push_back(periodic_trapezoid(options.angular_nodes, 0.0, 2.0 * kPi));
  const QuadratureGrid grid(axes);
  const auto sums = parallel_sum(grid.size(), 2, [&](std::size_t d, std::span<double> out) {
    std::vector<double> angles(n - 1);
    const double w_rule = grid.node(d, angles);
    Eigen::VectorXd u;
    const double w_dir = w_rule * direction(angles, u);
    out[0] = out[1] = 0.0;
    if (w_dir == 0.0) return;
    State y = initial_state(base, frame * u, frame * perpendicular_basis(u));
    double t = 0.0, dt = r / 8.0;
    int steps = 0, rejected = 0;
    for (const auto& [ts, id] : stops) {
      if (ts > t) dt = advance(sys, y, t, ts, options.tol, dt, steps, rejected);
      t = ts;
      const double det = jacobian_determinant(chart, y, n);
      if (id < fine.size())
        out[0] += w_dir * fine.weights[id] * det;
      else
        out[1] += w_dir * coarse.weights[id - fine.size()] * det;
    }
  });
  return {sums[0], std::abs(sums[0] - sums[1])};
}

GrayCoefficients gray_coefficients(const MetricChart& chart, std::span<const double> x) {
  const int n = chart.dim();
  const CurvaturePoint cp = curvature_at(chart, x);
  GrayCoefficients c;
  c.laplacian_scalar = scalar_curvature_laplacian(chart, x);
  c.c2 = -cp.scalar / (6.0 * (n + 2));
  // laplacian_scalar is the positive-spectrum Laplacian, -tr Hess.
  c.c4 = (-3.0 * cp.rm_norm2 + 8.0 * cp.ric_norm2 + 5.0 * cp.scalar * cp.scalar + 18.0 * c.laplacian_scalar) /
         (360.0 * (n + 2) * (n + 4));
  return c;
}

double gray_expansion(const MetricChart& chart, std::span<const double> x, double r) {
  const GrayCoefficients c = gray_coefficients(chart, x);
  const double r2 = r * r;
  return euclidean_ball_volume(chart.dim(), r) * (1.0 + c.c2 * r2 + c.c4 * r2 * r2);
}

std::vector<ExpansionRow> expansion_compare(const MetricChart& chart, std::span<const double> x,
                                            std::span<const double> radii, const VolumeOptions& options) {
  for (double r : radii) require_guard(chart, r);
  const GrayCoefficients c = gray_coefficients(chart, x);
  std::vector<ExpansionRow> rows;
  for (double r : radii) {
    ExpansionRow row;
    row.r = r;
    row.ball = ball_volume(chart, x, r, options).value;
    const double r2 = r * r, ve = euclidean_ball_volume(chart.dim(), r);
    row.gray = ve * (1.0 + c.c2 * r2 + c.c4 * r2 * r2);
    const double r6 = r2 * r2 * r2;
    row.raw_ratio = std::abs(row.ball - row.gray) / r6;
    row.ratio = row.raw_ratio / ve;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace curvkit
