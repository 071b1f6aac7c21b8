#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Dense>

#include "curvkit/conformal.hpp"
#include "curvkit/curvature.hpp"
#include "curvkit/error.hpp"
#include "curvkit/globalint.hpp"
#include "curvkit/parallel.hpp"

namespace curvkit {

namespace {

void require_closed(const Atlas& atlas, const char* op) {
  if (!atlas.closed) throw PreconditionError(std::string(op) + ": atlas is not closed");
}

// Value, frame components of the gradient, and Laplacian of a field at a chart point.
struct FieldSample {
  double value = 0.0;
  double laplacian = 0.0;
  double grad[kMaxJetVars] = {};
  double grad_norm2 = 0.0;
};

struct NodeGeometry {
  Eigen::MatrixXd frame;  // L with g^-1 = L L^T
  std::vector<double> gamma;
  Eigen::MatrixXd ginv;
};

NodeGeometry node_geometry(const MetricChart& chart, std::span<const double> x) {
  NodeGeometry geo;
  geo.ginv = chart.metric_at(x).inverse();
  geo.frame = geo.ginv.llt().matrixL();
  geo.gamma = christoffel_at(chart, x, false).christoffel;
  return geo;
}

FieldSample sample_field(const NodeGeometry& geo, const ScalarField& f, std::span<const double> x) {
  const int n = static_cast<int>(x.size());
  const JetVec xs = coordinate_jets(x, 2);
  const Jet v = f(xs);
  FieldSample s;
  s.value = v.value();
  Eigen::VectorXd d(n);
  for (int i = 0; i < n; ++i) d[i] = v.d(i);
  const Eigen::VectorXd e = geo.frame.transpose() * d;
  for (int i = 0; i < n; ++i) s.grad[i] = e[i];
  s.grad_norm2 = e.squaredNorm();
  double lap = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double h = v.d2(i, j);
      for (int k = 0; k < n; ++k) h -= geo.gamma[(k * n + i) * n + j] * d[k];
      lap -= geo.ginv(i, j) * h;
    }
  s.laplacian = lap;
  return s;
}

double yamabe_constant_a(int n) { return 4.0 * (n - 1) / (n - 2); }

void require_dim3(const Atlas& atlas, const char* op) {
  if (atlas.dim() < 3) throw PreconditionError(std::string(op) + ": needs dimension >= 3");
}

}  // namespace

double hilbert_einstein(const Atlas& atlas) {
  require_closed(atlas, "hilbert_einstein");
  const int n = atlas.dim();
  const auto s = integrate(
      atlas,
      [](const Patch& p, std::span<const double> x, std::span<double> out) {
        out[0] = curvature_at(p.chart, x).scalar;
        out[1] = 1.0;
      },
      2);
  return s[0] / std::pow(s[1], (n - 2.0) / n);
}

double yamabe_quotient(const Atlas& atlas, const ScalarField& u) {
  require_closed(atlas, "yamabe_quotient");
  require_dim3(atlas, "yamabe_quotient");
  const int n = atlas.dim();
  const double a = yamabe_constant_a(n), p = 2.0 * n / (n - 2.0);
  const auto s = integrate(
      atlas,
      [&](const Patch& patch, std::span<const double> x, std::span<double> out) {
        const NodeGeometry geo = node_geometry(patch.chart, x);
        const FieldSample f = sample_field(geo, on_patch(patch, u), x);
        if (!(f.value > 0.0)) throw PreconditionError("yamabe_quotient: u must be positive");
        const double sc = curvature_at(patch.chart, x).scalar;
        out[0] = a * f.grad_norm2 + sc * f.value * f.value;
        out[1] = std::pow(f.value, p);
      },
      2);
  return s[0] / std::pow(s[1], 2.0 / p);
}

double rayleigh_lambda(const Atlas& atlas, const ScalarField& u) {
  require_closed(atlas, "rayleigh_lambda");
  const auto s = integrate(
      atlas,
      [&](const Patch& patch, std::span<const double> x, std::span<double> out) {
        const NodeGeometry geo = node_geometry(patch.chart, x);
        const FieldSample f = sample_field(geo, on_patch(patch, u), x);
        const double sc = curvature_at(patch.chart, x).scalar;
        out[0] = sc * f.value * f.value + 4.0 * f.grad_norm2;
        out[1] = f.value * f.value;
      },
      2);
  if (!(s[1] > 0.0)) throw PreconditionError("rayleigh_lambda: u vanishes identically");
  return s[0] / s[1];
}

double l_halfpower(const Atlas& atlas) {
  require_closed(atlas, "l_halfpower");
  const double h = atlas.dim() / 2.0;
  return integrate(atlas, [h](const Patch& p, std::span<const double> x) {
    return std::pow(std::abs(curvature_at(p.chart, x).scalar), h);
  });
}

SobolevResult sobolev_check(const Atlas& sphere, const ScalarField& u) { return sobolev_check(sphere, std::vector<ScalarField>{u}).front(); }

std::vector<SobolevResult> sobolev_check(const Atlas& sphere, const std::vector<ScalarField>& fields) {
  require_closed(sphere, "sobolev_check");
  require_dim3(sphere, "sobolev_check");
  const int n = sphere.dim(), k = static_cast<int>(fields.size());
  const double p = 2.0 * n / (n - 2.0);
  // Per field: |u|^p, |du|^2, u^2; the volume last.
  const auto s = integrate(
      sphere,
      [&](const Patch& patch, std::span<const double> x, std::span<double> out) {
        const Eigen::MatrixXd frame = Eigen::MatrixXd(patch.chart.metric_at(x).inverse().llt().matrixL());
        const JetVec xs = coordinate_jets(x, 1);
        Eigen::VectorXd d(n);
        for (int f = 0; f < k; ++f) {
          const Jet v = on_patch(patch, fields[f])(xs);
          for (int i = 0; i < n; ++i) d[i] = v.d(i);
          out[3 * f] = std::pow(std::abs(v.value()), p);
          out[3 * f + 1] = (frame.transpose() * d).squaredNorm();
          out[3 * f + 2] = v.value() * v.value();
        }
        out[3 * k] = 1.0;
      },
      3 * k + 1);
  const double vol_factor = std::pow(s[3 * k], 2.0 / n);
  std::vector<SobolevResult> out(k);
  for (int f = 0; f < k; ++f) {
    SobolevResult& r = out[f];
    r.lhs = std::pow(s[3 * f], 2.0 / p);
    r.rhs = 4.0 / (n * (n - 2.0) * vol_factor) * s[3 * f + 1] + s[3 * f + 2] / vol_factor;
    r.slack = r.rhs - r.lhs;
  }
  return out;
}

ScalarField random_trig_polynomial(int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> freq(0.0, 1.5);
  std::uniform_real_distribution<double> amp(-0.15, 0.15), phase(0.0, 2.0 * M_PI);
  struct Term {
    double a, phi;
    std::vector<double> w;
  };
  std::vector<Term> terms(4);
  for (Term& t : terms) {
    t.a = amp(rng);
    t.phi = phase(rng);
    t.w.resize(dim + 1);
    for (double& w : t.w) w = freq(rng);
  }
  return [terms](std::span<const Jet> y) {
    Jet out(y[0].basis(), 1.0);
    for (const Term& t : terms) {
      Jet arg(y[0].basis(), t.phi);
      for (std::size_t i = 0; i < t.w.size() && i < y.size(); ++i) arg += t.w[i] * y[i];
      out += t.a * sin(arg);
    }
    return out;
  };
}

ScalarField sphere_harmonic(int axis) {
  return [axis](std::span<const Jet> y) {
    if (axis < 0 || axis >= static_cast<int>(y.size())) throw InvalidArgument("sphere_harmonic: axis out of range");
    return y[axis];
  };
}

namespace {

// Basis of the coefficient space: ambient polynomials of degree <= 2 on
// spheres (y_last^2 omitted, it is 1 minus the others), first Fourier modes
// on periodic boxes, and the starting profile w0 appended last.
std::vector<ScalarField> descent_basis(const Atlas& atlas) {
  std::vector<ScalarField> basis;
  basis.push_back([](std::span<const Jet> y) { return Jet(y[0].basis(), 1.0); });
  const int n = atlas.dim();
  const bool sphere = !atlas.name.empty() && atlas.name[0] == 'S' && atlas.name.find('x') == std::string::npos;
  if (sphere) {
    for (int i = 0; i <= n; ++i) basis.push_back([i](std::span<const Jet> y) { return y[i]; });
    for (int i = 0; i <= n; ++i)
      for (int j = i; j <= n; ++j) {
        if (i == n && j == n) continue;
        basis.push_back([i, j](std::span<const Jet> y) { return y[i] * y[j]; });
      }
  } else {
    for (int i = 0; i < n; ++i) {
      basis.push_back([i](std::span<const Jet> y) { return sin(2.0 * M_PI * y[i]); });
      basis.push_back([i](std::span<const Jet> y) { return cos(2.0 * M_PI * y[i]); });
    }
  }
  return basis;
}

struct DescentData {
  int n = 0;
  int k = 0;
  std::size_t nodes = 0;
  std::vector<double> dmu, scalar;
  std::vector<double> value;      // [node * k + b]
  std::vector<double> grad;       // [(node * k + b) * n + a]
  std::vector<double> laplacian;  // [node * k + b]
};

struct Evaluation {
  double quotient = 0.0;
  Eigen::VectorXd gradient;
  double variance = 0.0;
  double mean = 0.0;
  bool positive = true;
};

DescentData prepare(const Atlas& atlas, const std::vector<ScalarField>& basis) {
  DescentData d;
  d.n = atlas.dim();
  d.k = static_cast<int>(basis.size());
  const int n = d.n, k = d.k;
  std::vector<std::size_t> active;
  {
    double xb[kMaxJetVars];
    for (std::size_t i = 0; i < atlas.node_count(); ++i)
      if (atlas.node(i, std::span<double>(xb, n)).weight != 0.0) active.push_back(i);
  }
  d.nodes = active.size();
  d.dmu.resize(d.nodes);
  d.scalar.resize(d.nodes);
  d.value.resize(d.nodes * k);
  d.grad.resize(d.nodes * k * n);
  d.laplacian.resize(d.nodes * k);
  parallel_chunks(d.nodes, [&](std::size_t begin, std::size_t end) {
    double xb[kMaxJetVars];
    const std::span<double> x(xb, n);
    for (std::size_t m = begin; m < end; ++m) {
      const Atlas::Node node = atlas.node(active[m], x);
      const Patch& patch = atlas.patches[node.patch];
      const CurvaturePoint cp = curvature_at(patch.chart, x);
      d.dmu[m] = node.weight * std::sqrt(cp.metric.determinant());
      d.scalar[m] = cp.scalar;
      const NodeGeometry geo = node_geometry(patch.chart, x);
      for (int b = 0; b < k; ++b) {
        const FieldSample f = sample_field(geo, on_patch(patch, basis[b]), x);
        d.value[m * k + b] = f.value;
        d.laplacian[m * k + b] = f.laplacian;
        for (int a = 0; a < n; ++a) d.grad[(m * k + b) * n + a] = f.grad[a];
      }
    }
  });
  return d;
}

// Quotient of u = w^{-(n-2)/2}, its coefficient gradient, and the pointwise
// variance of the scalar curvature of u^{4/(n-2)} g.
Evaluation evaluate(const DescentData& d, const Eigen::VectorXd& c, bool with_gradient) {
  const int n = d.n, k = d.k;
  const double q = (n - 2) / 2.0, a = yamabe_constant_a(n);
  // Columns: N, D, int Sc' dmu', int Sc'^2 dmu', then dN (k), dD (k).
  const int width = 4 + (with_gradient ? 2 * k : 0);
  Evaluation e;
  std::atomic<bool> positive{true};
  const auto s = parallel_sum(d.nodes, width, [&](std::size_t m, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    double w = 0.0, lap = 0.0, gw[kMaxJetVars] = {};
    for (int b = 0; b < k; ++b) {
      w += c[b] * d.value[m * k + b];
      lap += c[b] * d.laplacian[m * k + b];
      for (int i = 0; i < n; ++i) gw[i] += c[b] * d.grad[(m * k + b) * n + i];
    }
    if (!(w > 0.0)) {
      positive = false;
      return;
    }
    double g2 = 0.0;
    for (int i = 0; i < n; ++i) g2 += gw[i] * gw[i];
    const double dmu = d.dmu[m], sc = d.scalar[m];
    const double w_2q = std::pow(w, -2.0 * q), w_n = std::pow(w, -static_cast<double>(n));
    out[0] = dmu * (a * q * q * w_2q / (w * w) * g2 + sc * w_2q);
    out[1] = dmu * w_n;
    // u = w^-q, Delta u = -q w^{-q-1} Delta w - q(q+1) w^{-q-2} |grad w|^2.
    const double u = std::pow(w, -q);
    const double lap_u = -q * u / w * lap - q * (q + 1.0) * u / (w * w) * g2;
    const double sc_new = (a * lap_u + sc * u) / std::pow(u, (n + 2.0) / (n - 2.0));
    out[2] = dmu * w_n * sc_new;
    out[3] = dmu * w_n * sc_new * sc_new;
    if (!with_gradient) return;
    for (int b = 0; b < k; ++b) {
      const double phi = d.value[m * k + b];
      double dot = 0.0;
      for (int i = 0; i < n; ++i) dot += gw[i] * d.grad[(m * k + b) * n + i];
      out[4 + b] = dmu * (a * q * q * ((-2.0 * q - 2.0) * w_2q / (w * w * w) * phi * g2 + 2.0 * w_2q / (w * w) * dot) -
                          2.0 * q * sc * w_2q / w * phi);
      out[4 + k + b] = dmu * (-n * w_n / w * phi);
    }
  });
  e.positive = positive;
  if (!e.positive) return e;
  const double expo = (n - 2.0) / n;
  const double dpow = std::pow(s[1], expo);
  e.quotient = s[0] / dpow;
  e.mean = s[2] / s[1];
  e.variance = std::max(0.0, s[3] / s[1] - e.mean * e.mean);
  if (with_gradient) {
    e.gradient.resize(k);
    for (int b = 0; b < k; ++b) e.gradient[b] = s[4 + b] / dpow - expo * s[0] / (dpow * s[1]) * s[4 + k + b];
  }
  return e;
}

// H^1 Gram matrix of the basis; pseudo-inverse drops directions with
// negligible eigenvalues (w0 may lie in the polynomial span).
Eigen::MatrixXd gram_pseudo_inverse(const DescentData& d) {
  const int n = d.n, k = d.k;
  const auto s = parallel_sum(d.nodes, k * k, [&](std::size_t m, std::span<double> out) {
    for (int b = 0; b < k; ++b)
      for (int c = 0; c < k; ++c) {
        double v = d.value[m * k + b] * d.value[m * k + c];
        for (int i = 0; i < n; ++i) v += d.grad[(m * k + b) * n + i] * d.grad[(m * k + c) * n + i];
        out[b * k + c] = d.dmu[m] * v;
      }
  });
  Eigen::MatrixXd g(k, k);
  for (int b = 0; b < k; ++b)
    for (int c = 0; c < k; ++c) g(b, c) = s[b * k + c];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (g + g.transpose()));
  const Eigen::VectorXd ev = eig.eigenvalues();
  const double cut = 1e-12 * ev.cwiseAbs().maxCoeff();
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(k);
  for (int b = 0; b < k; ++b)
    if (ev[b] > cut) inv[b] = 1.0 / ev[b];
  return eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace

DescentResult yamabe_descent(const Atlas& atlas, const ScalarField& u0, const DescentOptions& options) {
  require_closed(atlas, "yamabe_descent");
  require_dim3(atlas, "yamabe_descent");
  const int n = atlas.dim();
  std::vector<ScalarField> basis = descent_basis(atlas);
  const double w_exp = -2.0 / (n - 2.0);
  basis.push_back([u0, w_exp](std::span<const Jet> y) {
    const Jet u = u0(y);
    if (!(u.value() > 0.0)) throw PreconditionError("yamabe_descent: u0 must be positive");
    return pow(u, w_exp);
  });
  const DescentData data = prepare(atlas, basis);
  const Eigen::MatrixXd precond = gram_pseudo_inverse(data);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(data.k);
  c[data.k - 1] = 1.0;

  DescentResult result;
  Evaluation cur = evaluate(data, c, true);
  if (!cur.positive) throw PreconditionError("yamabe_descent: u0 must be positive");
  auto record = [&](int iter, double step, double gnorm, int halvings) {
    result.trajectory.push_back({iter, cur.quotient, cur.variance, step, gnorm, halvings});
  };
  int stalled = 0;
  for (int iter = 0;; ++iter) {
    const Eigen::VectorXd dir = -(precond * cur.gradient);
    const double slope = cur.gradient.dot(dir);
    const double gnorm = std::sqrt(std::max(0.0, -slope));
    if (gnorm <= options.gradient_tolerance * std::max(1.0, std::abs(cur.quotient))) {
      record(iter, 0.0, gnorm, 0);
      result.converged = true;
      break;
    }
    if (iter >= options.max_iters) {
      record(iter, 0.0, gnorm, 0);
      break;
    }
    double t = options.initial_step;
    int halvings = 0;
    bool accepted = false;
    Evaluation next;
    for (; halvings < 60; ++halvings, t *= 0.5) {
      next = evaluate(data, c + t * dir, false);
      if (!next.positive) {
        ++result.rejected_nonpositive;
        continue;
      }
      if (next.quotient <= cur.quotient + options.armijo * t * slope) {
        accepted = true;
        break;
      }
    }
    record(iter, accepted ? t : 0.0, gnorm, halvings);
    if (!accepted) {
      result.converged = gnorm <= 1e-6 * std::max(1.0, std::abs(cur.quotient));
      break;
    }
    const double before = cur.quotient;
    c += t * dir;
    cur = evaluate(data, c, true);
    const double scale = std::max(1.0, std::abs(before));
    if (cur.quotient > before + options.monotonicity_tolerance * scale) result.monotone = false;
    stalled = before - cur.quotient <= options.stall_tolerance * scale ? stalled + 1 : 0;
    if (stalled >= 3) {
      record(iter + 1, 0.0, std::sqrt(std::max(0.0, cur.gradient.dot(precond * cur.gradient))), 0);
      result.converged = true;
      break;
    }
  }
  result.coefficients.assign(c.data(), c.data() + c.size());
  result.final_quotient = cur.quotient;
  result.final_scalar_variance = cur.variance;
  result.final_scalar_mean = cur.mean;
  return result;
}

ConformalVolumeReport conformal_volume_check(const Atlas& atlas, double R, const ScalarField& f) {
  require_closed(atlas, "conformal_volume_check");
  const int n = atlas.dim();
  if (n < 3) throw PreconditionError("conformal_volume_check: needs dimension >= 3");
  const auto s = integrate(
      atlas,
      [&](const Patch& patch, std::span<const double> x, std::span<double> out) {
        const double sc = curvature_at(patch.chart, x).scalar;
        if (std::abs(sc + R) > 1e-6)
          throw PreconditionError("conformal_volume_check: scalar curvature is not -R on the atlas");
        const ScalarField fp = on_patch(patch, f);
        const double fv = fp(coordinate_jets(x, 0)).value();
        out[0] = 1.0;
        out[1] = std::exp(2.0 * fv);
        out[2] = std::exp(n * fv);
      },
      3);
  ConformalVolumeReport r;
  r.volume = s[0];
  r.exp2f_integral = s[1];
  r.new_volume = s[2];
  r.exp2f_slack = r.exp2f_integral - r.volume;
  r.volume_slack = r.new_volume - r.volume;
  r.holder_slack = std::pow(r.new_volume, 2.0 / n) * std::pow(r.volume, (n - 2.0) / n) - r.exp2f_integral;
  const int dim = n;
  const std::size_t count = atlas.node_count();
  std::vector<double> node_margin(count, std::numeric_limits<double>::infinity());
  parallel_chunks(count, [&](std::size_t begin, std::size_t end) {
    double xb[kMaxJetVars];
    const std::span<double> x(xb, dim);
    for (std::size_t i = begin; i < end; ++i) {
      const Atlas::Node node = atlas.node(i, x);
      if (node.weight == 0.0) continue;
      const Patch& patch = atlas.patches[node.patch];
      node_margin[i] = conformal_scalar_formula(patch.chart, on_patch(patch, f), x) + R;
    }
  });
  r.min_scalar_margin = *std::min_element(node_margin.begin(), node_margin.end());
  r.precondition_ok = r.min_scalar_margin >= -1e-9;
  return r;
}

double holder_slack(const Atlas& atlas, const ScalarField& f) {
  const int n = atlas.dim();
  if (n < 3) throw PreconditionError("holder_slack: needs dimension >= 3");
  const auto s = integrate(
      atlas,
      [&](const Patch& patch, std::span<const double> x, std::span<double> out) {
        const double fv = on_patch(patch, f)(coordinate_jets(x, 0)).value();
        out[0] = 1.0;
        out[1] = std::exp(2.0 * fv);
        out[2] = std::exp(n * fv);
      },
      3);
  return std::pow(s[2], 2.0 / n) * std::pow(s[0], (n - 2.0) / n) - s[1];
}

IdentityPair integration_identity_check(const Atlas& atlas, const ScalarField& u) {
  require_closed(atlas, "integration_identity_check");
  const auto s = integrate(
      atlas,
      [&](const Patch& patch, std::span<const double> x, std::span<double> out) {
        const NodeGeometry geo = node_geometry(patch.chart, x);
        const FieldSample f = sample_field(geo, on_patch(patch, u), x);
        out[0] = f.value * f.laplacian;
        out[1] = f.grad_norm2;
      },
      2);
  return {s[0], s[1]};
}

}  // namespace curvkit
