#include "curvkit/curvature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "curvkit/error.hpp"

namespace curvkit {

namespace {

double value_of(double v) { return v; }
double value_of(const Jet& v) { return v.value(); }
double zero_of(double) { return 0.0; }
Jet zero_of(const Jet& v) { return v.zero_like(); }

// Shared by the double and Jet paths. Inputs: g_ab, d_k g_ab at
// [k n^2 + a n + b], d_k d_l g_ab at [(k n + l) n^2 + a n + b].
template <class T>
struct Kernel {
  int n;
  std::vector<T> ginv;
  std::vector<T> gamma1;  // G_{m,ij} at [(m n + i) n + j]
  std::vector<T> gamma2;  // G^k_ij
  std::vector<T> riemann;
  std::vector<T> ricci;
  T scalar;

  std::size_t i3(int a, int b, int c) const { return (static_cast<std::size_t>(a) * n + b) * n + c; }
  std::size_t i4(int a, int b, int c, int d) const { return i3(a, b, c) * n + d; }

  static std::vector<T> inverse(const std::vector<T>& g, int n) {
    // Gauss-Jordan with partial pivoting on the values.
    std::vector<T> a = g;
    std::vector<T> inv(n * n, zero_of(g[0]));
    for (int i = 0; i < n; ++i) inv[i * n + i] += 1.0;
    for (int c = 0; c < n; ++c) {
      int p = c;
      for (int r = c + 1; r < n; ++r)
        if (std::abs(value_of(a[r * n + c])) > std::abs(value_of(a[p * n + c]))) p = r;
      if (value_of(a[p * n + c]) == 0.0) throw SingularMetricError("metric inverse: zero pivot");
      if (p != c) {
        for (int k = 0; k < n; ++k) {
          std::swap(a[p * n + k], a[c * n + k]);
          std::swap(inv[p * n + k], inv[c * n + k]);
        }
      }
      const T piv = 1.0 / a[c * n + c];
      for (int k = 0; k < n; ++k) {
        a[c * n + k] = a[c * n + k] * piv;
        inv[c * n + k] = inv[c * n + k] * piv;
      }
      for (int r = 0; r < n; ++r) {
        if (r == c) continue;
        const T f = a[r * n + c];
        for (int k = 0; k < n; ++k) {
          a[r * n + k] -= f * a[c * n + k];
          inv[r * n + k] -= f * inv[c * n + k];
        }
      }
    }
    // Symmetrize against roundoff.
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const T s = 0.5 * (inv[i * n + j] + inv[j * n + i]);
        inv[i * n + j] = s;
        inv[j * n + i] = s;
      }
    return inv;
  }

  void christoffels(const std::vector<T>& g, const std::vector<T>& dg) {
    const int nn = n * n;
    const T z = zero_of(g[0]);
    ginv = inverse(g, n);
    gamma1.assign(static_cast<std::size_t>(nn) * n, z);
    gamma2.assign(static_cast<std::size_t>(nn) * n, z);
    for (int m = 0; m < n; ++m)
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
          T v = 0.5 * (dg[i * nn + m * n + j] + dg[j * nn + m * n + i] - dg[m * nn + i * n + j]);
          gamma1[i3(m, j, i)] = v;
          gamma1[i3(m, i, j)] = std::move(v);
        }
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
          T v = z;
          for (int m = 0; m < n; ++m) v += ginv[k * n + m] * gamma1[i3(m, i, j)];
          gamma2[i3(k, j, i)] = v;
          gamma2[i3(k, i, j)] = std::move(v);
        }
  }

  void curvature(const std::vector<T>& ddg) {
    const int nn = n * n;
    const T z = zero_of(ginv[0]);
    auto d2 = [&](int k, int l, int a, int b) -> const T& { return ddg[(k * n + l) * nn + a * n + b]; };
    riemann.assign(static_cast<std::size_t>(nn) * nn, z);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = k + 1; l < n; ++l) {
            T v = 0.5 * (d2(i, k, j, l) - d2(i, l, j, k) - d2(j, k, i, l) + d2(j, l, i, k));
            for (int m = 0; m < n; ++m)
              v += gamma1[i3(m, j, l)] * gamma2[i3(m, i, k)] - gamma1[i3(m, i, l)] * gamma2[i3(m, j, k)];
            riemann[i4(j, i, k, l)] = -v;
            riemann[i4(i, j, l, k)] = -v;
            riemann[i4(j, i, l, k)] = v;
            riemann[i4(i, j, k, l)] = std::move(v);
          }
    ricci.assign(nn, z);
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k) {
        T v = z;
        for (int i = 0; i < n; ++i)
          for (int l = 0; l < n; ++l) v += ginv[i * n + l] * riemann[i4(i, j, k, l)];
        ricci[k * n + j] = v;
        ricci[j * n + k] = std::move(v);
      }
    scalar = z;
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) scalar += ginv[j * n + k] * ricci[j * n + k];
  }
};

Eigen::MatrixXd to_matrix(const std::vector<double>& v, int n) {
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = v[i * n + j];
  return m;
}

// Lower-triangular L with L L^T = ginv; the columns of L form a g-orthonormal frame.
Eigen::MatrixXd raising_frame(const Eigen::MatrixXd& ginv) { return Eigen::LLT<Eigen::MatrixXd>(ginv).matrixL(); }

void require_dim4(int n) {
  if (n != 4) throw PreconditionError("operation requires a 4-dimensional chart");
}

}  // namespace

Tensor4 in_frame(const Tensor4& t, const Eigen::MatrixXd& e) {
  const int n = t.dim(), n3 = n * n * n;
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  // Contracting the last slot of (i, j, k, l) and storing the product column
  // major yields (d, i, j, k); four passes restore the slot order.
  Eigen::MatrixXd a = Eigen::Map<const RowMajor>(t.data().data(), n3, n) * e;
  for (int pass = 1; pass < 4; ++pass) {
    Eigen::MatrixXd b = Eigen::Map<const RowMajor>(a.data(), n3, n) * e;
    a.swap(b);
  }
  Tensor4 out(n);
  std::copy(a.data(), a.data() + a.size(), out.data().begin());
  return out;
}

double norm2_lower4(const Tensor4& t, const Eigen::MatrixXd& ginv) {
  const Tensor4 f = in_frame(t, raising_frame(ginv));
  double s = 0.0;
  for (double v : f.data()) s += v * v;
  return s;
}

double norm2_lower2(const Eigen::MatrixXd& s, const Eigen::MatrixXd& ginv) {
  return (ginv * s * ginv * s).trace();
}

double trace_cubed(const Eigen::MatrixXd& s, const Eigen::MatrixXd& ginv) {
  const Eigen::MatrixXd a = ginv * s;
  return (a * a * a).trace();
}

CurvaturePoint curvature_from_metric_jet(const JetVec& gj, int n, std::span<const double> x) {
  if (gj.empty() || gj[0].order() < 2) throw InvalidArgument("curvature needs metric jets of order >= 2");
  const int nn = n * n;
  std::vector<double> g(nn), dg(nn * n), ddg(nn * nn);
  for (int a = 0; a < nn; ++a) {
    g[a] = gj[a].value();
    for (int k = 0; k < n; ++k) {
      dg[k * nn + a] = gj[a].d(k);
      for (int l = k; l < n; ++l) ddg[(k * n + l) * nn + a] = ddg[(l * n + k) * nn + a] = gj[a].d2(k, l);
    }
  }
  CurvaturePoint cp;
  cp.point.assign(x.begin(), x.end());
  cp.dim = n;
  cp.metric = to_matrix(g, n);
  require_nondegenerate(cp.metric, x);

  Kernel<double> kern{n, {}, {}, {}, {}, {}, 0.0};
  kern.christoffels(g, dg);
  kern.curvature(ddg);

  cp.inverse_metric = to_matrix(kern.ginv, n);
  cp.christoffel = std::move(kern.gamma2);
  cp.riemann_low = Tensor4(n);
  cp.riemann_low.data() = std::move(kern.riemann);
  cp.ricci = to_matrix(kern.ricci, n);
  cp.scalar = kern.scalar;
  cp.traceless_ricci = cp.ricci - (cp.scalar / n) * cp.metric;

  const Eigen::MatrixXd& gm = cp.metric;
  cp.weyl_low = Tensor4(n);
  if (n >= 3) {
    const Eigen::MatrixXd a = (cp.ricci - cp.scalar / (2.0 * (n - 1)) * gm) / (n - 2.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l)
            cp.weyl_low(i, j, k, l) = cp.riemann_low(i, j, k, l) - (a(i, l) * gm(j, k) + a(j, k) * gm(i, l) -
                                                                    a(i, k) * gm(j, l) - a(j, l) * gm(i, k));
  }
  const Eigen::MatrixXd frame = raising_frame(cp.inverse_metric);
  auto frame_norm = [&](const Tensor4& t) {
    const Tensor4 f = in_frame(t, frame);
    double s = 0.0;
    for (double v : f.data()) s += v * v;
    return s;
  };
  cp.rm_norm2 = frame_norm(cp.riemann_low);
  cp.weyl_norm2 = n >= 3 ? frame_norm(cp.weyl_low) : 0.0;
  cp.ric_norm2 = norm2_lower2(cp.ricci, cp.inverse_metric);
  cp.ring_norm2 = norm2_lower2(cp.traceless_ricci, cp.inverse_metric);
  return cp;
}

CurvaturePoint curvature_at(const MetricChart& chart, std::span<const double> x) {
  return curvature_from_metric_jet(chart.metric_jet(x, 2), chart.dim(), x);
}

CurvatureJets curvature_jets(const MetricChart& chart, std::span<const double> x, int order) {
  if (order < 0 || order > 2) throw InvalidArgument("curvature_jets: order must lie in 0..2");
  const int n = chart.dim(), nn = n * n;
  const JetVec gj = chart.metric_jet(x, order + 2);
  require_nondegenerate(values_of(gj, n), x);
  std::vector<Jet> g(nn), dg(nn * n), ddg(nn * nn);
  for (int a = 0; a < nn; ++a) {
    g[a] = gj[a].truncated(order);
    for (int k = 0; k < n; ++k) {
      const Jet dk = gj[a].derivative(k);
      dg[k * nn + a] = dk.truncated(order);
      for (int l = 0; l < n; ++l) ddg[(k * n + l) * nn + a] = dk.derivative(l);
    }
  }
  Kernel<Jet> kern{n, {}, {}, {}, {}, {}, Jet()};
  kern.christoffels(g, dg);
  kern.curvature(ddg);
  CurvatureJets out;
  out.dim = n;
  out.order = order;
  out.metric = std::move(g);
  out.inverse_metric = std::move(kern.ginv);
  out.christoffel = std::move(kern.gamma2);
  out.riemann_low = std::move(kern.riemann);
  out.ricci = std::move(kern.ricci);
  out.scalar = std::move(kern.scalar);
  return out;
}

ChristoffelData christoffel_at(const MetricChart& chart, std::span<const double> x, bool with_derivative) {
  const int n = chart.dim(), nn = n * n;
  const JetVec gj = chart.metric_jet(x, with_derivative ? 2 : 1);
  std::vector<double> g(nn), dg(nn * n);
  for (int a = 0; a < nn; ++a) {
    g[a] = gj[a].value();
    for (int k = 0; k < n; ++k) dg[k * nn + a] = gj[a].d(k);
  }
  Kernel<double> kern{n, {}, {}, {}, {}, {}, 0.0};
  kern.christoffels(g, dg);
  ChristoffelData out;
  out.christoffel = kern.gamma2;
  if (!with_derivative) return out;
  // d_m G^k_ij = d_m g^kl G_{l,ij} + g^kl d_m G_{l,ij}, d_m g^kl = -g^ka d_m g_ab g^bl.
  std::vector<double> dginv(nn * n, 0.0), dgamma1(nn * nn, 0.0);
  for (int m = 0; m < n; ++m) {
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) {
        double s = 0.0;
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) s -= kern.ginv[k * n + a] * dg[m * nn + a * n + b] * kern.ginv[b * n + l];
        dginv[m * nn + k * n + l] = s;
      }
    for (int l = 0; l < n; ++l)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          dgamma1[m * nn * n + (l * n + i) * n + j] =
              0.5 * (gj[l * n + j].d2(m, i) + gj[l * n + i].d2(m, j) - gj[i * n + j].d2(m, l));
  }
  out.dchristoffel.assign(nn * nn, 0.0);
  for (int m = 0; m < n; ++m)
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double s = 0.0;
          for (int l = 0; l < n; ++l)
            s += dginv[m * nn + k * n + l] * kern.gamma1[(l * n + i) * n + j] +
                 kern.ginv[k * n + l] * dgamma1[m * nn * n + (l * n + i) * n + j];
          out.dchristoffel[((m * n + k) * n + i) * n + j] = s;
        }
  return out;
}

Eigen::MatrixXd orthonormal_frame(const Eigen::MatrixXd& g) {
  return orthonormal_frame(g, Eigen::MatrixXd::Identity(g.rows(), g.cols()));
}

Eigen::MatrixXd orthonormal_frame(const Eigen::MatrixXd& g, const Eigen::MatrixXd& start) {
  const int n = static_cast<int>(g.rows());
  Eigen::MatrixXd e = start;
  for (int c = 0; c < n; ++c) {
    Eigen::VectorXd v = e.col(c);
    for (int pass = 0; pass < 2; ++pass)
      for (int p = 0; p < c; ++p) v -= (e.col(p).transpose() * g * v).value() * e.col(p);
    const double len2 = (v.transpose() * g * v).value();
    if (!(len2 > 1e-24)) throw PreconditionError("orthonormal_frame: linearly dependent start vectors");
    e.col(c) = v / std::sqrt(len2);
  }
  return e;
}

WeylSplit weyl_pm_norms_in_frame(const CurvaturePoint& cp, const Eigen::MatrixXd& e, int orientation) {
  require_dim4(cp.dim);
  if (orientation != 1 && orientation != -1) throw InvalidArgument("orientation must be +1 or -1");
  const Tensor4 w = in_frame(cp.weyl_low, e);
  static constexpr std::array<std::array<int, 2>, 6> pairs{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};
  Eigen::Matrix<double, 6, 6> m;
  for (int p = 0; p < 6; ++p)
    for (int q = 0; q < 6; ++q) m(p, q) = w(pairs[p][0], pairs[p][1], pairs[q][0], pairs[q][1]);
  // Hodge star on the basis e01, e02, e03, e12, e13, e23 of an oriented frame.
  Eigen::Matrix<double, 6, 6> star = Eigen::Matrix<double, 6, 6>::Zero();
  star(5, 0) = 1.0;
  star(4, 1) = -1.0;
  star(3, 2) = 1.0;
  star(2, 3) = 1.0;
  star(1, 4) = -1.0;
  star(0, 5) = 1.0;
  // The frame's orientation relative to the coordinates.
  const double s = orientation * (e.determinant() > 0.0 ? 1.0 : -1.0);
  const Eigen::Matrix<double, 6, 6> id = Eigen::Matrix<double, 6, 6>::Identity();
  const Eigen::Matrix<double, 6, 6> pp = 0.5 * (id + s * star), pm = 0.5 * (id - s * star);
  return {4.0 * (pp * m * pp).squaredNorm(), 4.0 * (pm * m * pm).squaredNorm()};
}

WeylSplit weyl_pm_norms(const CurvaturePoint& cp, int orientation) {
  require_dim4(cp.dim);
  return weyl_pm_norms_in_frame(cp, orthonormal_frame(cp.metric), orientation);
}

WeylSplit weyl_pm_norms(const MetricChart& chart, std::span<const double> x, int orientation) {
  require_dim4(chart.dim());
  return weyl_pm_norms(curvature_at(chart, x), orientation);
}

namespace {

double rm_contract(const CurvaturePoint& cp, const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                   const Eigen::VectorXd& c, const Eigen::VectorXd& d) {
  const int n = cp.dim;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    if (a(i) == 0.0) continue;
    for (int j = 0; j < n; ++j) {
      if (b(j) == 0.0) continue;
      for (int k = 0; k < n; ++k) {
        if (c(k) == 0.0) continue;
        double t = 0.0;
        for (int l = 0; l < n; ++l) t += cp.riemann_low(i, j, k, l) * d(l);
        s += a(i) * b(j) * c(k) * t;
      }
    }
  }
  return s;
}

double plane_gram(const CurvaturePoint& cp, const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  const double uu = u.dot(cp.metric * u), vv = v.dot(cp.metric * v), uv = u.dot(cp.metric * v);
  const double det = uu * vv - uv * uv;
  if (!(det > 1e-12 * uu * vv) || !(uu > 0.0) || !(vv > 0.0))
    throw PreconditionError("degenerate tangent plane");
  return det;
}

}  // namespace

double sectional(const CurvaturePoint& cp, const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  if (u.size() != cp.dim || v.size() != cp.dim) throw InvalidArgument("tangent vector dimension mismatch");
  const double det = plane_gram(cp, u, v);
  return rm_contract(cp, u, v, v, u) / det;
}

double sectional(const MetricChart& chart, const TangentPlane& plane) {
  return sectional(curvature_at(chart, plane.point), plane.u, plane.v);
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> orthogonal_plane(const CurvaturePoint& cp, const Eigen::VectorXd& u,
                                                             const Eigen::VectorXd& v) {
  require_dim4(cp.dim);
  plane_gram(cp, u, v);
  const Eigen::MatrixXd& g = cp.metric;
  std::vector<Eigen::VectorXd> frame;
  auto add = [&](Eigen::VectorXd w) {
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& f : frame) w -= f.dot(g * w) * f;
    return w;
  };
  for (const auto& w : {u, v}) {
    Eigen::VectorXd r = add(w);
    frame.push_back(r / std::sqrt(r.dot(g * r)));
  }
  for (int step = 0; step < 2; ++step) {
    Eigen::VectorXd best;
    double best_len = -1.0;
    for (int c = 0; c < 4; ++c) {
      Eigen::VectorXd r = add(Eigen::VectorXd::Unit(4, c));
      const double len = r.dot(g * r);
      if (len > best_len) {
        best_len = len;
        best = r;
      }
    }
    frame.push_back(best / std::sqrt(best_len));
  }
  return {frame[2], frame[3]};
}

double biorthogonal(const CurvaturePoint& cp, const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  const auto [a, b] = orthogonal_plane(cp, u, v);
  return 0.5 * (sectional(cp, u, v) + sectional(cp, a, b));
}

double biorthogonal(const MetricChart& chart, const TangentPlane& plane) {
  require_dim4(chart.dim());
  return biorthogonal(curvature_at(chart, plane.point), plane.u, plane.v);
}

KulkarniResult kulkarni_check(const CurvaturePoint& cp, int frames, std::uint64_t seed) {
  require_dim4(cp.dim);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  KulkarniResult out;
  for (int f = 0; f < std::max(frames, 1); ++f) {
    Eigen::MatrixXd start = Eigen::MatrixXd::Identity(4, 4);
    if (f > 0)
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) start(i, j) = normal(rng);
    Eigen::MatrixXd e;
    try {
      e = orthonormal_frame(cp.metric, start);
    } catch (const PreconditionError&) {
      continue;
    }
    auto k = [&](int a, int b) { return sectional(cp, e.col(a), e.col(b)); };
    const double s1 = k(0, 1) + k(2, 3), s2 = k(0, 2) + k(1, 3), s3 = k(0, 3) + k(1, 2);
    out.pair_sum_spread = std::max(out.pair_sum_spread, std::max({s1, s2, s3}) - std::min({s1, s2, s3}));
    const double bio = biorthogonal(cp, e.col(0), e.col(1));
    out.biorthogonal_deviation = std::max(out.biorthogonal_deviation, std::abs(bio - cp.scalar / 12.0));
  }
  return out;
}

double kulkarni_lcf_residual(const MetricChart& chart, std::span<const double> x, int frames, std::uint64_t seed) {
  require_dim4(chart.dim());
  return kulkarni_check(curvature_at(chart, x), frames, seed).residual();
}

namespace {

struct FieldJet {
  Jet f;
  ChristoffelData gamma;
  Eigen::MatrixXd ginv;
};

FieldJet field_jet(const MetricChart& chart, const ScalarField& f, std::span<const double> x) {
  chart.require_contains(x);
  FieldJet out;
  const JetVec xs = coordinate_jets(x, 2);
  out.f = f(xs);
  if (!out.f.valid() || out.f.order() < 2 || out.f.nvars() != chart.dim())
    throw InvalidArgument("scalar field must be evaluable to jet order 2");
  const Eigen::MatrixXd g = chart.metric_at(x);
  require_nondegenerate(g, x);
  out.ginv = g.inverse();
  out.gamma = christoffel_at(chart, x, false);
  return out;
}

}  // namespace

double scalar_laplacian(const MetricChart& chart, const ScalarField& f, std::span<const double> x) {
  const FieldJet fj = field_jet(chart, f, x);
  const int n = chart.dim();
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double hess = fj.f.d2(i, j);
      for (int k = 0; k < n; ++k) hess -= fj.gamma.christoffel[(k * n + i) * n + j] * fj.f.d(k);
      s += fj.ginv(i, j) * hess;
    }
  return -s;
}

double gradient_norm2(const MetricChart& chart, const ScalarField& f, std::span<const double> x) {
  const FieldJet fj = field_jet(chart, f, x);
  const int n = chart.dim();
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s += fj.ginv(i, j) * fj.f.d(i) * fj.f.d(j);
  return s;
}

double weighted_scalar(const MetricChart& chart, const ScalarField& f, double alpha, double beta,
                       std::span<const double> x) {
  const double sc = curvature_at(chart, x).scalar;
  if (alpha == 0.0 && beta == 0.0) return sc;
  return sc + alpha * scalar_laplacian(chart, f, x) - beta * gradient_norm2(chart, f, x);
}

DecompositionResiduals rm_decomposition_residuals(const CurvaturePoint& cp) {
  const double n = cp.dim;
  if (cp.dim < 3) throw PreconditionError("Riemann decomposition needs n >= 3");
  const double sc2 = cp.scalar * cp.scalar;
  DecompositionResiduals r;
  r.ricci_form =
      std::abs(cp.rm_norm2 - (cp.weyl_norm2 + 4.0 / (n - 2) * cp.ric_norm2 - 2.0 / ((n - 1) * (n - 2)) * sc2));
  r.traceless_form =
      std::abs(cp.rm_norm2 - (cp.weyl_norm2 + 4.0 / (n - 2) * cp.ring_norm2 + 2.0 / (n * (n - 1)) * sc2));
  return r;
}

DecompositionResiduals rm_decomposition_residuals(const MetricChart& chart, std::span<const double> x) {
  if (chart.dim() < 3) throw PreconditionError("Riemann decomposition needs n >= 3");
  return rm_decomposition_residuals(curvature_at(chart, x));
}

PointInvariants point_invariants(const CurvaturePoint& cp) {
  const int n = cp.dim;
  const Tensor4& r = cp.riemann_low;
  const Eigen::MatrixXd& gi = cp.inverse_metric;
  PointInvariants p;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          p.antisymmetry = std::max({p.antisymmetry, std::abs(r(i, j, k, l) + r(j, i, k, l)),
                                     std::abs(r(i, j, k, l) + r(i, j, l, k))});
          p.pair_symmetry = std::max(p.pair_symmetry, std::abs(r(i, j, k, l) - r(k, l, i, j)));
          p.first_bianchi =
              std::max(p.first_bianchi, std::abs(r(i, j, k, l) + r(i, k, l, j) + r(i, l, j, k)));
        }
  p.ricci_trace = std::abs((gi * cp.ricci).trace() - cp.scalar);
  p.ring_trace = std::abs((gi * cp.traceless_ricci).trace());
  // Every single contraction of the Weyl tensor.
  static constexpr std::array<std::array<int, 2>, 6> slots{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};
  const Tensor4& w = cp.weyl_low;
  for (const auto& s : slots) {
    std::array<int, 2> free{};
    int f = 0;
    for (int q = 0; q < 4; ++q)
      if (q != s[0] && q != s[1]) free[f++] = q;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        double t = 0.0;
        for (int c = 0; c < n; ++c)
          for (int d = 0; d < n; ++d) {
            std::array<int, 4> idx{};
            idx[s[0]] = c;
            idx[s[1]] = d;
            idx[free[0]] = a;
            idx[free[1]] = b;
            t += gi(c, d) * w(idx[0], idx[1], idx[2], idx[3]);
          }
        p.weyl_traces = std::max(p.weyl_traces, std::abs(t));
      }
  }
  p.ring_norm_identity = std::abs(cp.ring_norm2 - (cp.ric_norm2 - cp.scalar * cp.scalar / n));
  return p;
}

double contracted_bianchi_residual(const MetricChart& chart, std::span<const double> x) {
  const CurvatureJets cj = curvature_jets(chart, x, 1);
  const int n = cj.dim;
  auto gam = [&](int k, int i, int j) { return cj.christoffel[(k * n + i) * n + j].value(); };
  auto ric = [&](int i, int j) { return cj.ricci[i * n + j].value(); };
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    double div = 0.0;
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double cov = cj.ricci[i * n + j].d(k);
        for (int m = 0; m < n; ++m) cov -= gam(m, k, i) * ric(m, j) + gam(m, k, j) * ric(i, m);
        div += cj.inverse_metric[j * n + k].value() * cov;
      }
    worst = std::max(worst, std::abs(div - 0.5 * cj.scalar.d(i)));
  }
  return worst;
}

double scalar_curvature_laplacian(const MetricChart& chart, std::span<const double> x) {
  const CurvatureJets cj = curvature_jets(chart, x, 2);
  const int n = cj.dim;
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double hess = cj.scalar.d2(i, j);
      for (int k = 0; k < n; ++k) hess -= cj.christoffel[(k * n + i) * n + j].value() * cj.scalar.d(k);
      s += cj.inverse_metric[i * n + j].value() * hess;
    }
  return -s;
}

RingDerivativeData ring_derivative_data(const MetricChart& chart, std::span<const double> x) {
  const CurvatureJets cj = curvature_jets(chart, x, 1);
  const int n = cj.dim;
  JetVec ring(n * n);
  for (int a = 0; a < n * n; ++a) ring[a] = cj.ricci[a] - (1.0 / n) * cj.scalar * cj.metric[a];
  auto gam = [&](int k, int i, int j) { return cj.christoffel[(k * n + i) * n + j].value(); };
  // nabla_k Ring_ij at [(k n + i) n + j].
  std::vector<double> cov(n * n * n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double v = ring[i * n + j].d(k);
        for (int m = 0; m < n; ++m)
          v -= gam(m, k, i) * ring[m * n + j].value() + gam(m, k, j) * ring[i * n + m].value();
        cov[(k * n + i) * n + j] = v;
      }
  Eigen::MatrixXd ginv(n, n), rv(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      ginv(i, j) = cj.inverse_metric[i * n + j].value();
      rv(i, j) = ring[i * n + j].value();
    }
  const Eigen::MatrixXd e = raising_frame(ginv);
  // Frame components, one slot at a time.
  std::vector<double> t1(n * n * n, 0.0), t2(n * n * n, 0.0);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < n; ++c) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += cov[(k * n + i) * n + j] * e(j, c);
        t1[(k * n + i) * n + c] = s;
      }
  for (int k = 0; k < n; ++k)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += t1[(k * n + i) * n + c] * e(i, b);
        t2[(k * n + b) * n + c] = s;
      }
  double norm = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += t2[(k * n + b) * n + c] * e(k, a);
        norm += s * s;
      }
  RingDerivativeData out;
  out.scalar = cj.scalar.value();
  out.grad_ring_norm2 = norm;
  double gs = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) gs += ginv(i, j) * cj.scalar.d(i) * cj.scalar.d(j);
  out.grad_scalar_norm2 = gs;
  out.trace_ring_cubed = trace_cubed(rv, ginv);
  out.scalar_ring_norm2 = out.scalar * norm2_lower2(rv, ginv);
  return out;
}

}  // namespace curvkit
