#include "curvkit/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "curvkit/catalog.hpp"
#include "curvkit/conformal.hpp"
#include "curvkit/error.hpp"
#include "curvkit/parallel.hpp"

namespace curvkit {

namespace {

constexpr double kPi = std::numbers::pi;

// Nodes and weights on [-1, 1] by Newton iteration on P_n.
void legendre_rule(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

}  // namespace

AxisRule gauss_legendre(int n, double a, double b) { return gauss_legendre_cells(n, {a, b}); }

AxisRule gauss_legendre_cells(int n_per_cell, std::vector<double> edges) {
  if (n_per_cell < 1 || edges.size() < 2) throw InvalidArgument("gauss_legendre: need >= 1 node and one cell");
  std::vector<double> x, w;
  legendre_rule(n_per_cell, x, w);
  AxisRule rule;
  rule.kind = RuleKind::gauss_legendre;
  for (std::size_t c = 0; c + 1 < edges.size(); ++c) {
    const double a = edges[c], b = edges[c + 1];
    if (!(b > a)) throw InvalidArgument("gauss_legendre: cell edges must increase");
    for (int i = 0; i < n_per_cell; ++i) {
      rule.nodes.push_back(0.5 * (a + b) + 0.5 * (b - a) * x[i]);
      rule.weights.push_back(0.5 * (b - a) * w[i]);
    }
  }
  rule.cells = std::move(edges);
  return rule;
}

AxisRule periodic_trapezoid(int n, double a, double b) {
  if (n < 1 || !(b > a)) throw InvalidArgument("periodic_trapezoid: need n >= 1 and b > a");
  AxisRule rule;
  rule.kind = RuleKind::periodic_trapezoid;
  rule.cells = {a, b};
  const double h = (b - a) / n;
  for (int i = 0; i < n; ++i) {
    rule.nodes.push_back(a + i * h);
    rule.weights.push_back(h);
  }
  return rule;
}

QuadratureGrid::QuadratureGrid(std::vector<AxisRule> axes) : axes_(std::move(axes)) {
  size_ = 1;
  for (const auto& a : axes_) {
    for (double w : a.weights)
      if (!(w > 0.0)) throw InvalidArgument("quadrature weights must be positive");
    size_ *= static_cast<std::size_t>(a.size());
  }
}

double QuadratureGrid::node(std::size_t flat, std::span<double> q) const {
  double w = 1.0;
  for (int d = dim() - 1; d >= 0; --d) {
    const auto& a = axes_[d];
    const std::size_t s = static_cast<std::size_t>(a.size());
    const std::size_t i = flat % s;
    flat /= s;
    q[d] = a.nodes[i];
    w *= a.weights[i];
  }
  return w;
}

std::vector<int> QuadratureGrid::node_counts() const {
  std::vector<int> out;
  for (const auto& a : axes_) out.push_back(a.size());
  return out;
}

std::size_t Atlas::node_count() const {
  std::size_t s = 0;
  for (const auto& p : patches) s += p.grid.size();
  return s;
}

Atlas::Node Atlas::node(std::size_t flat, std::span<double> x) const {
  int p = 0;
  while (flat >= patches[p].grid.size()) {
    flat -= patches[p].grid.size();
    ++p;
  }
  const Patch& patch = patches[p];
  Node out;
  out.patch = p;
  double q[2 * kMaxJetVars];
  const int n = patch.grid.dim();
  double w = patch.grid.node(flat, std::span<double>(q, n));
  if (patch.param) {
    w *= patch.param(std::span<const double>(q, n), x);
  } else {
    for (int i = 0; i < n; ++i) x[i] = q[i];
  }
  if (patch.partition && w != 0.0) w *= patch.partition(x);
  out.weight = w;
  return out;
}

double sphere_partition(double r) {
  if (r <= kOverlapInner) return 1.0;
  if (r >= kOverlapOuter) return 0.0;
  const double t = std::log(r) / std::log(kOverlapOuter);
  const double s = 0.5 * (t + 1.0);
  const double s4 = s * s * s * s;
  return 1.0 - s4 * (35.0 - 84.0 * s + 70.0 * s * s - 20.0 * s * s * s);
}

int default_nodes(int dim) { return dim <= 4 ? 24 : 12; }

namespace {

double radius_of(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

// Hyperspherical coordinates (chi, psi_1, ..., psi_{n-2}, phi) -> x, with
// stereographic radius r = tan(chi / 2).
double polar_to_cartesian(std::span<const double> q, std::span<double> x) {
  const int n = static_cast<int>(q.size());
  const double r = std::tan(0.5 * q[0]);
  const double c = std::cos(0.5 * q[0]);
  double jac = std::pow(r, n - 1) / (2.0 * c * c);
  double s = r;
  for (int i = 1; i < n - 1; ++i) {
    x[i - 1] = s * std::cos(q[i]);
    const double si = std::sin(q[i]);
    s *= si;
    jac *= std::pow(si, n - 1 - i);
  }
  x[n - 2] = s * std::cos(q[n - 1]);
  x[n - 1] = s * std::sin(q[n - 1]);
  return jac;
}

}  // namespace

Atlas sphere_atlas(int dim, int nodes, double radius) {
  if (dim < 2) throw InvalidArgument("sphere_atlas: dimension must be >= 2");
  if (nodes <= 0) nodes = default_nodes(dim);
  if (nodes % 2 != 0 || nodes < 2) throw InvalidArgument("sphere_atlas: node count must be even");
  std::vector<AxisRule> axes;
  axes.push_back(
      gauss_legendre_cells(nodes / 2, {0.0, 2.0 * std::atan(kOverlapInner), 2.0 * std::atan(kOverlapOuter)}));
  for (int i = 1; i < dim - 1; ++i) axes.push_back(gauss_legendre(nodes, 0.0, kPi));
  axes.push_back(periodic_trapezoid(nodes, 0.0, 2.0 * kPi));
  const QuadratureGrid grid(axes);
  Atlas atlas;
  atlas.name = "S" + std::to_string(dim);
  atlas.closed = true;
  for (int p = 0; p < 2; ++p) {
    Patch patch;
    patch.chart = sphere_stereographic(dim, radius);
    patch.chart.set_name(atlas.name + (p == 0 ? "/north" : "/south"));
    patch.grid = grid;
    patch.param = polar_to_cartesian;
    patch.partition = [](std::span<const double> x) { return sphere_partition(radius_of(x)); };
    if (p == 0) {
      patch.embedding = [radius](std::span<const Jet> x) { return stereographic_embedding(x, radius); };
    } else {
      patch.embedding = [radius](std::span<const Jet> x) {
        JetVec xr(x.begin(), x.end());
        xr[0] = -xr[0];
        JetVec y = stereographic_embedding(xr, radius);
        y.back() = -y.back();
        return y;
      };
    }
    atlas.patches.push_back(std::move(patch));
  }
  // The second chart is the first composed with inversion and a reflection
  // in x_1, so both charts carry the same orientation.
  atlas.partition_check = [dim] {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> radial(0.7, 1.35);
    double worst = 0.0;
    for (int s = 0; s < 256; ++s) {
      std::vector<double> x(dim);
      for (double& v : x) v = normal(rng);
      const double scale = radial(rng) / radius_of(x);
      for (double& v : x) v *= scale;
      const double r = radius_of(x);
      const double w = sphere_partition(r) + sphere_partition(1.0 / r);
      worst = std::max(worst, std::abs(w - 1.0));
    }
    return worst;
  };
  return atlas;
}

Atlas torus_atlas(int dim, int nodes) {
  if (nodes <= 0) nodes = default_nodes(dim);
  std::vector<AxisRule> axes(dim, periodic_trapezoid(nodes, 0.0, 1.0));
  Atlas atlas;
  atlas.name = "T" + std::to_string(dim);
  atlas.closed = true;
  atlas.patches.push_back(Patch{flat_torus(dim), QuadratureGrid(axes), {}, {}, 1, {}});
  return atlas;
}

Atlas nil3_atlas(int nodes) {
  if (nodes <= 0) nodes = default_nodes(3);
  std::vector<AxisRule> axes(3, periodic_trapezoid(nodes, 0.0, 1.0));
  Atlas atlas;
  atlas.name = "nil3";
  atlas.closed = true;
  atlas.patches.push_back(Patch{nil3(), QuadratureGrid(axes), {}, {}, 1, {}});
  return atlas;
}

Atlas box_atlas(const MetricChart& chart, const Box& box, int nodes) {
  if (box.dim() != chart.dim()) throw InvalidArgument("box_atlas: box dimension mismatch");
  std::vector<AxisRule> axes;
  for (int i = 0; i < box.dim(); ++i) axes.push_back(gauss_legendre(nodes, box.lo[i], box.hi[i]));
  Atlas atlas;
  atlas.name = chart.name() + "/box";
  atlas.closed = false;
  atlas.patches.push_back(Patch{chart, QuadratureGrid(axes), {}, {}, 1, {}});
  return atlas;
}

Atlas product_atlas(const Atlas& a, const Atlas& b) {
  Atlas atlas;
  atlas.name = a.name + "x" + b.name;
  atlas.closed = a.closed && b.closed;
  for (const Patch& pa : a.patches)
    for (const Patch& pb : b.patches) {
      Patch p;
      p.chart = product(pa.chart, pb.chart);
      std::vector<AxisRule> axes = pa.grid.axes();
      for (const auto& ax : pb.grid.axes()) axes.push_back(ax);
      p.grid = QuadratureGrid(axes);
      const int na = pa.chart.dim(), nb = pb.chart.dim();
      const Parameterization fa = pa.param, fb = pb.param;
      if (fa || fb) {
        p.param = [fa, fb, na, nb](std::span<const double> q, std::span<double> x) {
          double jac = 1.0;
          if (fa) {
            jac *= fa(q.subspan(0, na), x.subspan(0, na));
          } else {
            for (int i = 0; i < na; ++i) x[i] = q[i];
          }
          if (fb) {
            jac *= fb(q.subspan(na, nb), x.subspan(na, nb));
          } else {
            for (int i = 0; i < nb; ++i) x[na + i] = q[na + i];
          }
          return jac;
        };
      }
      const PointFunction wa = pa.partition, wb = pb.partition;
      if (wa || wb) {
        p.partition = [wa, wb, na, nb](std::span<const double> x) {
          double w = 1.0;
          if (wa) w *= wa(x.subspan(0, na));
          if (wb) w *= wb(x.subspan(na, nb));
          return w;
        };
      }
      p.orientation = pa.orientation * pb.orientation;
      const MapFn ea = pa.embedding, eb = pb.embedding;
      if (ea || eb) {
        p.embedding = [ea, eb, na, nb](std::span<const Jet> x) {
          JetVec y = ea ? ea(x.subspan(0, na)) : JetVec(x.begin(), x.begin() + na);
          const JetVec yb = eb ? eb(x.subspan(na, nb)) : JetVec(x.begin() + na, x.end());
          y.insert(y.end(), yb.begin(), yb.end());
          return y;
        };
      }
      atlas.patches.push_back(std::move(p));
    }
  const auto ca = a.partition_check, cb = b.partition_check;
  atlas.partition_check = [ca, cb] { return std::max(ca ? ca() : 0.0, cb ? cb() : 0.0); };
  return atlas;
}

Atlas named_atlas(const std::string& name, int nodes) {
  std::vector<std::string> tokens;
  std::size_t start = 0;
  while (true) {
    const std::size_t at = name.find('x', start);
    tokens.push_back(name.substr(start, at - start));
    if (at == std::string::npos) break;
    start = at + 1;
  }
  auto factor = [nodes](const std::string& t) -> Atlas {
    if (t == "nil3") return nil3_atlas(nodes);
    if (t.size() >= 2 && (t[0] == 'S' || t[0] == 'T')) {
      const int n = std::stoi(t.substr(1));
      return t[0] == 'S' ? sphere_atlas(n, nodes) : torus_atlas(n, nodes);
    }
    throw InvalidArgument("unknown atlas name '" + t + "'");
  };
  Atlas atlas = factor(tokens[0]);
  for (std::size_t i = 1; i < tokens.size(); ++i) atlas = product_atlas(atlas, factor(tokens[i]));
  return atlas;
}

Atlas homothety(const Atlas& atlas, double c) {
  Atlas out = atlas;
  for (Patch& p : out.patches) p.chart = homothety(p.chart, c);
  return out;
}

Atlas conformal_atlas(const Atlas& atlas, const ScalarField& f) {
  Atlas out = atlas;
  for (Patch& p : out.patches)
    p.chart = conformal_scale(p.chart, ConformalFactor::exponential(p.chart.dim(), on_patch(p, f)));
  return out;
}

ScalarField on_patch(const Patch& patch, const ScalarField& ambient) {
  if (!patch.embedding) return ambient;
  const MapFn e = patch.embedding;
  return [e, ambient](std::span<const Jet> x) { return ambient(e(x)); };
}

std::vector<double> ambient_point(const Patch& patch, std::span<const double> x) {
  if (!patch.embedding) return std::vector<double>(x.begin(), x.end());
  const JetVec xs = coordinate_jets(x, 0);
  const JetVec y = patch.embedding(xs);
  std::vector<double> out;
  for (const Jet& v : y) out.push_back(v.value());
  return out;
}

Atlas reversed(const Atlas& atlas) {
  Atlas out = atlas;
  for (Patch& p : out.patches) p.orientation = -p.orientation;
  return out;
}

std::vector<double> integrate(const Atlas& atlas, const Density& density, int width) {
  if (atlas.patches.empty()) throw InvalidArgument("integrate: empty atlas");
  if (atlas.partition_check) {
    const double r = atlas.partition_check();
    if (!(r <= kPartitionTolerance)) throw PreconditionError("integrate: partition weights do not sum to 1");
  }
  const int n = atlas.dim();
  return parallel_sum(atlas.node_count(), width, [&](std::size_t i, std::span<double> out) {
    double x[2 * kMaxJetVars];
    const std::span<double> xs(x, n);
    const Atlas::Node node = atlas.node(i, xs);
    if (node.weight == 0.0) {
      for (double& v : out) v = 0.0;
      return;
    }
    const Patch& patch = atlas.patches[node.patch];
    const double vol = std::sqrt(patch.chart.metric_at(xs).determinant());
    density(patch, xs, out);
    for (double& v : out) v *= node.weight * vol;
  });
}

double integrate(const Atlas& atlas, const std::function<double(const Patch&, std::span<const double>)>& density) {
  return integrate(
      atlas, [&](const Patch& p, std::span<const double> x, std::span<double> out) { out[0] = density(p, x); }, 1)[0];
}

double volume(const Atlas& atlas) {
  return integrate(atlas, [](const Patch&, std::span<const double>) { return 1.0; });
}

}  // namespace curvkit
