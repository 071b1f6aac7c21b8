#include "curvkit/chart.hpp"

#include <cmath>
#include <sstream>

#include "curvkit/error.hpp"

namespace curvkit {

Box Box::cube(int n, double lo, double hi) {
  return Box{std::vector<double>(n, lo), std::vector<double>(n, hi), std::vector<bool>(n, false)};
}

MetricChart::MetricChart(std::string name, int dim, Box domain, MetricFn components)
    : name_(std::move(name)),
      dim_(dim),
      domain_(std::move(domain)),
      sample_region_(domain_),
      components_(std::move(components)) {
  if (dim <= 0) throw InvalidArgument("chart dimension must be positive");
  if (domain_.dim() != dim) throw InvalidArgument("chart domain dimension mismatch");
  if (domain_.periodic.empty()) domain_.periodic.assign(dim, false);
  if (sample_region_.periodic.empty()) sample_region_.periodic = domain_.periodic;
}

MetricChart& MetricChart::set_interior(PointPredicate inside) {
  inside_ = std::move(inside);
  return *this;
}

MetricChart& MetricChart::set_sample_region(Box region) {
  if (region.periodic.empty()) region.periodic = domain_.periodic;
  sample_region_ = std::move(region);
  return *this;
}

MetricChart& MetricChart::set_injectivity_guard(double radius) {
  injectivity_guard_ = radius;
  return *this;
}

MetricChart& MetricChart::set_name(std::string name) {
  name_ = std::move(name);
  return *this;
}

bool MetricChart::contains(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_) return false;
  for (int i = 0; i < dim_; ++i) {
    if (!std::isfinite(x[i])) return false;
    if (domain_.periodic[i]) continue;
    if (x[i] < domain_.lo[i] || x[i] > domain_.hi[i]) return false;
  }
  return !inside_ || inside_(x);
}

void MetricChart::require_contains(std::span<const double> x) const {
  if (contains(x)) return;
  std::ostringstream os;
  os << "point (";
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ") outside the domain of chart '" << name_ << "'";
  throw DomainError(os.str());
}

JetVec MetricChart::metric_jet(std::span<const double> x, int order) const {
  if (order < 0 || order > kMaxJetOrder) throw InvalidArgument("metric_jet: order must lie in 0..4");
  require_contains(x);
  const JetVec xs = coordinate_jets(x, order);
  JetVec g = components_(xs);
  if (static_cast<int>(g.size()) != dim_ * dim_) throw InvalidArgument("metric function returned wrong size");
  return g;
}

Eigen::MatrixXd MetricChart::metric_at(std::span<const double> x) const {
  return values_of(metric_jet(x, 0), dim_);
}

Eigen::MatrixXd values_of(const JetVec& m, int n) {
  Eigen::MatrixXd out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = m[i * n + j].value();
  return out;
}

void require_nondegenerate(const Eigen::MatrixXd& g, std::span<const double> x) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  const double lo = ev.minCoeff(), hi = ev.maxCoeff();
  if (!(hi > 0.0) || lo < kDegenerateRatio * hi) {
    std::ostringstream os;
    os << "singular metric at (";
    for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
    os << "): eigenvalue range [" << lo << ", " << hi << "]";
    throw SingularMetricError(os.str());
  }
}

namespace {

double radical_inverse(int base, long long index) {
  double result = 0.0, f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= base;
  }
  return result;
}

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

}  // namespace

std::vector<std::vector<double>> sample_points(const MetricChart& chart, int count, int skip,
                                               double margin) {
  const Box& box = chart.sample_region();
  const int n = chart.dim();
  std::vector<std::vector<double>> out;
  long long index = 1 + skip;
  // The predicate may reject some candidates; bound the search.
  const long long limit = index + 200LL * count + 1000;
  while (static_cast<int>(out.size()) < count && index < limit) {
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) {
      const double span = box.hi[i] - box.lo[i];
      const double lo = box.lo[i] + margin * span;
      x[i] = lo + (1.0 - 2.0 * margin) * span * radical_inverse(kPrimes[i % 16], index);
    }
    ++index;
    if (chart.contains(x)) out.push_back(std::move(x));
  }
  return out;
}

ChartCheck validate_chart(const MetricChart& chart, int samples) {
  ChartCheck check;
  const int n = chart.dim();
  for (const auto& x : sample_points(chart, samples)) {
    const Eigen::MatrixXd g = chart.metric_at(x);
    check.max_asymmetry = std::max(check.max_asymmetry, (g - g.transpose()).cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (g + g.transpose()), Eigen::EigenvaluesOnly);
    check.min_eigenvalue = std::min(check.min_eigenvalue, es.eigenvalues().minCoeff());
    for (int i = 0; i < n; ++i) {
      if (!chart.domain().periodic[i]) continue;
      std::vector<double> a = x, b = x;
      a[i] = chart.domain().lo[i];
      b[i] = chart.domain().hi[i];
      const double mismatch = (chart.metric_at(a) - chart.metric_at(b)).cwiseAbs().maxCoeff();
      check.max_periodic_mismatch = std::max(check.max_periodic_mismatch, mismatch);
    }
  }
  check.ok = check.max_asymmetry <= 1e-13 && check.min_eigenvalue > 0.0 && check.max_periodic_mismatch <= 1e-12;
  return check;
}

}  // namespace curvkit
