#include "curvkit/globalint.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

#include "curvkit/curvature.hpp"
#include "curvkit/error.hpp"

namespace curvkit {

namespace {

constexpr double kPi = std::numbers::pi;

void require_closed(const Atlas& atlas, const char* op) {
  if (!atlas.closed) throw PreconditionError(std::string(op) + ": atlas is not closed");
}

void require_dim(const Atlas& atlas, int n, const char* op) {
  if (atlas.dim() != n) throw PreconditionError(std::string(op) + ": atlas has the wrong dimension");
}

// Largest Weyl norm seen over the nodes, with its location.
class WeylMonitor {
 public:
  void observe(const Patch& patch, std::span<const double> x, double weyl_norm2) {
    const double w = std::sqrt(std::max(0.0, weyl_norm2));
    std::lock_guard<std::mutex> lock(mutex_);
    if (w > worst_ || (w == worst_ && where_.empty())) {
      worst_ = w;
      where_ = patch.chart.name();
      point_.assign(x.begin(), x.end());
    }
  }
  double worst() const { return worst_; }
  void require_lcf(const char* op) const {
    if (worst_ <= kLcfTolerance) return;
    std::ostringstream os;
    os << op << ": metric is not locally conformally flat; |W| = " << worst_ << " at node (";
    for (std::size_t i = 0; i < point_.size(); ++i) os << (i ? ", " : "") << point_[i];
    os << ") of chart '" << where_ << "'";
    throw PreconditionError(os.str());
  }

 private:
  std::mutex mutex_;
  double worst_ = 0.0;
  std::string where_;
  std::vector<double> point_;
};

}  // namespace

double gbc4_density(const MetricChart& chart, std::span<const double> x) {
  const CurvaturePoint cp = curvature_at(chart, x);
  return cp.scalar * cp.scalar / 6.0 - 2.0 * cp.ring_norm2 + cp.weyl_norm2;
}

Gbc4Breakdown gbc4(const Atlas& atlas) {
  require_closed(atlas, "gbc4");
  require_dim(atlas, 4, "gbc4");
  const auto sums = integrate(
      atlas,
      [](const Patch& p, std::span<const double> x, std::span<double> out) {
        const CurvaturePoint cp = curvature_at(p.chart, x);
        out[0] = cp.scalar * cp.scalar;
        out[1] = cp.ring_norm2;
        out[2] = cp.weyl_norm2;
        out[3] = 1.0;
      },
      4);
  Gbc4Breakdown b;
  b.scal2_term = sums[0] / 6.0;
  b.ricci_term = -2.0 * sums[1];
  b.weyl_term = sums[2];
  b.total = b.scal2_term + b.ricci_term + b.weyl_term;
  b.chi_estimate = b.total / (32.0 * kPi * kPi);
  b.volume = sums[3];
  return b;
}

Gbc6Breakdown gbc6(const Atlas& atlas) {
  require_dim(atlas, 6, "gbc6");
  WeylMonitor monitor;
  const auto sums = integrate(
      atlas,
      [&monitor](const Patch& p, std::span<const double> x, std::span<double> out) {
        const CurvaturePoint cp = curvature_at(p.chart, x);
        monitor.observe(p, x, cp.weyl_norm2);
        out[0] = cp.scalar * cp.scalar * cp.scalar;
        out[1] = cp.scalar * cp.ring_norm2;
        out[2] = trace_cubed(cp.traceless_ricci, cp.inverse_metric);
      },
      3);
  monitor.require_lcf("gbc6");
  Gbc6Breakdown b;
  b.scal3_term = sums[0] / 225.0;
  b.scal_ring_term = -sums[1] / 10.0;
  b.ring3_term = sums[2] / 4.0;
  b.total = b.scal3_term + b.scal_ring_term + b.ring3_term;
  b.chi_estimate = b.total / (64.0 * kPi * kPi * kPi);
  b.max_weyl_norm = monitor.worst();
  return b;
}

GurskyResult gursky_identity_residual(const Atlas& atlas) {
  require_dim(atlas, 6, "gursky_identity_residual");
  WeylMonitor monitor;
  const auto sums = integrate(
      atlas,
      [&monitor](const Patch& p, std::span<const double> x, std::span<double> out) {
        monitor.observe(p, x, curvature_at(p.chart, x).weyl_norm2);
        const RingDerivativeData d = ring_derivative_data(p.chart, x);
        out[0] = d.grad_ring_norm2;
        out[1] = d.grad_scalar_norm2;
        out[2] = d.trace_ring_cubed;
        out[3] = d.scalar_ring_norm2;
      },
      4);
  monitor.require_lcf("gursky_identity_residual");
  GurskyResult r;
  r.grad_ring = sums[0];
  r.grad_scalar = sums[1];
  r.ring3 = sums[2];
  r.scalar_ring = sums[3];
  r.lhs = r.grad_ring;
  r.rhs = 2.0 / 15.0 * r.grad_scalar - 1.5 * r.ring3 - 0.2 * r.scalar_ring;
  r.residual = std::abs(r.lhs - r.rhs) / std::max(1.0, std::abs(r.lhs));
  return r;
}

double signature_integral(const Atlas& atlas) {
  require_closed(atlas, "signature_integral");
  require_dim(atlas, 4, "signature_integral");
  const double s = integrate(atlas, [](const Patch& p, std::span<const double> x) {
    const WeylSplit w = weyl_pm_norms(curvature_at(p.chart, x), p.orientation);
    return w.plus - w.minus;
  });
  return s / (48.0 * kPi * kPi);
}

}  // namespace curvkit
