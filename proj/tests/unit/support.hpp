#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace curvkit::test {

// Polar angles (theta_1, ..., theta_{n-1}, phi) to the unit sphere in R^{n+1}.
inline std::vector<double> polar_to_ambient(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<double> y(n + 1);
  double s = 1.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    y[i] = s * std::cos(x[i]);
    s *= std::sin(x[i]);
  }
  y[n - 1] = s * std::cos(x[n - 1]);
  y[n] = s * std::sin(x[n - 1]);
  return y;
}

// Projection from the pole y_{n+1} = 1.
inline std::vector<double> polar_to_stereographic(std::span<const double> x) {
  const std::vector<double> y = polar_to_ambient(x);
  const std::size_t n = x.size();
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = y[i] / (1.0 - y[n]);
  return s;
}

inline double relative_error(double computed, double expected) {
  return std::abs(computed - expected) / std::max(1e-300, std::abs(expected));
}

}  // namespace curvkit::test
