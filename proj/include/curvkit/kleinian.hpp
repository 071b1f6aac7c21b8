#pragma once

// Isometries of hyperbolic space H^d in the hyperboloid model
//   { x in R^{d+1} : x_1^2 + ... + x_d^2 - x_{d+1}^2 = -1, x_{d+1} > 0 },
// identified with the Poincare ball by b = x_space / (1 + x_{d+1}).
// Boundary points are unit vectors of S^{d-1}, the rays of null vectors (v, 1).

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace curvkit {

// J = diag(1, ..., 1, -1) of size d + 1.
Eigen::MatrixXd lorentz_form(int dim);
double minkowski(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

class LorentzIsometry {
 public:
  LorentzIsometry() = default;
  // Checks M^T J M = J (relative 1e-10) and preservation of the upper sheet.
  explicit LorentzIsometry(Eigen::MatrixXd m, bool validate = true);
  static LorentzIsometry identity(int dim);

  int dim() const { return static_cast<int>(m_.rows()) - 1; }
  const Eigen::MatrixXd& matrix() const { return m_; }
  LorentzIsometry operator*(const LorentzIsometry& other) const;
  LorentzIsometry inverse() const;
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const { return m_ * x; }
  // max |M^T J M - J| / max(1, max |M|^2).
  double lorentz_residual() const;
  // log of the spectral radius; 0 for elliptic and parabolic elements.
  double translation_length() const;

 private:
  Eigen::MatrixXd m_;
};

// Newton-Schulz steps towards O(d,1): M <- M (3 I - J M^T J M) / 2.
// Matrices with entries above kRenormalizeMaxEntry are returned unchanged:
// their relative residual already sits at the rounding floor.
LorentzIsometry renormalize(const LorentzIsometry& g);
inline constexpr int kRenormalizeEvery = 32;
inline constexpr double kRenormalizeMaxEntry = 1e3;

// Boost of rapidity `length` in the (x_axis, x_time) plane; attracting fixed point +e_axis.
LorentzIsometry make_boost(int dim, int axis, double length);
// Translation along the geodesic from `repelling` to `attracting` (unit
// vectors of S^{d-1}). Throws InvalidArgument for coincident endpoints.
LorentzIsometry make_translation(double length, const Eigen::VectorXd& attracting, const Eigen::VectorXd& repelling);
// Rotation by `angle` in the spatial (x_i, x_j) plane.
LorentzIsometry make_rotation(int dim, double angle, int i, int j);

Eigen::VectorXd hyperboloid_origin(int dim);
// Throws InvalidArgument unless Q(x) = -1 (relative 1e-9) and x_time >= 1.
void require_on_sheet(const Eigen::VectorXd& x);
double hyperbolic_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y);
Eigen::VectorXd ball_to_hyperboloid(const Eigen::VectorXd& b);
Eigen::VectorXd hyperboloid_to_ball(const Eigen::VectorXd& x);
// Boundary point v / t of a future null vector (v, t).
Eigen::VectorXd null_to_boundary(const Eigen::VectorXd& x);

struct GroupSpec {
  std::vector<LorentzIsometry> generators;
  bool free = true;
  int max_length = 8;
  Eigen::VectorXd basepoint;  // hyperboloid origin when empty
  std::size_t memory_budget = std::size_t{2} << 30;
};

// Smallest max|W - I| over nontrivial reduced words of length <= 4.
double free_probe(const GroupSpec& spec);
// Generators Lorentz, basepoint on the sheet, free probe > 1e-8 when free is set.
void validate_spec(const GroupSpec& spec);

// Reduced words in breadth-first order. Letters 0..m-1 are the generators,
// m..2m-1 their inverses.
struct OrbitSample {
  int generators = 0;
  std::vector<std::int32_t> parent;  // index of the word without its last letter, -1 at length 1
  std::vector<std::uint8_t> letter;
  std::vector<std::uint16_t> length;
  std::vector<double> distance;  // dist(o, w o)
  bool truncated = false;
  int complete_length = 0;  // all words up to this length are present

  std::size_t size() const { return distance.size(); }
  std::vector<int> word(std::size_t i) const;
  // N(R) = #{w : dist(o, w o) <= R} for each R.
  std::vector<std::size_t> counts(const std::vector<double>& radii) const;
};
OrbitSample orbit_enumerate(const GroupSpec& spec);

// sum over enumerated words (length <= max_length when given) of exp(-s dist).
double poincare_partial_sum(const OrbitSample& sample, double s, int max_length = -1);

enum class ExponentMethod { growth_fit, series_knee };
struct ExponentEstimate {
  double value = 0.0;
  double uncertainty = 0.0;
  bool elementary = false;
  std::size_t points = 0;
};
inline constexpr std::size_t kMinOrbitPoints = 500;
ExponentEstimate critical_exponent_estimate(const OrbitSample& sample, ExponentMethod method);
// Enumerates, applies the elementary-group guard, then estimates.
ExponentEstimate critical_exponent_estimate(const GroupSpec& spec, ExponentMethod method);

struct LimitSetSample {
  std::vector<Eigen::VectorXd> points;  // unit vectors of S^{d-1}
  int skipped = 0;                      // elliptic or parabolic words
};
// Attracting fixed points of `count` uniformly random reduced words of the given length.
LimitSetSample limit_set_sample(const GroupSpec& spec, int word_length, int count, std::uint64_t seed);

// Greedy single-linkage clusters at the given radius.
int count_clusters(const std::vector<Eigen::VectorXd>& points, double radius);
inline constexpr double kElementaryClusterRadius = 1e-6;
bool is_elementary(const std::vector<Eigen::VectorXd>& points);

struct DimensionEstimate {
  double value = 0.0;
  double fit_error = 0.0;
  std::vector<double> scales;
  std::vector<double> counts;
};
// Box-counting slope over a geometric ladder of at least four scales;
// needs >= 1000 points.
DimensionEstimate box_dimension(const std::vector<Eigen::VectorXd>& points, const std::vector<double>& scales);
std::vector<double> scale_ladder(double largest, double ratio, int count);
// A ladder between the scale where boxes first separate the points and the
// scale where most points sit alone.
std::vector<double> automatic_ladder(const std::vector<Eigen::VectorXd>& points, int count = 6);

}  // namespace curvkit
