#pragma once

// Curvature on coordinate charts.
//
// Conventions:
//   R^l_ijk = d_i G^l_jk - d_j G^l_ik + G^l_im G^m_jk - G^l_jm G^m_ik
//   R_ijkl  = g(R(d_i, d_j) d_k, d_l)          (unit sphere: g_jk g_il - g_ik g_jl)
//   R_jk    = g^il R_ijkl,   Sc = g^jk R_jk    (unit n-sphere: n(n-1))
//   Delta f = -g^ij (d_i d_j f - G^k_ij d_k f) (nonnegative spectrum)
// Norms contract every index with g^-1, so a unit area form has |w|^2 = 2.

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "curvkit/chart.hpp"
#include "curvkit/tensor.hpp"

namespace curvkit {

struct CurvaturePoint {
  std::vector<double> point;
  int dim = 0;
  Eigen::MatrixXd metric;
  Eigen::MatrixXd inverse_metric;
  std::vector<double> christoffel;  // G^k_ij at [(k * n + i) * n + j]
  Tensor4 riemann_low;
  Eigen::MatrixXd ricci;
  double scalar = 0.0;
  Eigen::MatrixXd traceless_ricci;
  Tensor4 weyl_low;  // zero for n < 3
  double rm_norm2 = 0.0;
  double ric_norm2 = 0.0;
  double ring_norm2 = 0.0;
  double weyl_norm2 = 0.0;

  double gamma(int k, int i, int j) const { return christoffel[(k * dim + i) * dim + j]; }
};

// Curvature from a metric jet of order >= 2 (values, first and second
// partials are read from it).
CurvaturePoint curvature_from_metric_jet(const JetVec& g, int n, std::span<const double> x);
CurvaturePoint curvature_at(const MetricChart& chart, std::span<const double> x);

// Taylor expansions of the curvature fields at x, exact to `order` (<= 2).
struct CurvatureJets {
  int dim = 0;
  int order = 0;
  JetVec metric;
  JetVec inverse_metric;
  JetVec christoffel;  // G^k_ij
  JetVec riemann_low;  // R_ijkl
  JetVec ricci;
  Jet scalar;
};
CurvatureJets curvature_jets(const MetricChart& chart, std::span<const double> x, int order);

// Christoffel symbols and their first partials, dchristoffel at
// [((m * n + k) * n + i) * n + j] = d_m G^k_ij.
struct ChristoffelData {
  std::vector<double> christoffel;
  std::vector<double> dchristoffel;
};
ChristoffelData christoffel_at(const MetricChart& chart, std::span<const double> x, bool with_derivative);

// Weyl norms in dimension 4 from the self-dual / anti-self-dual splitting on
// 2-forms; orientation = -1 reverses the coordinate orientation.
struct WeylSplit {
  double plus = 0.0;
  double minus = 0.0;
};
WeylSplit weyl_pm_norms(const MetricChart& chart, std::span<const double> x, int orientation = 1);
WeylSplit weyl_pm_norms(const CurvaturePoint& cp, int orientation = 1);
// Same, in an explicit g-orthonormal frame (columns of e).
WeylSplit weyl_pm_norms_in_frame(const CurvaturePoint& cp, const Eigen::MatrixXd& e, int orientation = 1);

// g-orthonormal frame by modified Gram-Schmidt on the columns of `start`
// (the coordinate basis when omitted).
Eigen::MatrixXd orthonormal_frame(const Eigen::MatrixXd& g);
Eigen::MatrixXd orthonormal_frame(const Eigen::MatrixXd& g, const Eigen::MatrixXd& start);

struct TangentPlane {
  std::vector<double> point;
  Eigen::VectorXd u;
  Eigen::VectorXd v;
};

double sectional(const CurvaturePoint& cp, const Eigen::VectorXd& u, const Eigen::VectorXd& v);
double sectional(const MetricChart& chart, const TangentPlane& plane);
// Metric-orthogonal complement of span(u, v) in dimension 4.
std::pair<Eigen::VectorXd, Eigen::VectorXd> orthogonal_plane(const CurvaturePoint& cp, const Eigen::VectorXd& u,
                                                             const Eigen::VectorXd& v);
double biorthogonal(const CurvaturePoint& cp, const Eigen::VectorXd& u, const Eigen::VectorXd& v);
double biorthogonal(const MetricChart& chart, const TangentPlane& plane);

struct KulkarniResult {
  double pair_sum_spread = 0.0;
  double biorthogonal_deviation = 0.0;
  double residual() const { return pair_sum_spread + biorthogonal_deviation; }
};
inline constexpr int kKulkarniFrames = 32;
inline constexpr std::uint64_t kKulkarniSeed = 0x6b756c6b61726e69ULL;
KulkarniResult kulkarni_check(const CurvaturePoint& cp, int frames = kKulkarniFrames,
                              std::uint64_t seed = kKulkarniSeed);
double kulkarni_lcf_residual(const MetricChart& chart, std::span<const double> x, int frames = kKulkarniFrames,
                             std::uint64_t seed = kKulkarniSeed);

// Positive-spectrum Laplacian and gradient norm of a jet-evaluable field.
double scalar_laplacian(const MetricChart& chart, const ScalarField& f, std::span<const double> x);
double gradient_norm2(const MetricChart& chart, const ScalarField& f, std::span<const double> x);
// Sc + alpha Delta f - beta |grad f|^2.
double weighted_scalar(const MetricChart& chart, const ScalarField& f, double alpha, double beta,
                       std::span<const double> x);

struct DecompositionResiduals {
  double ricci_form = 0.0;      // |Rm|^2 vs |W|^2 + 4/(n-2)|Ric|^2 - 2/((n-1)(n-2)) Sc^2
  double traceless_form = 0.0;  // |Rm|^2 vs |W|^2 + 4/(n-2)|Ring|^2 + 2/(n(n-1)) Sc^2
};
DecompositionResiduals rm_decomposition_residuals(const CurvaturePoint& cp);
DecompositionResiduals rm_decomposition_residuals(const MetricChart& chart, std::span<const double> x);

// Pointwise invariants of a CurvaturePoint; each entry is a residual.
struct PointInvariants {
  double antisymmetry = 0.0;
  double pair_symmetry = 0.0;
  double first_bianchi = 0.0;
  double ricci_trace = 0.0;
  double ring_trace = 0.0;
  double weyl_traces = 0.0;
  double ring_norm_identity = 0.0;
};
PointInvariants point_invariants(const CurvaturePoint& cp);

// max_i |g^jk nabla_k R_ij - (1/2) d_i Sc|.
double contracted_bianchi_residual(const MetricChart& chart, std::span<const double> x);
// Delta Sc (positive spectrum), from order-4 metric jets.
double scalar_curvature_laplacian(const MetricChart& chart, std::span<const double> x);

// Integrand pieces of the traceless-Ricci identity in dimension 6.
struct RingDerivativeData {
  double scalar = 0.0;
  double grad_ring_norm2 = 0.0;  // |nabla Ring|^2
  double grad_scalar_norm2 = 0.0;
  double trace_ring_cubed = 0.0;  // tr(Ring^3) with one index raised
  double scalar_ring_norm2 = 0.0; // Sc |Ring|^2
};
RingDerivativeData ring_derivative_data(const MetricChart& chart, std::span<const double> x);

// tr((g^-1 S)^3).
double trace_cubed(const Eigen::MatrixXd& s, const Eigen::MatrixXd& ginv);

}  // namespace curvkit
