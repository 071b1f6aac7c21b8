#pragma once

#include <vector>

#include <Eigen/Dense>

namespace curvkit {

// Dense rank-4 array over n indices, row-major.
class Tensor4 {
 public:
  Tensor4() = default;
  explicit Tensor4(int n) : n_(n), v_(static_cast<std::size_t>(n) * n * n * n, 0.0) {}

  int dim() const { return n_; }
  double& operator()(int i, int j, int k, int l) { return v_[((i * n_ + j) * n_ + k) * n_ + l]; }
  double operator()(int i, int j, int k, int l) const { return v_[((i * n_ + j) * n_ + k) * n_ + l]; }
  std::vector<double>& data() { return v_; }
  const std::vector<double>& data() const { return v_; }

 private:
  int n_ = 0;
  std::vector<double> v_;
};

// Full contraction T_ijkl T^ijkl with every index raised by ginv.
double norm2_lower4(const Tensor4& t, const Eigen::MatrixXd& ginv);
// S_ij S^ij.
double norm2_lower2(const Eigen::MatrixXd& s, const Eigen::MatrixXd& ginv);
// Components of t in the frame whose vectors are the columns of e.
Tensor4 in_frame(const Tensor4& t, const Eigen::MatrixXd& e);

}  // namespace curvkit
