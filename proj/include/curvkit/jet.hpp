#pragma once

// Truncated multivariate Taylor arithmetic.
//
// A Jet stores the Taylor coefficients c_a of a smooth function around a
// point, for every multi-index a with |a| <= order, so that
//
//     f(x + h) = sum_a c_a h^a + O(|h|^(order+1)).
//
// Mixed partial derivatives are recovered as a! * c_a. Arithmetic and the
// elementary functions propagate the coefficients exactly up to roundoff.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <boost/container/small_vector.hpp>

namespace curvkit {

inline constexpr int kMaxJetOrder = 4;
inline constexpr int kMaxJetVars = 8;

// Graded monomial ordering for a fixed (nvars, order). Monomials of degree
// <= d occupy the first size_of_degree(d) slots, so lower-order bases are
// prefixes of higher-order ones.
class MonomialBasis {
 public:
  struct Product {
    std::uint16_t a, b, out;
  };
  using Exponent = std::array<std::uint8_t, kMaxJetVars>;

  static const MonomialBasis& get(int nvars, int order);

  int nvars() const { return nvars_; }
  int order() const { return order_; }
  int size() const { return static_cast<int>(exponents_.size()); }
  int size_of_degree(int d) const { return degree_end_[d]; }
  int degree(int k) const { return degrees_[k]; }
  const Exponent& exponent(int k) const { return exponents_[k]; }
  // a! for monomial k.
  double factorial(int k) const { return factorials_[k]; }
  // Index of the monomial with the given exponents, or -1 when its degree
  // exceeds the order.
  int index(std::span<const int> alpha) const;
  // Index of monomial k times x_var, or -1 when that leaves the basis.
  int raise(int var, int k) const { return raise_[var * size() + k]; }
  std::span<const Product> products() const { return products_; }

 private:
  MonomialBasis(int nvars, int order);

  int nvars_;
  int order_;
  std::vector<Exponent> exponents_;
  std::vector<int> degrees_;
  std::vector<int> degree_end_;
  std::vector<double> factorials_;
  std::vector<int> raise_;
  std::vector<Product> products_;
};

class Jet {
 public:
  using Storage = boost::container::small_vector<double, 36>;

  Jet() = default;
  // Constant jet.
  Jet(const MonomialBasis& basis, double value);
  // The coordinate function x_var expanded at `value`.
  static Jet variable(const MonomialBasis& basis, int var, double value);

  const MonomialBasis& basis() const { return *basis_; }
  bool valid() const { return basis_ != nullptr; }
  int order() const { return basis_->order(); }
  int nvars() const { return basis_->nvars(); }

  double value() const { return c_[0]; }
  double coeff(int k) const { return c_[k]; }
  double& coeff(int k) { return c_[k]; }
  std::span<const double> coeffs() const { return {c_.data(), c_.size()}; }

  // Mixed partial derivative d^alpha f at the expansion point.
  double partial(std::span<const int> alpha) const;
  double d(int i) const;
  double d2(int i, int j) const;

  // Exact derivative with respect to x_var; the result has order - 1.
  Jet derivative(int var) const;
  // Drop all coefficients above the given order.
  Jet truncated(int order) const;
  // Same basis, value replaced by zero.
  Jet zero_like() const { return Jet(*basis_, 0.0); }

  Jet operator-() const;
  Jet& operator+=(const Jet& other);
  Jet& operator-=(const Jet& other);
  Jet& operator*=(const Jet& other);
  Jet& operator/=(const Jet& other);
  Jet& operator+=(double s);
  Jet& operator-=(double s);
  Jet& operator*=(double s);
  Jet& operator/=(double s);

  // f(value + h) = sum_k taylor[k] h^k for the non-constant part h.
  Jet compose(std::span<const double> taylor) const;

 private:
  const MonomialBasis* basis_ = nullptr;
  Storage c_;
};

Jet operator+(Jet a, const Jet& b);
Jet operator-(Jet a, const Jet& b);
Jet operator*(const Jet& a, const Jet& b);
Jet operator/(const Jet& a, const Jet& b);
Jet operator+(Jet a, double s);
Jet operator+(double s, Jet a);
Jet operator-(Jet a, double s);
Jet operator-(double s, const Jet& a);
Jet operator*(Jet a, double s);
Jet operator*(double s, Jet a);
Jet operator/(Jet a, double s);
Jet operator/(double s, const Jet& a);

Jet square(const Jet& a);
Jet reciprocal(const Jet& a);
Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet sqrt(const Jet& a);
Jet pow(const Jet& a, double p);
Jet sin(const Jet& a);
Jet cos(const Jet& a);
Jet sinh(const Jet& a);
Jet cosh(const Jet& a);
Jet tanh(const Jet& a);
Jet atan(const Jet& a);
Jet atanh(const Jet& a);

using JetVec = std::vector<Jet>;

// Coordinate jets x_i expanded at the point x.
JetVec coordinate_jets(std::span<const double> x, int order);

}  // namespace curvkit
