#include "curvkit/jet.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "curvkit/error.hpp"

namespace curvkit {

namespace {

// All exponent vectors of total degree d in n variables, lexicographically
// descending (x0^d first).
void monomials_of_degree(int n, int d, int var, MonomialBasis::Exponent& cur,
                         std::vector<MonomialBasis::Exponent>& out) {
  if (var == n - 1) {
    cur[var] = static_cast<std::uint8_t>(d);
    out.push_back(cur);
    cur[var] = 0;
    return;
  }
  for (int e = d; e >= 0; --e) {
    cur[var] = static_cast<std::uint8_t>(e);
    monomials_of_degree(n, d - e, var + 1, cur, out);
  }
  cur[var] = 0;
}

double factorial_of(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

MonomialBasis::MonomialBasis(int nvars, int order) : nvars_(nvars), order_(order) {
  Exponent cur{};
  for (int d = 0; d <= order; ++d) {
    if (nvars == 0) {
      if (d == 0) exponents_.push_back(cur);
    } else {
      monomials_of_degree(nvars, d, 0, cur, exponents_);
    }
    degree_end_.push_back(static_cast<int>(exponents_.size()));
  }
  const int s = size();
  if (s > 65535) throw InvalidArgument("jet basis too large");
  degrees_.resize(s);
  factorials_.resize(s);
  for (int k = 0; k < s; ++k) {
    int deg = 0;
    double f = 1.0;
    for (int v = 0; v < nvars; ++v) {
      deg += exponents_[k][v];
      f *= factorial_of(exponents_[k][v]);
    }
    degrees_[k] = deg;
    factorials_[k] = f;
  }
  raise_.assign(static_cast<std::size_t>(nvars) * s, -1);
  for (int v = 0; v < nvars; ++v) {
    for (int k = 0; k < s; ++k) {
      if (degrees_[k] >= order) continue;
      std::array<int, kMaxJetVars> alpha{};
      for (int u = 0; u < nvars; ++u) alpha[u] = exponents_[k][u];
      alpha[v] += 1;
      raise_[v * s + k] = index(std::span<const int>(alpha.data(), nvars));
    }
  }
  for (int a = 0; a < s; ++a) {
    for (int b = 0; b < s; ++b) {
      if (degrees_[a] + degrees_[b] > order) continue;
      std::array<int, kMaxJetVars> alpha{};
      for (int u = 0; u < nvars; ++u) alpha[u] = exponents_[a][u] + exponents_[b][u];
      const int out = index(std::span<const int>(alpha.data(), nvars));
      products_.push_back({static_cast<std::uint16_t>(a), static_cast<std::uint16_t>(b),
                           static_cast<std::uint16_t>(out)});
    }
  }
}

int MonomialBasis::index(std::span<const int> alpha) const {
  int deg = 0;
  for (int a : alpha) deg += a;
  if (deg > order_) return -1;
  const int begin = deg == 0 ? 0 : degree_end_[deg - 1];
  const int end = degree_end_[deg];
  // Within a degree block the ordering is lexicographically descending.
  int lo = begin, hi = end;
  while (lo < hi) {
    const int mid = (lo + hi) / 2;
    int cmp = 0;
    for (int v = 0; v < nvars_ && cmp == 0; ++v) {
      const int e = exponents_[mid][v];
      if (e != alpha[v]) cmp = e > alpha[v] ? -1 : 1;
    }
    if (cmp == 0) return mid;
    if (cmp < 0) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return -1;
}

const MonomialBasis& MonomialBasis::get(int nvars, int order) {
  if (nvars < 0 || nvars > kMaxJetVars) throw InvalidArgument("jet: unsupported variable count");
  if (order < 0 || order > kMaxJetOrder) throw InvalidArgument("jet: order must lie in 0..4");
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<MonomialBasis>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[{nvars, order}];
  if (!slot) slot.reset(new MonomialBasis(nvars, order));
  return *slot;
}

Jet::Jet(const MonomialBasis& basis, double value) : basis_(&basis), c_(basis.size(), 0.0) {
  c_[0] = value;
}

Jet Jet::variable(const MonomialBasis& basis, int var, double value) {
  Jet j(basis, value);
  if (basis.order() >= 1) j.c_[1 + var] = 1.0;
  return j;
}

double Jet::partial(std::span<const int> alpha) const {
  const int k = basis_->index(alpha);
  if (k < 0) throw InvalidArgument("jet: partial derivative beyond truncation order");
  return basis_->factorial(k) * c_[k];
}

double Jet::d(int i) const {
  if (order() < 1) throw InvalidArgument("jet: first derivative needs order >= 1");
  return c_[1 + i];
}

double Jet::d2(int i, int j) const {
  if (order() < 2) throw InvalidArgument("jet: second derivative needs order >= 2");
  const int k = basis_->raise(j, 1 + i);
  return (i == j ? 2.0 : 1.0) * c_[k];
}

Jet Jet::derivative(int var) const {
  if (order() < 1) throw InvalidArgument("jet: cannot differentiate an order-0 jet");
  const MonomialBasis& lower = MonomialBasis::get(nvars(), order() - 1);
  Jet out(lower, 0.0);
  for (int k = 0; k < lower.size(); ++k) {
    const int up = basis_->raise(var, k);
    out.c_[k] = (basis_->exponent(k)[var] + 1) * c_[up];
  }
  return out;
}

Jet Jet::truncated(int order) const {
  if (order >= this->order()) return *this;
  const MonomialBasis& lower = MonomialBasis::get(nvars(), order);
  Jet out(lower, 0.0);
  for (int k = 0; k < lower.size(); ++k) out.c_[k] = c_[k];
  return out;
}

Jet Jet::operator-() const {
  Jet out = *this;
  for (double& v : out.c_) v = -v;
  return out;
}

Jet& Jet::operator+=(const Jet& o) {
  for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
  return *this;
}

Jet& Jet::operator*=(const Jet& o) {
  *this = *this * o;
  return *this;
}

Jet& Jet::operator/=(const Jet& o) {
  *this = *this / o;
  return *this;
}

Jet& Jet::operator+=(double s) {
  c_[0] += s;
  return *this;
}

Jet& Jet::operator-=(double s) {
  c_[0] -= s;
  return *this;
}

Jet& Jet::operator*=(double s) {
  for (double& v : c_) v *= s;
  return *this;
}

Jet& Jet::operator/=(double s) {
  for (double& v : c_) v /= s;
  return *this;
}

Jet Jet::compose(std::span<const double> taylor) const {
  // Horner in the nilpotent part h = f - f(0).
  Jet h = *this;
  h.c_[0] = 0.0;
  const int top = std::min<int>(order(), static_cast<int>(taylor.size()) - 1);
  Jet r(*basis_, taylor[top]);
  for (int k = top - 1; k >= 0; --k) {
    r = r * h;
    r.c_[0] += taylor[k];
  }
  return r;
}

Jet operator+(Jet a, const Jet& b) { return a += b; }
Jet operator-(Jet a, const Jet& b) { return a -= b; }

Jet operator*(const Jet& a, const Jet& b) {
  Jet out(a.basis(), 0.0);
  const double* x = a.coeffs().data();
  const double* y = b.coeffs().data();
  for (const auto& p : a.basis().products()) out.coeff(p.out) += x[p.a] * y[p.b];
  return out;
}

Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
Jet operator+(Jet a, double s) { return a += s; }
Jet operator+(double s, Jet a) { return a += s; }
Jet operator-(Jet a, double s) { return a -= s; }
Jet operator-(double s, const Jet& a) {
  Jet out = -a;
  out += s;
  return out;
}
Jet operator*(Jet a, double s) { return a *= s; }
Jet operator*(double s, Jet a) { return a *= s; }
Jet operator/(Jet a, double s) { return a /= s; }
Jet operator/(double s, const Jet& a) { return reciprocal(a) * s; }

Jet square(const Jet& a) { return a * a; }

Jet reciprocal(const Jet& a) {
  const double v = a.value();
  if (v == 0.0) throw DomainError("jet: division by zero");
  std::array<double, kMaxJetOrder + 1> t{};
  double p = 1.0 / v;
  for (int k = 0; k <= a.order(); ++k) {
    t[k] = (k % 2 == 0 ? 1.0 : -1.0) * p;
    p /= v;
  }
  return a.compose(std::span<const double>(t.data(), a.order() + 1));
}

Jet exp(const Jet& a) {
  std::array<double, kMaxJetOrder + 1> t{};
  const double e = std::exp(a.value());
  double f = 1.0;
  for (int k = 0; k <= a.order(); ++k) {
    if (k > 0) f *= k;
    t[k] = e / f;
  }
  return a.compose(std::span<const double>(t.data(), a.order() + 1));
}

Jet log(const Jet& a) {
  const double v = a.value();
  if (v <= 0.0) throw DomainError("jet: log of a nonpositive value");
  std::array<double, kMaxJetOrder + 1> t{};
  t[0] = std::log(v);
  double p = v;
  for (int k = 1; k <= a.order(); ++k) {
    t[k] = (k % 2 == 1 ? 1.0 : -1.0) / (k * p);
    p *= v;
  }
  return a.compose(std::span<const double>(t.data(), a.order() + 1));
}

Jet pow(const Jet& a, double p) {
  const double v = a.value();
  if (v <= 0.0 && p != std::floor(p)) throw DomainError("jet: fractional power of a nonpositive value");
  std::array<double, kMaxJetOrder + 1> t{};
  // binomial(p, k) v^(p - k)
  double binom = 1.0;
  for (int k = 0; k <= a.order(); ++k) {
    if (k > 0) binom *= (p - (k - 1)) / k;
    t[k] = binom * std::pow(v, p - k);
  }
  return a.compose(std::span<const double>(t.data(), a.order() + 1));
}

Jet sqrt(const Jet& a) { return pow(a, 0.5); }

namespace {

Jet compose_cyclic(const Jet& a, const std::array<double, 4>& cycle) {
  std::array<double, kMaxJetOrder + 1> t{};
  double f = 1.0;
  for (int k = 0; k <= a.order(); ++k) {
    if (k > 0) f *= k;
    t[k] = cycle[k % 4] / f;
  }
  return a.compose(std::span<const double>(t.data(), a.order() + 1));
}

}  // namespace

Jet sin(const Jet& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  return compose_cyclic(a, {s, c, -s, -c});
}

Jet cos(const Jet& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  return compose_cyclic(a, {c, -s, -c, s});
}

Jet sinh(const Jet& a) {
  const double s = std::sinh(a.value()), c = std::cosh(a.value());
  return compose_cyclic(a, {s, c, s, c});
}

Jet cosh(const Jet& a) {
  const double s = std::sinh(a.value()), c = std::cosh(a.value());
  return compose_cyclic(a, {c, s, c, s});
}

Jet tanh(const Jet& a) {
  const Jet e = exp(2.0 * a);
  return 1.0 - 2.0 / (e + 1.0);
}

Jet atan(const Jet& a) {
  const double x = a.value();
  const double q = 1.0 / (1.0 + x * x);
  std::array<double, kMaxJetOrder + 1> t{};
  // Derivatives of atan up to order 4 divided by k!.
  t[0] = std::atan(x);
  t[1] = q;
  t[2] = -x * q * q;
  t[3] = (3.0 * x * x - 1.0) * q * q * q / 3.0;
  t[4] = x * (1.0 - x * x) * q * q * q * q;
  return a.compose(std::span<const double>(t.data(), a.order() + 1));
}

Jet atanh(const Jet& a) { return 0.5 * log((1.0 + a) / (1.0 - a)); }

JetVec coordinate_jets(std::span<const double> x, int order) {
  const MonomialBasis& basis = MonomialBasis::get(static_cast<int>(x.size()), order);
  JetVec out;
  out.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out.push_back(Jet::variable(basis, static_cast<int>(i), x[i]));
  return out;
}

}  // namespace curvkit
