#include "curvkit/kleinian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>

#include "curvkit/error.hpp"
#include "curvkit/parallel.hpp"

namespace curvkit {

namespace {

constexpr double kLorentzTolerance = 1e-10;
constexpr double kSheetTolerance = 1e-9;
constexpr double kFreeProbeTolerance = 1e-8;
constexpr std::size_t kMinBoxPoints = 1000;

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

int inverse_letter(int a, int m) { return a < m ? a + m : a - m; }

// Generators followed by their inverses.
std::vector<Eigen::MatrixXd> alphabet(const GroupSpec& spec) {
  const int m = static_cast<int>(spec.generators.size());
  std::vector<Eigen::MatrixXd> out(2 * m);
  for (int i = 0; i < m; ++i) {
    out[i] = spec.generators[i].matrix();
    out[i + m] = spec.generators[i].inverse().matrix();
  }
  return out;
}

Eigen::VectorXd basepoint_of(const GroupSpec& spec) {
  if (spec.basepoint.size() > 0) return spec.basepoint;
  return hyperboloid_origin(spec.generators.front().dim());
}

Eigen::MatrixXd renormalize_matrix(const Eigen::MatrixXd& m) {
  if (max_abs(m) > kRenormalizeMaxEntry) return m;
  const int n = static_cast<int>(m.rows()) - 1;
  const Eigen::MatrixXd j = lorentz_form(n);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n + 1, n + 1);
  Eigen::MatrixXd out = m;
  for (int it = 0; it < 2; ++it) out = out * (3.0 * id - j * out.transpose() * j * out) * 0.5;
  return out;
}

// Distance from the value z = -<x, y> and the difference x - y, switching to
// the half-chord form near the diagonal.
double distance_from(double z, const Eigen::VectorXd& diff) {
  if (z >= 2.0) return std::acosh(z);
  const double chord2 = std::max(0.0, minkowski(diff, diff));
  return 2.0 * std::asinh(0.5 * std::sqrt(chord2));
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_error = 0.0;
};

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t k = x.size();
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / k;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / k;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (k > 2) {
    double ss = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double r = y[i] - f.intercept - f.slope * x[i];
      ss += r * r;
    }
    f.slope_error = std::sqrt(ss / (k - 2) / sxx);
  }
  return f;
}

std::size_t occupied_boxes(const std::vector<Eigen::VectorXd>& points, double scale) {
  std::vector<std::vector<long long>> keys;
  keys.reserve(points.size());
  for (const auto& p : points) {
    std::vector<long long> k(p.size());
    for (Eigen::Index i = 0; i < p.size(); ++i) k[i] = static_cast<long long>(std::floor(p[i] / scale));
    keys.push_back(std::move(k));
  }
  std::sort(keys.begin(), keys.end());
  return static_cast<std::size_t>(std::unique(keys.begin(), keys.end()) - keys.begin());
}

// Attracting fixed point by power iteration from the basepoint; empty when
// the word shows no dominant null direction.
std::optional<Eigen::VectorXd> attracting_point(const Eigen::MatrixXd& w, const Eigen::VectorXd& o) {
  const int n = static_cast<int>(o.size()) - 1;
  Eigen::VectorXd v = o;
  Eigen::VectorXd last = Eigen::VectorXd::Zero(n);
  for (int it = 0; it < 200; ++it) {
    v = w * v;
    v /= v[n];
    const Eigen::VectorXd b = v.head(n);
    const double gap = std::abs(1.0 - b.norm());
    const double step = (b - last).norm();
    last = b;
    if (gap < 1e-10 && step < 1e-12) return Eigen::VectorXd(b / b.norm());
  }
  return std::nullopt;
}

}  // namespace

Eigen::MatrixXd lorentz_form(int dim) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Identity(dim + 1, dim + 1);
  j(dim, dim) = -1.0;
  return j;
}

double minkowski(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const Eigen::Index n = x.size() - 1;
  return x.head(n).dot(y.head(n)) - x[n] * y[n];
}

LorentzIsometry::LorentzIsometry(Eigen::MatrixXd m, bool validate) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() < 3) throw InvalidArgument("LorentzIsometry: matrix must be square of size >= 3");
  if (!validate) return;
  if (!(lorentz_residual() <= kLorentzTolerance))
    throw InvalidArgument("LorentzIsometry: matrix does not preserve the Lorentz form");
  if (!(m_(dim(), dim()) >= 1.0 - kLorentzTolerance))
    throw InvalidArgument("LorentzIsometry: matrix swaps the hyperboloid sheets");
}

LorentzIsometry LorentzIsometry::identity(int dim) {
  return LorentzIsometry(Eigen::MatrixXd::Identity(dim + 1, dim + 1), false);
}

LorentzIsometry LorentzIsometry::operator*(const LorentzIsometry& other) const {
  if (other.m_.rows() != m_.rows()) throw InvalidArgument("LorentzIsometry: dimension mismatch");
  return LorentzIsometry(m_ * other.m_, false);
}

LorentzIsometry LorentzIsometry::inverse() const {
  const Eigen::MatrixXd j = lorentz_form(dim());
  return LorentzIsometry(j * m_.transpose() * j, false);
}

double LorentzIsometry::lorentz_residual() const {
  const Eigen::MatrixXd j = lorentz_form(dim());
  const double scale = std::max(1.0, max_abs(m_) * max_abs(m_));
  return max_abs(m_.transpose() * j * m_ - j) / scale;
}

double LorentzIsometry::translation_length() const {
  const Eigen::VectorXcd ev = Eigen::EigenSolver<Eigen::MatrixXd>(m_, false).eigenvalues();
  double rho = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) rho = std::max(rho, std::abs(ev[i]));
  const double l = std::log(rho);
  return l > 1e-7 ? l : 0.0;
}

LorentzIsometry renormalize(const LorentzIsometry& g) { return LorentzIsometry(renormalize_matrix(g.matrix()), false); }

LorentzIsometry make_boost(int dim, int axis, double length) {
  if (dim < 2) throw InvalidArgument("make_boost: dimension must be >= 2");
  if (axis < 0 || axis >= dim) throw InvalidArgument("make_boost: axis out of range");
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(dim + 1, dim + 1);
  m(axis, axis) = m(dim, dim) = std::cosh(length);
  m(axis, dim) = m(dim, axis) = std::sinh(length);
  return LorentzIsometry(m, false);
}

LorentzIsometry make_translation(double length, const Eigen::VectorXd& attracting, const Eigen::VectorXd& repelling) {
  if (!(length > 0.0)) throw InvalidArgument("make_translation: length must be positive");
  const Eigen::Index n = attracting.size();
  if (n < 2 || repelling.size() != n) throw InvalidArgument("make_translation: endpoint dimension mismatch");
  if (std::abs(attracting.norm() - 1.0) > 1e-12 || std::abs(repelling.norm() - 1.0) > 1e-12)
    throw InvalidArgument("make_translation: endpoints must be unit vectors");
  if ((attracting - repelling).norm() < 1e-12) throw InvalidArgument("make_translation: endpoints coincide");
  Eigen::VectorXd p(n + 1), q(n + 1);
  p << attracting, 1.0;
  q << repelling, 1.0;
  const Eigen::MatrixXd j = lorentz_form(static_cast<int>(n));
  // B p = p, B q = -q, B = 0 on the orthogonal complement of span(p, q).
  const Eigen::MatrixXd b = (p * q.transpose() - q * p.transpose()) * j / minkowski(p, q);
  const Eigen::MatrixXd m =
      Eigen::MatrixXd::Identity(n + 1, n + 1) + std::sinh(length) * b + (std::cosh(length) - 1.0) * b * b;
  return LorentzIsometry(m);
}

LorentzIsometry make_rotation(int dim, double angle, int i, int j) {
  if (dim < 2) throw InvalidArgument("make_rotation: dimension must be >= 2");
  if (i < 0 || j < 0 || i >= dim || j >= dim || i == j) throw InvalidArgument("make_rotation: bad plane");
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(dim + 1, dim + 1);
  m(i, i) = m(j, j) = std::cos(angle);
  m(i, j) = -std::sin(angle);
  m(j, i) = std::sin(angle);
  return LorentzIsometry(m, false);
}

Eigen::VectorXd hyperboloid_origin(int dim) {
  Eigen::VectorXd o = Eigen::VectorXd::Zero(dim + 1);
  o[dim] = 1.0;
  return o;
}

void require_on_sheet(const Eigen::VectorXd& x) {
  if (x.size() < 3) throw InvalidArgument("hyperboloid point: dimension must be >= 2");
  const double t = x[x.size() - 1];
  const double q = minkowski(x, x);
  if (!(t >= 1.0 - kSheetTolerance) || std::abs(q + 1.0) > kSheetTolerance * std::max(1.0, t * t)) {
    std::ostringstream os;
    os << "hyperboloid point off the upper sheet: Q = " << q << ", time coordinate " << t;
    throw InvalidArgument(os.str());
  }
}

double hyperbolic_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size()) throw InvalidArgument("hyperbolic_distance: dimension mismatch");
  require_on_sheet(x);
  require_on_sheet(y);
  return distance_from(std::max(1.0, -minkowski(x, y)), x - y);
}

Eigen::VectorXd ball_to_hyperboloid(const Eigen::VectorXd& b) {
  const double r2 = b.squaredNorm();
  if (!(r2 < 1.0)) throw DomainError("ball_to_hyperboloid: point outside the open unit ball");
  Eigen::VectorXd x(b.size() + 1);
  x << 2.0 * b, 1.0 + r2;
  return x / (1.0 - r2);
}

Eigen::VectorXd hyperboloid_to_ball(const Eigen::VectorXd& x) {
  require_on_sheet(x);
  const Eigen::Index n = x.size() - 1;
  return x.head(n) / (1.0 + x[n]);
}

Eigen::VectorXd null_to_boundary(const Eigen::VectorXd& x) {
  const Eigen::Index n = x.size() - 1;
  if (!(x[n] > 0.0)) throw InvalidArgument("null_to_boundary: vector is not future pointing");
  const Eigen::VectorXd b = x.head(n) / x[n];
  if (std::abs(b.norm() - 1.0) > 1e-9) throw InvalidArgument("null_to_boundary: vector is not null");
  return b / b.norm();
}

double free_probe(const GroupSpec& spec) {
  const int m = static_cast<int>(spec.generators.size());
  if (m == 0) throw InvalidArgument("group spec: no generators");
  const std::vector<Eigen::MatrixXd> a = alphabet(spec);
  const int dim = spec.generators.front().dim();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(dim + 1, dim + 1);
  double worst = std::numeric_limits<double>::infinity();
  std::vector<std::pair<Eigen::MatrixXd, int>> level;
  for (int c = 0; c < 2 * m; ++c) level.emplace_back(a[c], c);
  for (int len = 1; len <= 4; ++len) {
    std::vector<std::pair<Eigen::MatrixXd, int>> next;
    for (const auto& [w, last] : level) {
      worst = std::min(worst, max_abs(w - id));
      if (len == 4) continue;
      for (int c = 0; c < 2 * m; ++c)
        if (c != inverse_letter(last, m)) next.emplace_back(w * a[c], c);
    }
    level.swap(next);
  }
  return worst;
}

void validate_spec(const GroupSpec& spec) {
  if (spec.generators.empty()) throw InvalidArgument("group spec: no generators");
  if (spec.generators.size() > 127) throw InvalidArgument("group spec: at most 127 generators");
  const int dim = spec.generators.front().dim();
  for (std::size_t i = 0; i < spec.generators.size(); ++i) {
    const auto& g = spec.generators[i];
    if (g.dim() != dim) throw InvalidArgument("group spec: generators have different dimensions");
    if (!(g.lorentz_residual() <= kLorentzTolerance))
      throw InvalidArgument("group spec: generator " + std::to_string(i) + " is not a Lorentz isometry");
  }
  if (spec.max_length < 1) throw InvalidArgument("group spec: max_length must be >= 1");
  const Eigen::VectorXd o = basepoint_of(spec);
  if (o.size() != dim + 1) throw InvalidArgument("group spec: basepoint dimension mismatch");
  require_on_sheet(o);
  if (spec.free && !(free_probe(spec) > kFreeProbeTolerance))
    throw PreconditionError("group spec: a reduced word of length <= 4 equals the identity; the group is not free");
}

std::vector<int> OrbitSample::word(std::size_t i) const {
  std::vector<int> w;
  for (std::int64_t k = static_cast<std::int64_t>(i); k >= 0; k = parent[k]) w.push_back(letter[k]);
  std::reverse(w.begin(), w.end());
  return w;
}

std::vector<std::size_t> OrbitSample::counts(const std::vector<double>& radii) const {
  std::vector<double> d = distance;
  std::sort(d.begin(), d.end());
  std::vector<std::size_t> out;
  out.reserve(radii.size());
  for (double r : radii) out.push_back(static_cast<std::size_t>(std::upper_bound(d.begin(), d.end(), r) - d.begin()));
  return out;
}

OrbitSample orbit_enumerate(const GroupSpec& spec) {
  validate_spec(spec);
  const int m = static_cast<int>(spec.generators.size());
  const int dim = spec.generators.front().dim();
  const std::vector<Eigen::MatrixXd> a = alphabet(spec);
  const Eigen::VectorXd o = basepoint_of(spec);
  const std::size_t matrix_bytes = sizeof(double) * (dim + 1) * (dim + 1) + sizeof(Eigen::MatrixXd);
  const std::size_t entry_bytes = sizeof(std::int32_t) + sizeof(std::uint8_t) + sizeof(std::uint16_t) + sizeof(double);

  OrbitSample s;
  s.generators = m;
  std::vector<Eigen::MatrixXd> level;
  std::size_t level_start = 0;
  for (int len = 1; len <= spec.max_length; ++len) {
    const std::size_t parents = len == 1 ? 1 : level.size();
    const std::size_t branch = len == 1 ? 2 * m : 2 * m - 1;
    const std::size_t fresh = parents * branch;
    const std::size_t need =
        (s.size() + fresh) * entry_bytes + (level.size() + fresh) * matrix_bytes;
    if (need > spec.memory_budget || s.size() + fresh > static_cast<std::size_t>(INT32_MAX)) {
      s.truncated = true;
      break;
    }
    std::vector<Eigen::MatrixXd> next(fresh);
    std::vector<std::uint8_t> letters(fresh);
    std::vector<double> dist(fresh);
    parallel_chunks(parents, [&](std::size_t begin, std::size_t end) {
      for (std::size_t p = begin; p < end; ++p) {
        const int last = len == 1 ? -1 : s.letter[level_start + p];
        std::size_t slot = p * branch;
        for (int c = 0; c < 2 * m; ++c) {
          if (last >= 0 && c == inverse_letter(last, m)) continue;
          Eigen::MatrixXd w = len == 1 ? a[c] : Eigen::MatrixXd(level[p] * a[c]);
          if (len % kRenormalizeEvery == 0) w = renormalize_matrix(w);
          const Eigen::VectorXd wo = w * o;
          dist[slot] = distance_from(std::max(1.0, -minkowski(o, wo)), o - wo);
          letters[slot] = static_cast<std::uint8_t>(c);
          next[slot] = std::move(w);
          ++slot;
        }
      }
    });
    const std::size_t start = s.size();
    for (std::size_t i = 0; i < fresh; ++i) {
      s.parent.push_back(len == 1 ? -1 : static_cast<std::int32_t>(level_start + i / branch));
      s.letter.push_back(letters[i]);
      s.length.push_back(static_cast<std::uint16_t>(len));
      s.distance.push_back(dist[i]);
    }
    level_start = start;
    level.swap(next);
    s.complete_length = len;
  }
  return s;
}

double poincare_partial_sum(const OrbitSample& sample, double s, int max_length) {
  if (!(s >= 0.0)) throw InvalidArgument("poincare_partial_sum: exponent must be >= 0");
  std::vector<double> terms;
  terms.reserve(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i)
    if (max_length < 0 || sample.length[i] <= max_length) terms.push_back(std::exp(-s * sample.distance[i]));
  return pairwise_sum(terms);
}

namespace {

void require_orbit_size(const OrbitSample& sample) {
  if (sample.size() < kMinOrbitPoints) {
    std::ostringstream os;
    os << "critical_exponent_estimate: orbit has " << sample.size() << " points, need at least " << kMinOrbitPoints
       << "; raise max_length";
    throw PreconditionError(os.str());
  }
}

ExponentEstimate growth_fit(const OrbitSample& sample) {
  // Words longer than the enumeration bound start to be missed beyond the
  // nearest last-level word.
  double reach = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sample.size(); ++i)
    if (sample.length[i] == sample.complete_length) reach = std::min(reach, sample.distance[i]);
  const double lo = 0.5 * reach;
  constexpr int kRadii = 64;
  std::vector<double> radii(kRadii);
  for (int i = 0; i < kRadii; ++i) radii[i] = lo + (reach - lo) * i / (kRadii - 1);
  const std::vector<std::size_t> n = sample.counts(radii);
  std::vector<double> x, y;
  for (int i = 0; i < kRadii; ++i)
    if (n[i] > 0) {
      x.push_back(radii[i]);
      y.push_back(std::log(static_cast<double>(n[i])));
    }
  if (x.size() < 8) throw PreconditionError("critical_exponent_estimate: growth window too small; raise max_length");
  const LinearFit all = least_squares(x, y);
  const std::size_t h = x.size() / 2;
  const LinearFit first = least_squares({x.begin(), x.begin() + h}, {y.begin(), y.begin() + h});
  const LinearFit second = least_squares({x.begin() + h, x.end()}, {y.begin() + h, y.end()});
  ExponentEstimate e;
  e.value = std::max(0.0, all.slope);
  e.uncertainty = std::max(all.slope_error, 0.5 * std::abs(first.slope - second.slope));
  e.points = sample.size();
  return e;
}

// Root in s of S_k(s) = S_{k-1}(s) for the shell sums S_k of words of length k.
double knee(const std::vector<std::vector<double>>& shells, int k) {
  auto log_ratio = [&](double s) {
    auto lse = [s](const std::vector<double>& d) {
      double lo = std::numeric_limits<double>::infinity();
      for (double v : d) lo = std::min(lo, v);
      double acc = 0.0;
      for (double v : d) acc += std::exp(-s * (v - lo));
      return std::log(acc) - s * lo;
    };
    return lse(shells[k]) - lse(shells[k - 1]);
  };
  double a = 0.0, b = 1.0;
  if (log_ratio(a) <= 0.0) return 0.0;
  while (log_ratio(b) > 0.0) {
    a = b;
    b *= 2.0;
    if (b > 1e3) throw Error("critical_exponent_estimate: shell sums never decay");
  }
  for (int it = 0; it < 100 && b - a > 1e-13; ++it) {
    const double c = 0.5 * (a + b);
    (log_ratio(c) > 0.0 ? a : b) = c;
  }
  return 0.5 * (a + b);
}

ExponentEstimate series_knee(const OrbitSample& sample) {
  const int top = sample.complete_length;
  if (top < 3) throw PreconditionError("critical_exponent_estimate: series knee needs word length >= 3");
  std::vector<std::vector<double>> shells(top + 1);
  for (std::size_t i = 0; i < sample.size(); ++i) shells[sample.length[i]].push_back(sample.distance[i]);
  const double last = knee(shells, top);
  const double prev = knee(shells, top - 1);
  ExponentEstimate e;
  e.value = last;
  e.uncertainty = std::abs(last - prev);
  e.points = sample.size();
  return e;
}

}  // namespace

ExponentEstimate critical_exponent_estimate(const OrbitSample& sample, ExponentMethod method) {
  require_orbit_size(sample);
  return method == ExponentMethod::growth_fit ? growth_fit(sample) : series_knee(sample);
}

ExponentEstimate critical_exponent_estimate(const GroupSpec& spec, ExponentMethod method) {
  if (!spec.free)
    throw PreconditionError("critical_exponent_estimate: estimators assume a free group; set the free flag");
  const LimitSetSample probe = limit_set_sample(spec, 8, 64, 0);
  if (is_elementary(probe.points)) {
    ExponentEstimate e;
    e.elementary = true;
    return e;
  }
  return critical_exponent_estimate(orbit_enumerate(spec), method);
}

LimitSetSample limit_set_sample(const GroupSpec& spec, int word_length, int count, std::uint64_t seed) {
  if (!spec.free) throw PreconditionError("limit_set_sample: requires the free flag");
  validate_spec(spec);
  if (word_length < 1 || count < 1) throw InvalidArgument("limit_set_sample: word length and count must be positive");
  const int m = static_cast<int>(spec.generators.size());
  const std::vector<Eigen::MatrixXd> a = alphabet(spec);
  const Eigen::VectorXd o = basepoint_of(spec);
  // Words are drawn serially so the sample does not depend on the thread count.
  std::mt19937_64 rng(seed);
  std::vector<std::vector<int>> words(count, std::vector<int>(word_length));
  for (auto& w : words) {
    w[0] = std::uniform_int_distribution<int>(0, 2 * m - 1)(rng);
    for (int k = 1; k < word_length; ++k) {
      int c = std::uniform_int_distribution<int>(0, 2 * m - 2)(rng);
      if (c >= inverse_letter(w[k - 1], m)) ++c;
      w[k] = c;
    }
  }
  auto product = [&](const int* begin, const int* end) {
    Eigen::MatrixXd w = Eigen::MatrixXd::Identity(o.size(), o.size());
    for (const int* c = begin; c != end; ++c) {
      w = w * a[*c];
      if ((c - begin + 1) % kRenormalizeEvery == 0) w = renormalize_matrix(w);
    }
    return w;
  };
  std::vector<std::optional<Eigen::VectorXd>> found(count);
  parallel_chunks(count, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      // w = p u p^-1 with u cyclically reduced: the fixed point is p applied
      // to that of u, which avoids the rounding of the conjugated product.
      const std::vector<int>& w = words[i];
      int head = 0, tail = word_length;
      while (tail - head > 1 && w[head] == inverse_letter(w[tail - 1], m)) {
        ++head;
        --tail;
      }
      const auto inner = attracting_point(product(w.data() + head, w.data() + tail), o);
      if (!inner) continue;
      Eigen::VectorXd x(o.size());
      x << *inner, 1.0;
      x = product(w.data(), w.data() + head) * x;
      found[i] = null_to_boundary(x);
    }
  });
  LimitSetSample out;
  for (auto& p : found) {
    if (p)
      out.points.push_back(std::move(*p));
    else
      ++out.skipped;
  }
  return out;
}

int count_clusters(const std::vector<Eigen::VectorXd>& points, double radius) {
  std::vector<const Eigen::VectorXd*> centers;
  for (const auto& p : points) {
    bool placed = false;
    for (const auto* c : centers)
      if ((p - *c).norm() <= radius) {
        placed = true;
        break;
      }
    if (!placed) centers.push_back(&p);
  }
  return static_cast<int>(centers.size());
}

bool is_elementary(const std::vector<Eigen::VectorXd>& points) {
  return count_clusters(points, kElementaryClusterRadius) <= 2;
}

std::vector<double> scale_ladder(double largest, double ratio, int count) {
  if (!(largest > 0.0) || !(ratio > 0.0 && ratio < 1.0) || count < 1)
    throw InvalidArgument("scale_ladder: need largest > 0, 0 < ratio < 1, count >= 1");
  std::vector<double> s(count);
  for (int i = 0; i < count; ++i) s[i] = largest * std::pow(ratio, i);
  return s;
}

DimensionEstimate box_dimension(const std::vector<Eigen::VectorXd>& points, const std::vector<double>& scales) {
  if (points.size() < kMinBoxPoints) throw PreconditionError("box_dimension: need at least 1000 points");
  if (scales.size() < 4) throw InvalidArgument("box_dimension: degenerate ladder, need at least 4 scales");
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (!(scales[i] > 0.0) || !std::isfinite(scales[i])) throw InvalidArgument("box_dimension: degenerate ladder, scales must be positive");
    if (i > 0) {
      const double r = scales[i] / scales[i - 1], r0 = scales[1] / scales[0];
      if (!(r < 1.0) || std::abs(r - r0) > 1e-9 * r0)
        throw InvalidArgument("box_dimension: degenerate ladder, scales must decrease geometrically");
    }
  }
  DimensionEstimate d;
  d.scales = scales;
  std::vector<double> x, y;
  for (double s : scales) {
    const double n = static_cast<double>(occupied_boxes(points, s));
    d.counts.push_back(n);
    x.push_back(-std::log(s));
    y.push_back(std::log(n));
  }
  const LinearFit f = least_squares(x, y);
  const std::size_t h = (x.size() + 1) / 2;
  const LinearFit coarse = least_squares({x.begin(), x.begin() + h}, {y.begin(), y.begin() + h});
  const LinearFit fine = least_squares({x.end() - h, x.end()}, {y.end() - h, y.end()});
  d.value = f.slope;
  d.fit_error = std::max(f.slope_error, 0.5 * std::abs(coarse.slope - fine.slope));
  return d;
}

std::vector<double> automatic_ladder(const std::vector<Eigen::VectorXd>& points, int count) {
  if (points.size() < kMinBoxPoints) throw PreconditionError("automatic_ladder: need at least 1000 points");
  if (count < 4) throw InvalidArgument("automatic_ladder: need at least 4 scales");
  const double total = static_cast<double>(points.size());
  double coarse = 0.0, fine = 0.0;
  for (double s = 1.0; s > 1e-300; s *= 0.5) {
    const double n = static_cast<double>(occupied_boxes(points, s));
    if (coarse == 0.0 && n >= 16.0) coarse = s;
    if (n >= total / 8.0) {
      fine = s;
      break;
    }
  }
  if (coarse == 0.0 || fine == 0.0 || coarse / fine < 4.0)
    throw PreconditionError("automatic_ladder: point cloud does not resolve enough scales");
  return scale_ladder(coarse, std::pow(fine / coarse, 1.0 / (count - 1)), count);
}

}  // namespace curvkit
