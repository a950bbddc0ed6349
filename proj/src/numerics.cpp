#include "kgcoh/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <stdexcept>
#include <string>

#include "kgcoh/errors.hpp"

namespace kgcoh {

Grid::Grid(double x_min, double x_max, std::size_t count)
    : x_min_(x_min), x_max_(x_max), count_(count) {
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_min < x_max)) {
    throw ArgumentError("grid requires finite x_min < x_max");
  }
  if (count < 3) throw ArgumentError("grid requires at least 3 points");
}

double Grid::at(std::size_t i) const {
  if (i + 1 == count_) return x_max_;
  return x_min_ + static_cast<double>(i) * step();
}

Grid Grid::coarsened() const {
  if (count_ % 2 == 0 || count_ < 5) {
    throw ArgumentError("coarsening needs an odd point count >= 5");
  }
  return Grid(x_min_, x_max_, (count_ - 1) / 2 + 1);
}

void TridiagonalMatrix::validate() const {
  if (diag.empty()) throw ArgumentError("empty tridiagonal matrix");
  if (offdiag.size() + 1 != diag.size()) {
    throw ArgumentError("offdiag length must be diag length - 1");
  }
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(diag.begin(), diag.end(), finite) ||
      !std::all_of(offdiag.begin(), offdiag.end(), finite)) {
    throw ArgumentError("tridiagonal matrix has non-finite entries");
  }
}

// ---------------------------------------------------------------------------
// Special functions

namespace {

// B_{2k} / (2k (2k-1)), k = 1..8
constexpr std::array<double, 8> kStirling = {
    1.0 / 12.0,          -1.0 / 360.0,     1.0 / 1260.0,  -1.0 / 1680.0,
    1.0 / 1188.0,        -691.0 / 360360.0, 1.0 / 156.0,  -3617.0 / 122400.0};

double stirling_log_gamma(double z) {
  const double inv = 1.0 / z;
  const double inv2 = inv * inv;
  double tail = 0.0;
  for (auto it = kStirling.rbegin(); it != kStirling.rend(); ++it) {
    tail = tail * inv2 + *it;
  }
  tail *= inv;
  return (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * std::numbers::pi) + tail;
}

}  // namespace

double log_gamma(double x) {
  if (!std::isfinite(x) || x <= 0.0) {
    throw DomainError("log_gamma: argument must be finite and positive");
  }
  constexpr double kShift = 15.0;
  if (x >= kShift) return stirling_log_gamma(x);
  double product = 1.0;
  double z = x;
  while (z < kShift) {
    product *= z;
    z += 1.0;
  }
  return stirling_log_gamma(z) - std::log(product);
}

double hermite_h(int n, double x) {
  if (n < 0) throw DomainError("hermite_h: order must be non-negative");
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = 2.0 * x;
  for (int k = 1; k < n; ++k) {
    const double next = 2.0 * x * cur - 2.0 * k * prev;
    prev = cur;
    cur = next;
  }
  if (!std::isfinite(cur)) {
    throw std::overflow_error("hermite_h: H_" + std::to_string(n) + " overflows");
  }
  return cur;
}

double gegenbauer_c(int n, double lambda, double t) {
  if (n < 0) throw DomainError("gegenbauer_c: order must be non-negative");
  if (!(lambda > 0.0)) throw DomainError("gegenbauer_c: lambda must be positive");
  if (!(std::abs(t) <= 1.0)) throw DomainError("gegenbauer_c: |t| must be <= 1");
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = 2.0 * lambda * t;
  for (int k = 2; k <= n; ++k) {
    const double next =
        (2.0 * (k + lambda - 1.0) * t * cur - (k + 2.0 * lambda - 2.0) * prev) / k;
    prev = cur;
    cur = next;
  }
  return cur;
}

namespace {

double log_cosh(double y) {
  y = std::abs(y);
  return y + std::log1p(std::exp(-2.0 * y)) - std::numbers::ln2;
}

}  // namespace

double bessel_k(double nu, double z) {
  if (!std::isfinite(z) || z <= 0.0) throw DomainError("bessel_k: z must be positive");
  if (!std::isfinite(nu) || nu < 0.0) throw DomainError("bessel_k: nu must be >= 0");

  auto log_integrand = [nu, z](double s) { return -z * std::cosh(s) + log_cosh(nu * s); };

  // The integrand peaks near z sinh(s) = nu; scale by its value there.
  const double s_peak = nu > 0.0 ? std::asinh(nu / z) : 0.0;
  const double log_ref = std::max(log_integrand(0.0), log_integrand(s_peak));

  // Extend until the integrand is e^-60 below the reference.
  double upper = s_peak + 1.0;
  while (log_integrand(upper) - log_ref > -60.0) upper += 1.0;

  auto scaled = [&](double s) { return std::exp(log_integrand(s) - log_ref); };
  QuadratureResult left{}, right{};
  if (s_peak > 0.0) left = integrate_adaptive(scaled, 0.0, s_peak, 1e-14, 0.0, 4000);
  right = integrate_adaptive(scaled, s_peak, upper, 1e-14, 0.0, 4000);
  return (left.value + right.value) * std::exp(log_ref);
}

// ---------------------------------------------------------------------------
// Summation and quadrature

void CompensatedSum::add(double term) {
  const double t = sum_ + term;
  if (std::abs(sum_) >= std::abs(term)) {
    correction_ += (sum_ - t) + term;
  } else {
    correction_ += (term - t) + sum_;
  }
  sum_ = t;
}

double compensated_sum(std::span<const double> terms) {
  CompensatedSum acc;
  for (double v : terms) {
    if (!std::isfinite(v)) throw DomainError("compensated_sum: non-finite term");
    acc.add(v);
  }
  return acc.value();
}

namespace {

template <typename T>
T simpson_impl(std::span<const T> f, double h) {
  const std::size_t n = f.size();
  if (n < 3) throw ArgumentError("simpson: need at least 3 samples");
  // Simpson needs an even number of intervals; close an odd count with 3/8.
  const std::size_t simpson_end = (n % 2 == 1) ? n : n - 3;
  T acc{};
  if (simpson_end >= 3) {
    T odd{}, even{};
    for (std::size_t i = 1; i + 1 < simpson_end; i += 2) odd += f[i];
    for (std::size_t i = 2; i + 1 < simpson_end; i += 2) even += f[i];
    acc = (f[0] + f[simpson_end - 1] + 4.0 * odd + 2.0 * even) * (h / 3.0);
  }
  if (simpson_end != n) {
    const std::size_t j = n - 4;
    acc += (f[j] + 3.0 * f[j + 1] + 3.0 * f[j + 2] + f[j + 3]) * (3.0 * h / 8.0);
  }
  return acc;
}

}  // namespace

complex simpson(std::span<const complex> samples, double h) {
  return simpson_impl<complex>(samples, h);
}

double simpson(std::span<const double> samples, double h) {
  return simpson_impl<double>(samples, h);
}

complex quadrature(const GridFunction& f) {
  if (f.values.size() != f.grid.count()) {
    throw ArgumentError("quadrature: sample count does not match grid");
  }
  return simpson(std::span<const complex>(f.values), f.grid.step());
}

namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

Segment gauss_kronrod(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += kWgk[j] * pair;
    if (j % 2 == 1) gauss += kWg[j / 2] * pair;
  }
  kronrod *= half;
  gauss *= half;
  return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a,
                                    double b, double rel_tol, double abs_tol,
                                    int max_intervals) {
  if (!(a < b)) {
    if (a == b) return {0.0, 0.0, true};
    throw ArgumentError("integrate_adaptive: need a < b");
  }
  std::priority_queue<Segment> heap;
  Segment first = gauss_kronrod(f, a, b);
  heap.push(first);
  double total = first.value;
  double error = first.error;
  int intervals = 1;
  while (error > std::max(abs_tol, rel_tol * std::abs(total))) {
    if (intervals >= max_intervals) return {total, error, false};
    const Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {  // interval cannot be split further
      heap.push(worst);
      return {total, error, false};
    }
    Segment lo = gauss_kronrod(f, worst.a, mid);
    Segment hi = gauss_kronrod(f, mid, worst.b);
    total += lo.value + hi.value - worst.value;
    error += lo.error + hi.error - worst.error;
    heap.push(lo);
    heap.push(hi);
    ++intervals;
  }
  // Re-add from the pieces to shed the drift of the running updates.
  CompensatedSum sum;
  CompensatedSum err;
  while (!heap.empty()) {
    sum.add(heap.top().value);
    err.add(heap.top().error);
    heap.pop();
  }
  return {sum.value(), err.value(), true};
}

// ---------------------------------------------------------------------------
// Tridiagonal eigenvalues

std::size_t sturm_count(const TridiagonalMatrix& m, double x) {
  const std::size_t n = m.size();
  double max_off2 = 1.0;
  for (double e : m.offdiag) max_off2 = std::max(max_off2, e * e);
  const double pivmin = std::numeric_limits<double>::min() * max_off2;

  std::size_t count = 0;
  double q = m.diag[0] - x;
  if (std::abs(q) < pivmin) q = -pivmin;
  if (q < 0.0) ++count;
  for (std::size_t i = 1; i < n; ++i) {
    const double e = m.offdiag[i - 1];
    q = m.diag[i] - x - e * e / q;
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0.0) ++count;
  }
  return count;
}

std::pair<double, double> gershgorin_bounds(const TridiagonalMatrix& m) {
  const std::size_t n = m.size();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < n; ++i) {
    double radius = 0.0;
    if (i > 0) radius += std::abs(m.offdiag[i - 1]);
    if (i + 1 < n) radius += std::abs(m.offdiag[i]);
    lo = std::min(lo, m.diag[i] - radius);
    hi = std::max(hi, m.diag[i] + radius);
  }
  const double pad = 1e-12 * std::max({1.0, std::abs(lo), std::abs(hi)});
  return {lo - pad, hi + pad};
}

double bisect_eigenvalue(const TridiagonalMatrix& m, std::size_t index,
                         double resolution) {
  if (index >= m.size()) throw ArgumentError("eigenvalue index exceeds dimension");
  auto [lo, hi] = gershgorin_bounds(m);
  // Invariant: sturm_count(lo) <= index < sturm_count(hi).
  while (hi - lo > resolution) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (sturm_count(m, mid) <= index) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<double> tridiag_smallest_eigenvalues(const TridiagonalMatrix& m,
                                                 std::size_t count,
                                                 double resolution) {
  m.validate();
  if (count == 0 || count > m.size()) {
    throw ArgumentError("requested eigenvalue count exceeds matrix dimension");
  }
  std::vector<double> values(count);
  const auto n = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    values[static_cast<std::size_t>(k)] =
        bisect_eigenvalue(m, static_cast<std::size_t>(k), resolution);
  }
  return values;
}

}  // namespace kgcoh
