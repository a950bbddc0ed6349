#pragma once

// Special functions and numerical kernels shared by the model modules.
//
// Everything here is a pure function of its arguments. The heavier kernels
// (eigenvalue bisection) parallelize with OpenMP; serial references live in
// kgcoh/serial.hpp.

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace kgcoh {

using complex = std::complex<double>;

/// Uniform grid x_i = x_min + i*h, i = 0..count-1, endpoints included.
class Grid {
 public:
  Grid(double x_min, double x_max, std::size_t count);

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  std::size_t count() const { return count_; }
  double step() const { return (x_max_ - x_min_) / static_cast<double>(count_ - 1); }
  double at(std::size_t i) const;

  /// Same interval with twice the number of intervals.
  Grid refined() const { return Grid(x_min_, x_max_, 2 * count_ - 1); }
  /// Same interval with half the number of intervals (count must be odd).
  Grid coarsened() const;

 private:
  double x_min_;
  double x_max_;
  std::size_t count_;
};

/// Symmetric tridiagonal matrix stored by diagonals.
struct TridiagonalMatrix {
  std::vector<double> diag;
  std::vector<double> offdiag;

  std::size_t size() const { return diag.size(); }
  /// Throws ArgumentError on inconsistent lengths or non-finite entries.
  void validate() const;
};

/// Complex samples on a Grid.
struct GridFunction {
  Grid grid;
  std::vector<complex> values;
};

/// ln Gamma(x) for x > 0. Stirling series with upward shift below x = 15.
double log_gamma(double x);

/// Physicists' Hermite polynomial H_n(x) by three-term recursion.
/// Throws std::overflow_error when the value leaves the double range.
double hermite_h(int n, double x);

/// Gegenbauer polynomial C_n^lambda(t), lambda > 0, |t| <= 1.
double gegenbauer_c(int n, double lambda, double t);

/// Modified Bessel function of the second kind K_nu(z), nu >= 0, z > 0,
/// from K_nu(z) = int_0^inf exp(-z cosh s) cosh(nu s) ds.
double bessel_k(double nu, double z);

/// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double term);
  CompensatedSum& operator+=(double term) {
    add(term);
    return *this;
  }
  double value() const { return sum_ + correction_; }

 private:
  double sum_ = 0.0;
  double correction_ = 0.0;
};

/// Compensated sum of finite terms; a non-finite term raises DomainError.
double compensated_sum(std::span<const double> terms);

/// Composite Simpson rule on uniform samples. With an even sample count the
/// last three intervals use Simpson's 3/8 rule. Requires at least 3 samples.
complex simpson(std::span<const complex> samples, double h);
double simpson(std::span<const double> samples, double h);

/// Integral of a GridFunction over its grid.
complex quadrature(const GridFunction& f);

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  bool converged = false;
};

/// Adaptive Gauss-Kronrod (7/15) quadrature of f on [a, b].
/// Stops when the summed error estimate is below max(abs_tol, rel_tol*|I|).
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a,
                                    double b, double rel_tol = 1e-12,
                                    double abs_tol = 0.0, int max_intervals = 2000);

/// Number of eigenvalues of M strictly below x (Sturm sequence count).
std::size_t sturm_count(const TridiagonalMatrix& m, double x);

/// Gershgorin interval [lo, hi] containing the whole spectrum of M.
std::pair<double, double> gershgorin_bounds(const TridiagonalMatrix& m);

/// Bisection for the eigenvalue with 0-based index `index` (ascending);
/// stops when the bracket is narrower than `resolution`.
double bisect_eigenvalue(const TridiagonalMatrix& m, std::size_t index,
                         double resolution = 1e-10);

/// The `count` smallest eigenvalues in ascending order. OpenMP over indices.
std::vector<double> tridiag_smallest_eigenvalues(const TridiagonalMatrix& m,
                                                 std::size_t count,
                                                 double resolution = 1e-10);

}  // namespace kgcoh
