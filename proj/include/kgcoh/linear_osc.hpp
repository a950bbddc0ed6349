#pragma once

// Linear scalar potential S(x) = k|x| - m.
//
// (m + S)^2 = k^2 x^2, so H_s is a harmonic oscillator with m*omega = k and the
// relativistic levels are E_n = sqrt((2n + 1) k). Coherent states are built in
// the positive-energy sector from the oscillator lowering operator and then
// evolved with the (non-equally spaced) relativistic phases.

#include <span>
#include <vector>

#include "kgcoh/numerics.hpp"

namespace kgcoh::linear {

struct LinearModel {
  double m = 1.0;
  double k = 1.0;

  /// Throws ArgumentError unless m > 0 and k > 0.
  static LinearModel make(double m, double k);
  double omega() const { return k / m; }
};

struct CoherentSpec {
  complex alpha{0.0, 0.0};
  int truncation = 50;

  /// Throws ArgumentError unless truncation >= 1 and alpha is finite.
  void validate() const;
};

struct Moments {
  double mean_x = 0.0;
  double mean_p = 0.0;
  double mean_x2 = 0.0;
  double mean_p2 = 0.0;
};

struct Uncertainty {
  double dx = 0.0;
  double dp = 0.0;
  double product = 0.0;
};

struct TimeSample {
  double t = 0.0;
  double mean_x = 0.0;
  double mean_p = 0.0;
  double var_x = 0.0;
  double var_p = 0.0;
  double dx = 0.0;
  double dp = 0.0;
  double product = 0.0;
};

struct TimeSeries {
  std::vector<TimeSample> samples;
};

/// Variances down to -kVarianceTolerance are treated as round-off and clamped.
inline constexpr double kVarianceTolerance = 1e-10;

/// E_n = sqrt((2n+1) k), positive branch.
double energy(const LinearModel& model, int n);

/// epsilon_n = E_n^2 / (2m) = (n + 1/2) omega.
double schrodinger_eigenvalue(const LinearModel& model, int n);

/// Unit-normalized u_n(x) = (k/pi)^{1/4} (2^n n!)^{-1/2} e^{-k x^2/2} H_n(sqrt(k) x).
double eigenfunction(const LinearModel& model, int n, double x);

/// u_0(x) .. u_{n_max}(x) through the normalized Hermite-function recursion.
void eigenfunctions(const LinearModel& model, int n_max, double x, std::span<double> out);

/// c_n = e^{-|alpha|^2/2} alpha^n / sqrt(n!), n = 0..N, in log space.
std::vector<complex> coherent_coefficients(const CoherentSpec& spec);

/// Closed-form expectation-value series for <x>, <p>, <x^2>, <p^2>.
Moments expectation_series(const LinearModel& model, const CoherentSpec& spec, double t);

/// Delta x, Delta p and their product from a set of moments. Throws
/// NumericalConsistencyError for variances below -kVarianceTolerance.
Uncertainty uncertainty_from_moments(const Moments& moments);

Uncertainty uncertainties(const LinearModel& model, const CoherentSpec& spec, double t);

/// Evaluates the series on every time in `times` (strictly increasing).
/// Samples are computed in parallel; output order matches `times`.
TimeSeries time_series(const LinearModel& model, const CoherentSpec& spec,
                       std::span<const double> times);

/// One sample of time_series; shared by the parallel and serial drivers.
TimeSample time_sample(const LinearModel& model, const CoherentSpec& spec, double t);

/// t0, t0 + dt, ..., up to t1 (inclusive when t1 lies on the lattice).
std::vector<double> uniform_times(double t0, double t1, double dt);

/// Throws ArgumentError unless `times` is non-empty, finite and strictly increasing.
void validate_times(std::span<const double> times);

}  // namespace kgcoh::linear
