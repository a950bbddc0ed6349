#include "kgcoh/linear_osc.hpp"

#include <cmath>
#include <exception>
#include <numbers>

#include "kgcoh/errors.hpp"

namespace kgcoh::linear {

LinearModel LinearModel::make(double m, double k) {
  if (!std::isfinite(m) || m <= 0.0) throw ArgumentError("mass must be positive");
  if (!std::isfinite(k) || k <= 0.0) throw ArgumentError("coupling must be positive");
  return LinearModel{m, k};
}

void CoherentSpec::validate() const {
  if (truncation < 1) throw ArgumentError("truncation must be >= 1");
  if (!std::isfinite(std::norm(alpha))) throw ArgumentError("alpha must be finite");
}

double energy(const LinearModel& model, int n) {
  if (n < 0) throw ArgumentError("level index must be non-negative");
  return std::sqrt((2.0 * n + 1.0) * model.k);
}

double schrodinger_eigenvalue(const LinearModel& model, int n) {
  if (n < 0) throw ArgumentError("level index must be non-negative");
  return (2.0 * n + 1.0) * model.k / (2.0 * model.m);
}

void eigenfunctions(const LinearModel& model, int n_max, double x, std::span<double> out) {
  if (n_max < 0) throw ArgumentError("level index must be non-negative");
  if (out.size() < static_cast<std::size_t>(n_max) + 1) {
    throw ArgumentError("eigenfunctions: output span too short");
  }
  // psi_{n+1} = sqrt(2/(n+1)) xi psi_n - sqrt(n/(n+1)) psi_{n-1}, xi = sqrt(k) x
  const double xi = std::sqrt(model.k) * x;
  const double scale = std::pow(model.k / std::numbers::pi, 0.25);
  out[0] = scale * std::exp(-0.5 * xi * xi);
  if (n_max == 0) return;
  out[1] = std::numbers::sqrt2 * xi * out[0];
  for (int n = 1; n < n_max; ++n) {
    out[n + 1] = std::sqrt(2.0 / (n + 1.0)) * xi * out[n] -
                 std::sqrt(static_cast<double>(n) / (n + 1.0)) * out[n - 1];
  }
}

double eigenfunction(const LinearModel& model, int n, double x) {
  std::vector<double> values(static_cast<std::size_t>(std::max(n, 0)) + 1);
  eigenfunctions(model, n, x, values);
  return values[static_cast<std::size_t>(n)];
}

std::vector<complex> coherent_coefficients(const CoherentSpec& spec) {
  spec.validate();
  std::vector<complex> c(static_cast<std::size_t>(spec.truncation) + 1, complex{});
  const double r2 = std::norm(spec.alpha);
  if (r2 == 0.0) {
    c[0] = 1.0;
    return c;
  }
  const double log_r = 0.5 * std::log(r2);
  const double phase = std::arg(spec.alpha);
  for (int n = 0; n <= spec.truncation; ++n) {
    const double log_mag = -0.5 * r2 + n * log_r - 0.5 * log_gamma(n + 1.0);
    c[static_cast<std::size_t>(n)] = std::polar(std::exp(log_mag), n * phase);
  }
  return c;
}

Moments expectation_series(const LinearModel& model, const CoherentSpec& spec, double t) {
  spec.validate();
  if (!std::isfinite(t)) throw ArgumentError("time must be finite");
  const double a = spec.alpha.real();
  const double b = spec.alpha.imag();
  const double r2 = std::norm(spec.alpha);
  const double k = model.k;

  // Sums over e^{-|alpha|^2} |alpha|^{2n}/n! weighted by the phase factors.
  CompensatedSum first;
  CompensatedSum first_conj;
  CompensatedSum second;
  if (r2 > 0.0) {
    const double log_r2 = std::log(r2);
    for (int n = 0; n <= spec.truncation; ++n) {
      const double weight = std::exp(-r2 + n * log_r2 - log_gamma(n + 1.0));
      const double e0 = energy(model, n);
      const double phase1 = (e0 - energy(model, n + 1)) * t;
      const double phase2 = (e0 - energy(model, n + 2)) * t;
      const double c1 = std::cos(phase1), s1 = std::sin(phase1);
      const double c2 = std::cos(phase2), s2 = std::sin(phase2);
      first.add((a * c1 - b * s1) * weight);
      first_conj.add((a * s1 + b * c1) * weight);
      second.add(((a * a - b * b) * c2 - 2.0 * a * b * s2) * weight);
    }
  }

  Moments out;
  out.mean_x = std::sqrt(2.0 / k) * first.value();
  out.mean_p = std::sqrt(2.0 * k) * first_conj.value();
  out.mean_x2 = (r2 + 0.5) / k + second.value() / k;
  out.mean_p2 = k * (r2 + 0.5) - k * second.value();
  return out;
}

Uncertainty uncertainty_from_moments(const Moments& mo) {
  const double var_x = mo.mean_x2 - mo.mean_x * mo.mean_x;
  const double var_p = mo.mean_p2 - mo.mean_p * mo.mean_p;
  if (var_x < -kVarianceTolerance || var_p < -kVarianceTolerance) {
    throw NumericalConsistencyError("negative variance beyond round-off tolerance");
  }
  Uncertainty u;
  u.dx = std::sqrt(std::max(var_x, 0.0));
  u.dp = std::sqrt(std::max(var_p, 0.0));
  u.product = u.dx * u.dp;
  return u;
}

Uncertainty uncertainties(const LinearModel& model, const CoherentSpec& spec, double t) {
  return uncertainty_from_moments(expectation_series(model, spec, t));
}

TimeSample time_sample(const LinearModel& model, const CoherentSpec& spec, double t) {
  const Moments mo = expectation_series(model, spec, t);
  const Uncertainty u = uncertainty_from_moments(mo);
  TimeSample s;
  s.t = t;
  s.mean_x = mo.mean_x;
  s.mean_p = mo.mean_p;
  s.var_x = u.dx * u.dx;
  s.var_p = u.dp * u.dp;
  s.dx = u.dx;
  s.dp = u.dp;
  s.product = u.product;
  return s;
}

void validate_times(std::span<const double> times) {
  if (times.empty()) throw ArgumentError("time grid must be non-empty");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i])) throw ArgumentError("time grid must be finite");
    if (i > 0 && !(times[i] > times[i - 1])) {
      throw ArgumentError("time grid must be strictly increasing");
    }
  }
}

TimeSeries time_series(const LinearModel& model, const CoherentSpec& spec,
                       std::span<const double> times) {
  spec.validate();
  validate_times(times);
  TimeSeries series;
  series.samples.resize(times.size());
  const auto n = static_cast<std::ptrdiff_t>(times.size());
  // Exceptions may not cross the parallel region; rethrow the first afterwards.
  std::exception_ptr failure;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      series.samples[static_cast<std::size_t>(i)] =
          time_sample(model, spec, times[static_cast<std::size_t>(i)]);
    } catch (...) {
#pragma omp critical(kgcoh_time_series_error)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return series;
}

std::vector<double> uniform_times(double t0, double t1, double dt) {
  if (!std::isfinite(t0) || !std::isfinite(t1) || !(t0 < t1)) {
    throw ArgumentError("time range requires t0 < t1");
  }
  if (!std::isfinite(dt) || dt <= 0.0) throw ArgumentError("time step must be positive");
  const auto steps = static_cast<std::size_t>(std::floor((t1 - t0) / dt + 1e-9));
  std::vector<double> times(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) times[i] = t0 + static_cast<double>(i) * dt;
  return times;
}

}  // namespace kgcoh::linear
