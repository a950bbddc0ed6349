#include "kgcoh/poschl_teller.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>

#include "kgcoh/errors.hpp"

namespace kgcoh::pt {

double lambda_of(double m, double omega) {
  if (!(m > 0.0) || !(omega > 0.0)) throw ArgumentError("m and omega must be positive");
  const double ratio = m / omega;
  return 0.5 + 0.5 * std::sqrt(4.0 * ratio * ratio + 1.0);
}

PTModel PTModel::make(double m, double omega, SignBranch branch) {
  if (!std::isfinite(m) || m <= 0.0) throw ArgumentError("mass must be positive");
  if (!std::isfinite(omega) || omega <= 0.0) {
    throw ArgumentError("frequency must be positive");
  }
  PTModel model;
  model.m = m;
  model.omega = omega;
  model.lambda = lambda_of(m, omega);
  model.half_width = std::numbers::pi / (2.0 * omega);
  model.branch = branch;
  return model;
}

double energy(const PTModel& model, int n) {
  if (n < 0) throw ArgumentError("level index must be non-negative");
  return model.omega * (n + model.lambda);
}

double schrodinger_eigenvalue(const PTModel& model, int n) {
  const double e = energy(model, n);
  return e * e / (2.0 * model.m);
}

double scalar_potential(const PTModel& model, double x) {
  const double sec = 1.0 / std::cos(model.omega * x);
  return model.branch == SignBranch::Plus ? -model.m + model.m * sec
                                          : -model.m - model.m * sec;
}

double log_eigenfunction_norm(const PTModel& model, int n) {
  const double lam = model.lambda;
  return 0.5 * (std::log(model.omega) + log_gamma(n + 1.0) + std::log(n + lam) +
                2.0 * log_gamma(lam) - std::log(std::numbers::pi) -
                (1.0 - 2.0 * lam) * std::numbers::ln2 - log_gamma(n + 2.0 * lam));
}

void eigenfunctions(const PTModel& model, int n_max, double x, std::span<double> out) {
  if (n_max < 0) throw ArgumentError("level index must be non-negative");
  if (out.size() < static_cast<std::size_t>(n_max) + 1) {
    throw ArgumentError("eigenfunctions: output span too short");
  }
  if (std::abs(x) >= model.half_width) {
    std::fill(out.begin(), out.begin() + n_max + 1, 0.0);
    return;
  }
  const double lam = model.lambda;
  const double t = std::clamp(std::sin(model.omega * x), -1.0, 1.0);
  const double envelope = std::pow(std::max(std::cos(model.omega * x), 0.0), lam);

  // Gegenbauer recursion fused with the norm ratio
  // N_n^2 / N_{n-1}^2 = n (n + lambda) / ((n - 1 + lambda)(n - 1 + 2 lambda)).
  double norm = std::exp(log_eigenfunction_norm(model, 0));
  double prev = 1.0;
  double cur = 2.0 * lam * t;
  out[0] = norm * envelope;
  for (int n = 1; n <= n_max; ++n) {
    if (n >= 2) {
      const double next =
          (2.0 * (n + lam - 1.0) * t * cur - (n + 2.0 * lam - 2.0) * prev) / n;
      prev = cur;
      cur = next;
    }
    norm *= std::sqrt(n * (n + lam) / ((n - 1.0 + lam) * (n - 1.0 + 2.0 * lam)));
    out[n] = norm * envelope * cur;
  }
}

double eigenfunction(const PTModel& model, int n, double x) {
  if (n < 0) throw ArgumentError("level index must be non-negative");
  if (std::abs(x) >= model.half_width) return 0.0;
  const double envelope =
      std::pow(std::max(std::cos(model.omega * x), 0.0), model.lambda);
  const double t = std::clamp(std::sin(model.omega * x), -1.0, 1.0);
  return std::exp(log_eigenfunction_norm(model, n)) * envelope *
         gegenbauer_c(n, model.lambda, t);
}

double ladder_coeff(int n, double lambda) {
  if (n < 0) throw ArgumentError("ladder index must be non-negative");
  return std::sqrt((n + 1.0) * (2.0 * lambda + n) / ((n + lambda) * (n + 1.0 + lambda)));
}

std::vector<complex> apply_annihilation(const PTModel& model, std::span<const complex> c) {
  std::vector<complex> out(c.size(), complex{});
  for (std::size_t n = 0; n + 1 < c.size(); ++n) {
    const int ni = static_cast<int>(n);
    out[n] = c[n + 1] * ((ni + 1.0 + model.lambda) * ladder_coeff(ni, model.lambda));
  }
  return out;
}

namespace {

// ln of |alpha|^{2n} / (n! (n + lambda) Gamma(2 lambda + n)), the S(alpha) terms.
double log_s_term(double lambda, double log_r2, int n) {
  const double power = n == 0 ? 0.0 : n * log_r2;
  return power - log_gamma(n + 1.0) - std::log(n + lambda) - log_gamma(2.0 * lambda + n);
}

}  // namespace

PTCoherentState coherent_coefficients(const PTModel& model, complex alpha, int truncation) {
  if (truncation < 1) throw ArgumentError("truncation must be >= 1");
  if (!std::isfinite(std::norm(alpha))) throw ArgumentError("alpha must be finite");
  const double lam = model.lambda;
  const double log_prefactor = std::log(lam) + log_gamma(2.0 * lam);

  PTCoherentState state;
  state.alpha = alpha;
  state.truncation = truncation;
  state.coefficients.assign(static_cast<std::size_t>(truncation) + 1, complex{});

  const double r2 = std::norm(alpha);
  if (r2 == 0.0) {
    state.coefficients[0] = 1.0;
    state.log_s_alpha = log_s_term(lam, 0.0, 0);
  } else {
    const double log_r2 = std::log(r2);
    std::vector<double> terms(state.coefficients.size());
    for (int n = 0; n <= truncation; ++n) terms[static_cast<std::size_t>(n)] = log_s_term(lam, log_r2, n);
    const double peak = *std::max_element(terms.begin(), terms.end());
    CompensatedSum scaled;
    for (double v : terms) scaled.add(std::exp(v - peak));
    state.log_s_alpha = peak + std::log(scaled.value());
    const double phase = std::arg(alpha);
    // |c_n|^2 = lambda Gamma(2 lambda) N_alpha^2 S_n = S_n / S(alpha)
    for (int n = 0; n <= truncation; ++n) {
      const double log_mag = 0.5 * (terms[static_cast<std::size_t>(n)] - state.log_s_alpha);
      state.coefficients[static_cast<std::size_t>(n)] = std::polar(std::exp(log_mag), n * phase);
    }
  }
  state.s_alpha = std::exp(state.log_s_alpha);
  state.n_alpha = std::exp(-0.5 * (log_prefactor + state.log_s_alpha));
  return state;
}

std::vector<complex> recursion_coefficients(const PTModel& model, complex alpha,
                                            int truncation) {
  const PTCoherentState closed = coherent_coefficients(model, alpha, truncation);
  const double lam = model.lambda;
  std::vector<complex> c(closed.coefficients.size());
  c[0] = closed.coefficients[0];
  for (int n = 0; n < truncation; ++n) {
    const double ratio = std::sqrt((n + lam) / ((n + 1.0) * (2.0 * lam + n) * (n + 1.0 + lam)));
    c[static_cast<std::size_t>(n) + 1] = alpha * ratio * c[static_cast<std::size_t>(n)];
  }
  return c;
}

double truncation_tail(const PTModel& model, complex alpha, int truncation) {
  const double r2 = std::norm(alpha);
  if (r2 == 0.0) return 0.0;
  const PTCoherentState state = coherent_coefficients(model, alpha, truncation);
  const double lam = model.lambda;
  const double log_r2 = std::log(r2);
  // Residual of the cut basis: |alpha| |c_N|.
  const double cut = std::sqrt(r2) * std::exp(0.5 * (log_s_term(lam, log_r2, truncation) -
                                                     state.log_s_alpha));
  // Remainder of S(alpha) past N as a geometric series; the term ratio
  // |alpha|^2 (n+lambda) / ((n+1)(n+1+lambda)(2 lambda+n)) decreases in n.
  const int n1 = truncation + 1;
  const double q = r2 * (n1 + lam) / ((n1 + 1.0) * (n1 + 1.0 + lam) * (2.0 * lam + n1));
  double remainder = std::numeric_limits<double>::infinity();
  if (q < 1.0) {
    remainder = std::exp(log_s_term(lam, log_r2, n1) - state.log_s_alpha) / (1.0 - q);
  }
  return std::max(cut, remainder);
}

std::vector<complex> evolve(const PTModel& model, const PTCoherentState& state, double t) {
  if (!std::isfinite(t)) throw ArgumentError("time must be finite");
  std::vector<complex> out(state.coefficients.size());
  for (std::size_t n = 0; n < out.size(); ++n) {
    out[n] = state.coefficients[n] * std::polar(1.0, -energy(model, static_cast<int>(n)) * t);
  }
  return out;
}

double phase_coherence_check(const PTModel& model, complex alpha, int truncation, double t) {
  const PTCoherentState state = coherent_coefficients(model, alpha, truncation);
  const std::vector<complex> evolved = evolve(model, state, t);
  const complex rotated = alpha * std::polar(1.0, -model.omega * t);
  const PTCoherentState moved = coherent_coefficients(model, rotated, truncation);
  const complex global = std::polar(1.0, -model.omega * model.lambda * t);
  CompensatedSum diff2;
  CompensatedSum ref2;
  for (std::size_t n = 0; n < evolved.size(); ++n) {
    const complex ref = global * moved.coefficients[n];
    diff2.add(std::norm(evolved[n] - ref));
    ref2.add(std::norm(ref));
  }
  return std::sqrt(diff2.value() / ref2.value());
}

// ---------------------------------------------------------------------------
// Resolution of unity

double measure_g(double lambda, double x) {
  if (!(x > 0.0)) throw DomainError("measure weight needs x > 0");
  const double nu = 2.0 * lambda - 1.0;
  return 2.0 * std::pow(x, lambda - 0.5) * bessel_k(nu, 2.0 * std::sqrt(x));
}

double measure_g_derivative(double lambda, double x) {
  if (!(x > 0.0)) throw DomainError("measure weight needs x > 0");
  const double nu = 2.0 * lambda - 1.0;
  const double root = std::sqrt(x);
  const double z = 2.0 * root;
  // K_{nu-1} = K_{|nu-1|} for the half-line; nu - 1 = 2 lambda - 2 > 0 anyway.
  const double k_nu = bessel_k(nu, z);
  const double k_dz = -0.5 * (bessel_k(std::abs(nu - 1.0), z) + bessel_k(nu + 1.0, z));
  // d/dx [2 x^{nu/2} K_nu(2 sqrt x)], dz/dx = 1 / sqrt x
  return 2.0 * ((lambda - 0.5) * std::pow(x, lambda - 1.5) * k_nu +
                std::pow(x, lambda - 0.5) * k_dz / root);
}

double measure_weight(const PTModel& model, double x) {
  if (!(x > 0.0)) throw DomainError("measure weight needs x > 0");
  return (model.lambda - 1.0) * measure_g(model.lambda, x) -
         x * measure_g_derivative(model.lambda, x);
}

double MeasureWeight::operator()(double x) const {
  if (kind == WeightKind::NegativeControl) return measure_g(lambda, x);
  return (lambda - 1.0) * measure_g(lambda, x) - x * measure_g_derivative(lambda, x);
}

void validate_moment_request(int n_max, double tol) {
  if (n_max < 0 || n_max > 12) throw ArgumentError("n_max must lie in [0, 12]");
  if (!(tol >= 1e-8)) throw ArgumentError("tolerance must be >= 1e-8");
}

MomentCheck check_moment(const MeasureWeight& weight, int n, double tol) {
  const double lam = weight.lambda;
  MomentCheck out;
  out.n = n;
  const double log_target = log_gamma(n + 1.0) + std::log(n + lam) + log_gamma(2.0 * lam + n);
  out.target = std::exp(log_target);

  // Integrate 2 u^{2n+1} W(u^2) du; x^n W(x) decays like x^p e^{-2 sqrt x}.
  auto integrand = [&](double u) {
    if (u <= 0.0) return 0.0;
    return 2.0 * std::pow(u, 2 * n + 1) * weight(u * u);
  };
  // Cut where the remaining tail (bounded by u f(u) past the peak) is below
  // 1e-3 tol of the target.
  const double power = 2.0 * n + 2.0 * lam + 1.0;
  double upper = std::max(4.0, power);
  while (upper * std::abs(integrand(upper)) > 1e-3 * tol * out.target) upper += 1.0;
  out.cutoff = upper * upper;

  constexpr double kPiece = 2.0;
  const int pieces = static_cast<int>(std::ceil(upper / kPiece));
  const double abs_tol = 1e-3 * tol * out.target / pieces;
  CompensatedSum total;
  bool converged = true;
  for (int i = 0; i < pieces; ++i) {
    const double a = i * kPiece;
    const double b = std::min(upper, a + kPiece);
    const QuadratureResult r = integrate_adaptive(integrand, a, b, 1e-12, abs_tol, 500);
    total.add(r.value);
    converged = converged && r.converged;
  }
  out.computed = total.value();
  out.converged = converged;
  if (out.computed > 0.0) {
    // relative error through the log ratio to stay finite for large targets
    out.rel_error = std::abs(std::expm1(std::log(out.computed) - log_target));
  } else {
    out.rel_error = std::numeric_limits<double>::infinity();
  }
  out.passed = converged && out.rel_error <= tol;
  return out;
}

std::vector<MomentCheck> verify_measure_moments(const PTModel& model, int n_max, double tol,
                                                WeightKind kind) {
  validate_moment_request(n_max, tol);
  const MeasureWeight weight{model.lambda, kind};
  std::vector<MomentCheck> report(static_cast<std::size_t>(n_max) + 1);
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (int n = 0; n <= n_max; ++n) {
    try {
      report[static_cast<std::size_t>(n)] = check_moment(weight, n, tol);
    } catch (...) {
#pragma omp critical(kgcoh_moment_error)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return report;
}

}  // namespace kgcoh::pt
