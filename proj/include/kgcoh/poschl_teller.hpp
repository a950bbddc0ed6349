#pragma once

// Relativistic Poschl-Teller scalar potential
//   S(x) = -m +/- m / cos(omega x),  |x| <= pi / (2 omega),
// which turns H_s into the trigonometric Poschl-Teller problem with the
// equally spaced relativistic spectrum E_n = omega (n + lambda).
//
// Coherent states here are eigenvectors of the lowering operator A_- acting on
// coefficient vectors through the ladder factors D(n, lambda).

#include <span>
#include <vector>

#include "kgcoh/numerics.hpp"

namespace kgcoh::pt {

enum class SignBranch { Plus, Minus };

struct PTModel {
  double m = 1.0;
  double omega = 1.0;
  double lambda = 0.0;      // 1/2 + 1/2 sqrt(4 m^2 / omega^2 + 1)
  double half_width = 0.0;  // pi / (2 omega)
  SignBranch branch = SignBranch::Plus;

  /// Throws ArgumentError unless m > 0 and omega > 0.
  static PTModel make(double m, double omega, SignBranch branch = SignBranch::Plus);
};

struct PTCoherentState {
  complex alpha{0.0, 0.0};
  int truncation = 60;
  std::vector<complex> coefficients;
  double s_alpha = 0.0;  // truncated S(alpha); may underflow for large lambda
  double n_alpha = 0.0;  // [lambda Gamma(2 lambda) S(alpha)]^{-1/2}
  double log_s_alpha = 0.0;
};

double lambda_of(double m, double omega);

/// E_n = omega (n + lambda).
double energy(const PTModel& model, int n);

/// epsilon_n = E_n^2 / (2m), the eigenvalue of H_s.
double schrodinger_eigenvalue(const PTModel& model, int n);

/// The scalar potential S(x) on the chosen sign branch (inside the well).
double scalar_potential(const PTModel& model, double x);

/// Unit-normalized u_n(x) = N_n cos(omega x)^lambda C_n^lambda(sin omega x) on
/// [-L, L]; zero outside (hard wall).
double eigenfunction(const PTModel& model, int n, double x);

/// u_0(x) .. u_{n_max}(x) at one point.
void eigenfunctions(const PTModel& model, int n_max, double x, std::span<double> out);

/// ln of the normalization N_n above.
double log_eigenfunction_norm(const PTModel& model, int n);

/// D(n, lambda) = sqrt((n+1)(2 lambda + n) / ((n + lambda)(n + 1 + lambda))).
double ladder_coeff(int n, double lambda);

/// out_n = c_{n+1} (n + 1 + lambda) D(n, lambda), out_N = 0.
std::vector<complex> apply_annihilation(const PTModel& model, std::span<const complex> c);

/// Eigenvector of A_- with eigenvalue alpha, truncated at N, evaluated in log space.
PTCoherentState coherent_coefficients(const PTModel& model, complex alpha, int truncation);

/// The same coefficients generated by the two-term recursion from c_0.
std::vector<complex> recursion_coefficients(const PTModel& model, complex alpha,
                                            int truncation);

/// Analytic bound on |alpha| * |c_{N+1}| / |c_N| * |c_N|, i.e. the eigen-residual
/// introduced by cutting the basis at N.
double truncation_tail(const PTModel& model, complex alpha, int truncation);

/// c_n(t) = c_n e^{-i E_n t}.
std::vector<complex> evolve(const PTModel& model, const PTCoherentState& state, double t);

/// || evolve(psi_alpha, t) - e^{-i omega lambda t} psi_{alpha e^{-i omega t}} || / || . ||
double phase_coherence_check(const PTModel& model, complex alpha, int truncation, double t);

// ---------------------------------------------------------------------------
// Resolution of unity

enum class WeightKind {
  Candidate,        // W = (lambda - 1) G - x G'
  NegativeControl,  // G alone (missing the derivative term)
};

/// Weight function for the radial moment problem in x = |alpha|^2.
struct MeasureWeight {
  double lambda = 0.0;
  WeightKind kind = WeightKind::Candidate;

  double operator()(double x) const;
};

/// G(x) = 2 x^{lambda - 1/2} K_{2 lambda - 1}(2 sqrt x).
double measure_g(double lambda, double x);
/// dG/dx through K'_nu = -(K_{nu-1} + K_{nu+1}) / 2 and the chain rule.
double measure_g_derivative(double lambda, double x);

/// Candidate W(x) = (lambda - 1) G(x) - x G'(x). Throws DomainError for x <= 0.
double measure_weight(const PTModel& model, double x);

struct MomentCheck {
  int n = 0;
  double computed = 0.0;
  double target = 0.0;       // n! (n + lambda) Gamma(2 lambda + n)
  double rel_error = 0.0;    // |computed - target| / target, evaluated in log space
  double cutoff = 0.0;       // X_cut
  bool converged = false;
  bool passed = false;
};

/// Moment n of `weight` over (0, X_cut]; the integration runs in u = sqrt(x).
MomentCheck check_moment(const MeasureWeight& weight, int n, double tol);

/// n = 0..n_max in parallel. n_max <= 12, tol >= 1e-8.
std::vector<MomentCheck> verify_measure_moments(const PTModel& model, int n_max, double tol,
                                                WeightKind kind = WeightKind::Candidate);

/// Validates the n_max / tol preconditions shared with the serial driver.
void validate_moment_request(int n_max, double tol);

}  // namespace kgcoh::pt
