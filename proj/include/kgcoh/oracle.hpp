#pragma once

// Independent finite-difference solver for
//   H_s = -(1/2m) d^2/dx^2 + (m + S(x))^2 / (2m)
// with Dirichlet walls at the grid ends. Used to validate every analytic
// spectrum in the library.

#include <variant>
#include <vector>

#include "kgcoh/numerics.hpp"
#include "kgcoh/poschl_teller.hpp"

namespace kgcoh::oracle {

struct LinearAbs {
  double m = 1.0;
  double k = 1.0;
};

struct PoschlTellerWell {
  double m = 1.0;
  double omega = 1.0;
  pt::SignBranch branch = pt::SignBranch::Plus;
};

/// S sampled on every point of the domain grid (endpoints included).
struct CustomSampled {
  double m = 1.0;
  std::vector<double> samples;
};

using PotentialKind = std::variant<LinearAbs, PoschlTellerWell, CustomSampled>;

struct PotentialSpec {
  PotentialKind kind;
  Grid domain;

  double mass() const;
  /// Same potential on a different grid (CustomSampled cannot be regridded).
  PotentialSpec with_domain(const Grid& grid) const;
};

/// Linear box [-12/sqrt k, 12/sqrt k].
PotentialSpec linear_spec(double m, double k, std::size_t count = 8001);
/// Well (-L + inset, L - inset).
PotentialSpec poschl_teller_spec(double m, double omega, std::size_t count = 8001,
                                 pt::SignBranch branch = pt::SignBranch::Plus,
                                 double inset = 1e-4);

inline constexpr std::size_t kMinInteriorPoints = 100;

/// S(x_i) for every domain point.
std::vector<double> sample_potential(const PotentialSpec& spec);

/// Dirichlet discretization on interior points:
///   diag_i = 1/(m h^2) + (m + S_i)^2/(2m),  offdiag = -1/(2 m h^2).
/// Throws ArgumentError below kMinInteriorPoints interior points, DomainError
/// for non-finite potential samples.
TridiagonalMatrix build_hamiltonian(const PotentialSpec& spec);

/// Lowest `count` eigenvalues epsilon_n of the discretized H_s.
std::vector<double> fd_eigenvalues(const PotentialSpec& spec, std::size_t count);

struct SpectrumReport {
  std::size_t n_count = 0;
  std::size_t coarse_count = 0;  // grid points
  std::size_t fine_count = 0;
  std::vector<double> analytic;        // E_n
  std::vector<double> fd_energies;     // E_n = sqrt(2 m epsilon_n) on the fine grid
  std::vector<double> rel_error_coarse;
  std::vector<double> rel_error_fine;
  std::vector<double> order;           // per-level log2(err_coarse / err_fine) / log2(h_c / h_f)
  double max_rel_error = 0.0;          // fine grid
  double min_order = 0.0;
  double max_order = 0.0;
  bool converged = false;              // every level has order >= kMinOrder
  bool passed = false;                 // converged and max_rel_error <= tolerance
};

inline constexpr double kMinOrder = 1.5;

/// Compares FD energies on spec.domain and on the grid with half as many
/// intervals against `analytic_energies` (at least n_count entries, n_count <= 20).
SpectrumReport spectrum_compare(const PotentialSpec& spec,
                                const std::vector<double>& analytic_energies,
                                std::size_t n_count, double tolerance = 1e-3);

}  // namespace kgcoh::oracle
