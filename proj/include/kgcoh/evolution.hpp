#pragma once

// Model-independent machinery for truncated-basis states: synthesize psi(x, t)
// on a grid and take position/momentum moments by quadrature. This is the
// oracle that the closed-form linear-model series are checked against, and the
// only route to expectation values for the Poschl-Teller model.

#include <variant>
#include <vector>

#include "kgcoh/linear_osc.hpp"
#include "kgcoh/numerics.hpp"
#include "kgcoh/poschl_teller.hpp"

namespace kgcoh::evolution {

enum class ModelTag { LinearScalar, PoschlTeller };

using Model = std::variant<linear::LinearModel, pt::PTModel>;

struct StateVector {
  Model model;
  std::vector<complex> coefficients;
  std::vector<double> energies;

  ModelTag tag() const {
    return std::holds_alternative<linear::LinearModel>(model) ? ModelTag::LinearScalar
                                                              : ModelTag::PoschlTeller;
  }
  int truncation() const { return static_cast<int>(coefficients.size()) - 1; }
  /// c_n e^{-i E_n t}
  std::vector<complex> evolved(double t) const;
};

StateVector make_state(const linear::LinearModel& model, const linear::CoherentSpec& spec);
StateVector make_state(const pt::PTModel& model, const pt::PTCoherentState& state);
/// Arbitrary coefficients over the model's eigenbasis (energies filled in).
StateVector make_state(const Model& model, std::vector<complex> coefficients);

/// Default quadrature grids: [-12/sqrt k, 12/sqrt k] or [-L, L], 4001 points.
Grid default_grid(const Model& model, std::size_t count = 4001);

/// Throws ConfigError unless the grid covers the model's support region
/// ([-8/sqrt k, 8/sqrt k] for the linear model, [-L, L] for Poschl-Teller).
void check_support(const Model& model, const Grid& grid);

/// psi(x_i, t) = sum_n c_n e^{-i E_n t} u_n(x_i). OpenMP over grid points.
GridFunction synthesize(const StateVector& state, const Grid& grid, double t);

/// psi at one grid point; shared by the parallel and serial drivers.
complex synthesize_point(const StateVector& state, const std::vector<complex>& evolved,
                         double x, std::vector<double>& basis_scratch);

struct PositionMoments {
  double mean_x = 0.0;
  double mean_x2 = 0.0;
  double norm = 0.0;
};

struct MomentumMoments {
  double mean_p = 0.0;
  double mean_p2 = 0.0;
};

/// Below this norm the grid is taken to have cut off part of the state.
inline constexpr double kMinimumNorm = 0.9;
/// Largest |psi| tolerated at either end of the grid for momentum moments.
inline constexpr double kBoundaryAmplitude = 1e-6;

/// <x>, <x^2> normalized by the grid norm. Throws SupportTruncationError when
/// the norm is <= kMinimumNorm.
PositionMoments position_moments(const GridFunction& f);

/// Sixth-order central differences in the interior, fourth-order central and
/// one-sided stencils on the three points nearest each edge.
std::vector<complex> derivative(const GridFunction& f);

/// <p> = int conj(psi) (-i psi') dx, <p^2> = int |psi'|^2 dx, both over the
/// grid norm. Throws BoundaryLeakError when |psi| > kBoundaryAmplitude at an edge.
MomentumMoments momentum_moments(const GridFunction& f);

/// Delta x, Delta p and the product from the synthesized wavefunction.
linear::Uncertainty heisenberg_product(const StateVector& state, const Grid& grid, double t);

/// All four moments from one synthesized wavefunction.
linear::Moments quadrature_moments(const StateVector& state, const Grid& grid, double t);

/// Distance of the evolved linear-model coefficients from the nearest
/// eigenvector of the oscillator lowering map out_n = sqrt(n+1) c_{n+1}:
/// min_mu ||out - mu c|| / ||c||. Linear model only.
double lowering_residual(const StateVector& state, double t);

}  // namespace kgcoh::evolution
