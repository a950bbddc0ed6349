#include "kgcoh/evolution.hpp"

#include <cmath>
#include <exception>

#include "kgcoh/errors.hpp"

namespace kgcoh::evolution {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::vector<double> energies_for(const Model& model, std::size_t size) {
  std::vector<double> e(size);
  for (std::size_t n = 0; n < size; ++n) {
    e[n] = std::visit([n](const auto& m) { return energy(m, static_cast<int>(n)); }, model);
  }
  return e;
}

void basis(const Model& model, int n_max, double x, std::span<double> out) {
  std::visit([&](const auto& m) { eigenfunctions(m, n_max, x, out); }, model);
}

}  // namespace

std::vector<complex> StateVector::evolved(double t) const {
  std::vector<complex> out(coefficients.size());
  for (std::size_t n = 0; n < out.size(); ++n) {
    out[n] = coefficients[n] * std::polar(1.0, -energies[n] * t);
  }
  return out;
}

StateVector make_state(const Model& model, std::vector<complex> coefficients) {
  if (coefficients.empty()) throw ArgumentError("state needs at least one coefficient");
  StateVector s{model, std::move(coefficients), {}};
  s.energies = energies_for(model, s.coefficients.size());
  return s;
}

StateVector make_state(const linear::LinearModel& model, const linear::CoherentSpec& spec) {
  return make_state(Model{model}, linear::coherent_coefficients(spec));
}

StateVector make_state(const pt::PTModel& model, const pt::PTCoherentState& state) {
  return make_state(Model{model}, state.coefficients);
}

Grid default_grid(const Model& model, std::size_t count) {
  return std::visit(
      overloaded{
          [count](const linear::LinearModel& m) {
            const double half = 12.0 / std::sqrt(m.k);
            return Grid(-half, half, count);
          },
          [count](const pt::PTModel& m) { return Grid(-m.half_width, m.half_width, count); }},
      model);
}

void check_support(const Model& model, const Grid& grid) {
  std::visit(overloaded{[&](const linear::LinearModel& m) {
                          const double half = 8.0 / std::sqrt(m.k);
                          if (grid.x_min() > -half || grid.x_max() < half) {
                            throw ConfigError("grid must cover [-8/sqrt(k), 8/sqrt(k)]");
                          }
                        },
                        [&](const pt::PTModel& m) {
                          // allow a few ulp of slack on the wall positions
                          const double slack = 1e-12 * m.half_width;
                          if (grid.x_min() > -m.half_width + slack ||
                              grid.x_max() < m.half_width - slack) {
                            throw ConfigError("grid must cover the well [-L, L]");
                          }
                        }},
             model);
}

complex synthesize_point(const StateVector& state, const std::vector<complex>& evolved,
                         double x, std::vector<double>& scratch) {
  basis(state.model, state.truncation(), x, scratch);
  complex acc{};
  for (std::size_t n = 0; n < evolved.size(); ++n) acc += evolved[n] * scratch[n];
  return acc;
}

GridFunction synthesize(const StateVector& state, const Grid& grid, double t) {
  check_support(state.model, grid);
  const std::vector<complex> evolved = state.evolved(t);
  GridFunction f{grid, std::vector<complex>(grid.count())};
  const auto count = static_cast<std::ptrdiff_t>(grid.count());
#pragma omp parallel
  {
    std::vector<double> scratch(evolved.size());
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      const auto idx = static_cast<std::size_t>(i);
      f.values[idx] = synthesize_point(state, evolved, grid.at(idx), scratch);
    }
  }
  return f;
}

PositionMoments position_moments(const GridFunction& f) {
  const std::size_t n = f.grid.count();
  if (f.values.size() != n) throw ArgumentError("sample count does not match grid");
  std::vector<double> density(n), first(n), second(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = f.grid.at(i);
    density[i] = std::norm(f.values[i]);
    first[i] = x * density[i];
    second[i] = x * x * density[i];
  }
  const double h = f.grid.step();
  PositionMoments out;
  out.norm = simpson(std::span<const double>(density), h);
  if (!(out.norm > kMinimumNorm)) {
    throw SupportTruncationError("grid holds only " + std::to_string(out.norm) +
                                 " of the probability");
  }
  out.mean_x = simpson(std::span<const double>(first), h) / out.norm;
  out.mean_x2 = simpson(std::span<const double>(second), h) / out.norm;
  return out;
}

std::vector<complex> derivative(const GridFunction& f) {
  const std::size_t n = f.values.size();
  const auto& v = f.values;
  const double h = f.grid.step();
  std::vector<complex> d(n);
  if (n < 7) throw ArgumentError("derivative needs at least 7 samples");
  for (std::size_t i = 3; i + 3 < n; ++i) {
    d[i] = (-v[i - 3] + 9.0 * v[i - 2] - 45.0 * v[i - 1] + 45.0 * v[i + 1] - 9.0 * v[i + 2] +
            v[i + 3]) / (60.0 * h);
  }
  for (std::size_t i : {std::size_t{2}, n - 3}) {
    d[i] = (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) / (12.0 * h);
  }
  // fourth-order one-sided closures
  d[0] = (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) / (12.0 * h);
  d[1] = (-3.0 * v[0] - 10.0 * v[1] + 18.0 * v[2] - 6.0 * v[3] + v[4]) / (12.0 * h);
  d[n - 1] = (25.0 * v[n - 1] - 48.0 * v[n - 2] + 36.0 * v[n - 3] - 16.0 * v[n - 4] +
              3.0 * v[n - 5]) / (12.0 * h);
  d[n - 2] = (3.0 * v[n - 1] + 10.0 * v[n - 2] - 18.0 * v[n - 3] + 6.0 * v[n - 4] -
              v[n - 5]) / (12.0 * h);
  return d;
}

MomentumMoments momentum_moments(const GridFunction& f) {
  const std::size_t n = f.grid.count();
  if (f.values.size() != n) throw ArgumentError("sample count does not match grid");
  if (std::abs(f.values.front()) > kBoundaryAmplitude ||
      std::abs(f.values.back()) > kBoundaryAmplitude) {
    throw BoundaryLeakError("wavefunction does not vanish at the grid edge");
  }
  const std::vector<complex> d = derivative(f);
  std::vector<double> density(n), current(n), kinetic(n);
  for (std::size_t i = 0; i < n; ++i) {
    density[i] = std::norm(f.values[i]);
    // Re[conj(psi) (-i psi')] = Im[conj(psi) psi']
    current[i] = (std::conj(f.values[i]) * d[i]).imag();
    kinetic[i] = std::norm(d[i]);
  }
  const double h = f.grid.step();
  const double norm = simpson(std::span<const double>(density), h);
  MomentumMoments out;
  out.mean_p = simpson(std::span<const double>(current), h) / norm;
  out.mean_p2 = simpson(std::span<const double>(kinetic), h) / norm;
  return out;
}

linear::Moments quadrature_moments(const StateVector& state, const Grid& grid, double t) {
  const GridFunction f = synthesize(state, grid, t);
  const PositionMoments pos = position_moments(f);
  const MomentumMoments mom = momentum_moments(f);
  return {pos.mean_x, mom.mean_p, pos.mean_x2, mom.mean_p2};
}

linear::Uncertainty heisenberg_product(const StateVector& state, const Grid& grid, double t) {
  return linear::uncertainty_from_moments(quadrature_moments(state, grid, t));
}

double lowering_residual(const StateVector& state, double t) {
  if (state.tag() != ModelTag::LinearScalar) {
    throw ArgumentError("lowering_residual applies to the linear model only");
  }
  const std::vector<complex> c = state.evolved(t);
  double cc = 0.0;
  for (const complex& v : c) cc += std::norm(v);
  if (cc == 0.0) throw DomainError("lowering_residual of the zero state");

  std::vector<complex> lowered(c.size(), complex{});
  for (std::size_t n = 0; n + 1 < c.size(); ++n) {
    lowered[n] = std::sqrt(static_cast<double>(n + 1)) * c[n + 1];
  }
  complex overlap{};
  for (std::size_t n = 0; n < c.size(); ++n) overlap += std::conj(c[n]) * lowered[n];
  const complex mu = overlap / cc;
  CompensatedSum r2;
  for (std::size_t n = 0; n < c.size(); ++n) r2.add(std::norm(lowered[n] - mu * c[n]));
  return std::sqrt(r2.value() / cc);
}

}  // namespace kgcoh::evolution
