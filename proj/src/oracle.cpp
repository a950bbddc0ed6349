#include "kgcoh/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kgcoh/errors.hpp"

namespace kgcoh::oracle {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

double PotentialSpec::mass() const {
  return std::visit([](const auto& k) { return k.m; }, kind);
}

PotentialSpec PotentialSpec::with_domain(const Grid& grid) const {
  if (std::holds_alternative<CustomSampled>(kind)) {
    throw ArgumentError("a sampled potential cannot be moved to another grid");
  }
  return PotentialSpec{kind, grid};
}

PotentialSpec linear_spec(double m, double k, std::size_t count) {
  if (!(m > 0.0) || !(k > 0.0)) throw ArgumentError("m and k must be positive");
  const double half = 12.0 / std::sqrt(k);
  return PotentialSpec{LinearAbs{m, k}, Grid(-half, half, count)};
}

PotentialSpec poschl_teller_spec(double m, double omega, std::size_t count,
                                 pt::SignBranch branch, double inset) {
  const pt::PTModel model = pt::PTModel::make(m, omega, branch);
  if (!(inset > 0.0) || inset >= model.half_width) {
    throw ArgumentError("wall inset must lie in (0, L)");
  }
  const double half = model.half_width - inset;
  return PotentialSpec{PoschlTellerWell{m, omega, branch}, Grid(-half, half, count)};
}

std::vector<double> sample_potential(const PotentialSpec& spec) {
  const std::size_t n = spec.domain.count();
  return std::visit(
      overloaded{
          [&](const LinearAbs& p) {
            std::vector<double> s(n);
            for (std::size_t i = 0; i < n; ++i) s[i] = p.k * std::abs(spec.domain.at(i)) - p.m;
            return s;
          },
          [&](const PoschlTellerWell& p) {
            const pt::PTModel model = pt::PTModel::make(p.m, p.omega, p.branch);
            if (spec.domain.x_min() <= -model.half_width ||
                spec.domain.x_max() >= model.half_width) {
              throw DomainError("Poschl-Teller domain must lie strictly inside (-L, L)");
            }
            std::vector<double> s(n);
            for (std::size_t i = 0; i < n; ++i) s[i] = pt::scalar_potential(model, spec.domain.at(i));
            return s;
          },
          [&](const CustomSampled& p) {
            if (p.samples.size() != n) {
              throw ArgumentError("sampled potential length does not match the grid");
            }
            return p.samples;
          }},
      spec.kind);
}

TridiagonalMatrix build_hamiltonian(const PotentialSpec& spec) {
  const double m = spec.mass();
  if (!(m > 0.0)) throw ArgumentError("mass must be positive");
  const std::size_t interior = spec.domain.count() - 2;
  if (interior < kMinInteriorPoints) {
    throw ArgumentError("need at least 100 interior grid points");
  }
  const std::vector<double> s = sample_potential(spec);
  const double h = spec.domain.step();
  const double kinetic = 1.0 / (m * h * h);

  TridiagonalMatrix mat;
  mat.diag.resize(interior);
  mat.offdiag.assign(interior - 1, -0.5 * kinetic);
  for (std::size_t i = 0; i < interior; ++i) {
    const double shifted = m + s[i + 1];
    if (!std::isfinite(shifted)) throw DomainError("potential is not finite on the grid");
    mat.diag[i] = kinetic + shifted * shifted / (2.0 * m);
  }
  return mat;
}

std::vector<double> fd_eigenvalues(const PotentialSpec& spec, std::size_t count) {
  return tridiag_smallest_eigenvalues(build_hamiltonian(spec), count);
}

SpectrumReport spectrum_compare(const PotentialSpec& spec,
                                const std::vector<double>& analytic_energies,
                                std::size_t n_count, double tolerance) {
  if (n_count == 0 || n_count > 20) throw ArgumentError("n_count must lie in [1, 20]");
  if (analytic_energies.size() < n_count) {
    throw ArgumentError("not enough analytic energies for the comparison");
  }
  const Grid fine = spec.domain;
  const Grid coarse = fine.coarsened();
  const double m = spec.mass();

  auto energies = [&](const Grid& g) {
    std::vector<double> eps = fd_eigenvalues(spec.with_domain(g), n_count);
    for (double& e : eps) e = std::sqrt(2.0 * m * e);
    return eps;
  };
  const std::vector<double> e_coarse = energies(coarse);
  const std::vector<double> e_fine = energies(fine);

  SpectrumReport r;
  r.n_count = n_count;
  r.coarse_count = coarse.count();
  r.fine_count = fine.count();
  r.analytic.assign(analytic_energies.begin(), analytic_energies.begin() + static_cast<std::ptrdiff_t>(n_count));
  r.fd_energies = e_fine;
  const double refinement = std::log2(coarse.step() / fine.step());
  r.min_order = std::numeric_limits<double>::infinity();
  r.max_order = -std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < n_count; ++n) {
    const double target = r.analytic[n];
    const double ec = std::abs(e_coarse[n] - target) / target;
    const double ef = std::abs(e_fine[n] - target) / target;
    const double order = (ef > 0.0) ? std::log2(ec / ef) / refinement
                                    : std::numeric_limits<double>::infinity();
    r.rel_error_coarse.push_back(ec);
    r.rel_error_fine.push_back(ef);
    r.order.push_back(order);
    r.max_rel_error = std::max(r.max_rel_error, ef);
    r.min_order = std::min(r.min_order, order);
    r.max_order = std::max(r.max_order, order);
  }
  r.converged = r.min_order >= kMinOrder;
  r.passed = r.converged && r.max_rel_error <= tolerance;
  return r;
}

}  // namespace kgcoh::oracle
