#include "kgcoh/serial.hpp"

#include "kgcoh/errors.hpp"

namespace kgcoh::serial {

linear::TimeSeries time_series(const linear::LinearModel& model,
                               const linear::CoherentSpec& spec,
                               std::span<const double> times) {
  spec.validate();
  linear::validate_times(times);
  linear::TimeSeries series;
  series.samples.reserve(times.size());
  for (double t : times) series.samples.push_back(linear::time_sample(model, spec, t));
  return series;
}

GridFunction synthesize(const evolution::StateVector& state, const Grid& grid, double t) {
  evolution::check_support(state.model, grid);
  const std::vector<complex> evolved = state.evolved(t);
  std::vector<double> scratch(evolved.size());
  GridFunction f{grid, std::vector<complex>(grid.count())};
  for (std::size_t i = 0; i < grid.count(); ++i) {
    f.values[i] = evolution::synthesize_point(state, evolved, grid.at(i), scratch);
  }
  return f;
}

std::vector<double> tridiag_smallest_eigenvalues(const TridiagonalMatrix& m, std::size_t count,
                                                 double resolution) {
  m.validate();
  if (count == 0 || count > m.size()) {
    throw ArgumentError("requested eigenvalue count exceeds matrix dimension");
  }
  std::vector<double> values;
  values.reserve(count);
  for (std::size_t k = 0; k < count; ++k) values.push_back(bisect_eigenvalue(m, k, resolution));
  return values;
}

std::vector<pt::MomentCheck> verify_measure_moments(const pt::PTModel& model, int n_max,
                                                    double tol, pt::WeightKind kind) {
  pt::validate_moment_request(n_max, tol);
  const pt::MeasureWeight weight{model.lambda, kind};
  std::vector<pt::MomentCheck> report;
  for (int n = 0; n <= n_max; ++n) report.push_back(pt::check_moment(weight, n, tol));
  return report;
}

}  // namespace kgcoh::serial
