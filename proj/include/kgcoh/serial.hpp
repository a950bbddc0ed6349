#pragma once

// Single-threaded references for the OpenMP kernels. They share the per-item
// code paths with the parallel drivers, so results must match bit for bit;
// tests/test_serial_parity.cpp and bench/bench_kernels.cpp compare the two.

#include <span>
#include <vector>

#include "kgcoh/evolution.hpp"
#include "kgcoh/linear_osc.hpp"
#include "kgcoh/numerics.hpp"
#include "kgcoh/poschl_teller.hpp"

namespace kgcoh::serial {

linear::TimeSeries time_series(const linear::LinearModel& model,
                               const linear::CoherentSpec& spec,
                               std::span<const double> times);

GridFunction synthesize(const evolution::StateVector& state, const Grid& grid, double t);

std::vector<double> tridiag_smallest_eigenvalues(const TridiagonalMatrix& m, std::size_t count,
                                                 double resolution = 1e-10);

std::vector<pt::MomentCheck> verify_measure_moments(
    const pt::PTModel& model, int n_max, double tol,
    pt::WeightKind kind = pt::WeightKind::Candidate);

}  // namespace kgcoh::serial
