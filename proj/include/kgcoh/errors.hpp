#pragma once

#include <stdexcept>
#include <string>

namespace kgcoh {

// Argument outside the mathematical domain of a function (x <= 0 for log-gamma, ...).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Malformed call: sizes, counts, orderings.
struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Computed quantities contradict each other beyond round-off (e.g. negative variance).
struct NumericalConsistencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Quadrature grid does not hold enough of the wavefunction's probability.
struct SupportTruncationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Wavefunction is not negligible at the edge of the grid.
struct BoundaryLeakError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid run configuration (CLI flags, config file, grid choice).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace kgcoh
