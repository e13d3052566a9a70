#pragma once

#include "poslab/grid_function.hpp"
#include "poslab/harness/config.hpp"
#include "poslab/harness/report.hpp"

namespace poslab::harness {

/// u = scale * f(r) + shift on the grid.
GridFunction make_input(const AnalysisSpec& a, const GridPtr& grid);

/// Runs one experiment on a resolved config. PreconditionError and
/// NumericalError become failed stages; InvalidArgument propagates.
ExperimentReport run(const ExperimentConfig& cfg);

/// Reruns at (N-1) 2^l + 1 nodes for l < levels and fits the observed order
/// of every reported discretization error. levels >= 2.
ExperimentReport sweep(const ExperimentConfig& cfg, std::size_t levels);

}  // namespace poslab::harness
