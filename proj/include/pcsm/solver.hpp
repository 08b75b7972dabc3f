#pragma once

#include "pcsm/model.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace pcsm {

/// One accepted iterate of a subproblem solver.
struct SolverIteration {
  Index iteration = 0;
  std::uint64_t constraint_grad_evals = 0;  // cumulative, from the caller's ledger
  double grad_lagrangian_norm = 0.0;        // on the subproblem's sample set
  double merit = 0.0;                       // Fletcher value or l1 merit
  double step = 0.0;                        // accepted step length (0 at the start)
  std::string phase;                        // "start", "gradient", "curvature", ...
};

struct SolverResult {
  Vector x;
  StationarityReport report;
  std::vector<SolverIteration> trace;
  Index iterations = 0;
};

/// Called after every accepted iterate with the new point and the ledger's
/// current constraint-gradient count. Used for out-of-band audits.
using IterateObserver = std::function<void(const Vector& x, std::uint64_t constraint_grad_evals)>;

}  // namespace pcsm
