#pragma once

// First-order SQP subproblem solver: identity-Hessian KKT steps, an l1 merit
// function phi(x; tau) = tau f(x) + ||c_S(x)||_1 with an adaptive penalty, and
// Armijo backtracking. Stops once ||grad L_S(x, y_S(x))|| <= epsilon.

#include "pcsm/solver.hpp"

namespace pcsm {

struct SqpConfig {
  double alpha_init = 1.0;     // initial trial step
  double nu = 0.5;             // merit penalty reduction factor
  double sigma = 0.5;          // fraction of feasibility reduction kept in the model
  double eta = 0.5;            // Armijo sufficient-decrease constant
  double tau_init = 1.0;       // initial merit penalty
  double backtrack_factor = 0.5;
  Index max_iters = 5'000'000;
  double merit_tau_min = 1e-10;
  double min_step = 1e-16;
  /// Evaluate the reduced Hessian for the exit report (logging only).
  bool report_second_order = true;

  void validate() const;
};

struct SqpStep {
  Vector d;        // primal step, n
  Vector delta_y;  // dual step, m
};

/// Solves [I  J; J^T 0] (d; delta) = -(grad f + J y; c).
SqpStep sqp_step(const PointEval& pe, const Vector& y);
SqpStep sqp_step(const SampledProblem& p, const SampleSet& s, const Vector& x, const Vector& y,
                 EvalCounters& counters);

SolverResult solve_sqp(const SampledProblem& p, const SampleSet& s, const Vector& x0,
                       double epsilon, double zeta, const SqpConfig& cfg, EvalCounters& counters,
                       const IterateObserver& observer = {});

}  // namespace pcsm
