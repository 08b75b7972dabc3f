#pragma once

// Second-order subproblem solver minimizing Fletcher's augmented Lagrangian
//   F_S(x) = f(x) + c_S(x)^T y_S(x) + rho ||c_S(x)||^2
// by backtracking gradient descent plus negative-curvature steps, stopping at
// an (epsilon, zeta)-stationary point of the subsampled problem.

#include "pcsm/solver.hpp"

namespace pcsm {

enum class FletcherMode {
  LineSearch,     // gradient descent with Armijo backtracking + negative curvature
  ConstantStep,   // plain gradient descent with a user step (warm-start analysis)
};

struct FletcherConfig {
  double rho = 10.0;
  double grad_ls_init_step = 1.0;
  double curv_ls_init_step = 1.0;
  double armijo_c1 = 1e-4;
  double armijo_c2 = 1e-4;
  double backtrack_factor_grad = 0.5;
  double backtrack_factor_curv = 0.5;
  double grad_phase_threshold_factor = 0.5;
  Index max_iters = 1'000'000;
  double fd_step = 1e-5;
  double min_step = 1e-16;
  FletcherMode mode = FletcherMode::LineSearch;
  double constant_step = 0.0;  // used only in ConstantStep mode

  void validate() const;
};

/// First-order data plus everything needed for the gradient of F_S at x.
struct FletcherPoint {
  PointEval base;
  std::vector<Matrix> constraint_hessians;  // averaged over S, one per component
  Matrix hess_lxx;                          // Hessian of the Lagrangian at y_S(x)
  Matrix multiplier_jacobian;               // grad y_S(x), n x m
  double value = 0.0;
  Vector gradient;
};

double fletcher_value(const PointEval& pe, double rho);
double fletcher_value(const SampledProblem& p, const SampleSet& s, const Vector& x, double rho,
                      EvalCounters& counters);

/// grad y_S(x) = -(H grad c_S + E)(grad c_S^T grad c_S)^{-1}, where the j-th
/// column of E is grad^2 [c_S]_j grad_x L_S(x, y_S(x)).
Matrix multiplier_jacobian_term(const PointEval& pe, const Matrix& hess_lxx,
                                const std::vector<Matrix>& constraint_hessians);
Matrix multiplier_jacobian_term(const SampledProblem& p, const SampleSet& s, const Vector& x,
                                EvalCounters& counters);

/// grad F_S = grad f + grad c_S y_S + grad y_S c_S + 2 rho grad c_S c_S.
Vector fletcher_gradient(const SampledProblem& p, const SampleSet& s, const Vector& x, double rho,
                         EvalCounters& counters);

/// Evaluates F_S, grad F_S and the second-order data at x.
FletcherPoint evaluate_fletcher(const SampledProblem& p, const SampleSet& s, const Vector& x,
                                double rho, EvalCounters& counters);

/// Central-difference Hessian-vector product of F_S with step fd_step (1 + ||x||).
Vector fletcher_hessian_vec(const SampledProblem& p, const SampleSet& s, const Vector& x,
                            double rho, const Vector& v, double fd_step, EvalCounters& counters);

/// Dense Hessian of F_S assembled column by column from Hessian-vector products.
Matrix fletcher_hessian(const SampledProblem& p, const SampleSet& s, const Vector& x, double rho,
                        double fd_step, EvalCounters& counters);

SolverResult solve_fletcher(const SampledProblem& p, const SampleSet& s, const Vector& x0,
                            double epsilon, double zeta, const FletcherConfig& cfg,
                            EvalCounters& counters, const IterateObserver& observer = {});

}  // namespace pcsm
