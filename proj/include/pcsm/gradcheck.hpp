#pragma once

// Central finite-difference verification of problem-supplied derivatives and
// of the Fletcher gradient / multiplier Jacobian built from them.

#include "pcsm/model.hpp"

#include <functional>
#include <vector>

namespace pcsm::gradcheck {

/// Gradient of a scalar function by central differences, step h (1 + |x_k|).
Vector fd_gradient(const std::function<double(const Vector&)>& fn, const Vector& x, double h);

/// n x m matrix whose column j is the gradient of the j-th output.
Matrix fd_jacobian(const std::function<Vector(const Vector&)>& fn, const Vector& x, double h);

/// ||analytic - reference|| / (1 + ||analytic||).
double relative_error(const Matrix& analytic, const Matrix& reference);

struct Options {
  double step = 1e-6;
  double rho = 10.0;
  bool check_hessians = true;
  bool check_fletcher = true;
  std::vector<Index> term_indices;  // constraint terms to check; empty = first min(N, 8)
};

struct Report {
  Index points = 0;
  double objective_gradient = 0.0;
  double objective_hessian = 0.0;
  double constraint_jacobian = 0.0;
  double constraint_hessian = 0.0;
  double fletcher_gradient = 0.0;
  double multiplier_jacobian = 0.0;

  double max_error() const;
};

/// Maximum relative errors over the given points. The Fletcher quantities are
/// checked on the sample set s.
Report check_problem(const SampledProblem& p, const SampleSet& s,
                     const std::vector<Vector>& points, const Options& opts);

}  // namespace pcsm::gradcheck
