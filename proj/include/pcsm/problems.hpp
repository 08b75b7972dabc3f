#pragma once

// Concrete sampled problems: the noisy two-dimensional test problem, its
// smooth mean-constraint limit, analytic probe families used as oracles, and a
// physics-informed network trained on a damped harmonic oscillator.

#include "pcsm/model.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

namespace pcsm::problems {

// --- artificial two-dimensional problem --------------------------------------

struct ArtificialProblemSpec {
  double a = 1e-4;      // amplitude of the oscillatory terms
  double phi = 100.0;   // frequency
  Index n_samples = 2048;
  std::uint64_t seed = 1;
};

/// f(x) = x1, c_i(x) = x1 - x2^2 + a sin(phi x1 + w_i1) + a cos(phi x2 + w_i2)
/// with w_i drawn uniformly from [-pi, pi]^2 at construction.
class ArtificialProblem final : public SampledProblem {
 public:
  explicit ArtificialProblem(const ArtificialProblemSpec& spec);

  Index num_variables() const override { return 2; }
  Index num_constraints() const override { return 1; }
  Index num_samples() const override { return spec_.n_samples; }

  double objective(const Vector& x) const override;
  Vector objective_gradient(const Vector& x) const override;
  Matrix objective_hessian(const Vector& x) const override;

  Vector constraint_term(const Vector& x, Index i) const override;
  Matrix constraint_term_jacobian(const Vector& x, Index i) const override;
  Matrix constraint_term_hessian(const Vector& x, Index i, Index j) const override;

  const ArtificialProblemSpec& spec() const noexcept { return spec_; }
  const std::array<double, 2>& omega(Index i) const;

 private:
  ArtificialProblemSpec spec_;
  std::vector<std::array<double, 2>> omega_;
};

/// Scalar value of one constraint term of the artificial problem.
double artificial_constraint_term(const ArtificialProblem& p, const Vector& x, Index i);

// --- analytic problems --------------------------------------------------------

/// The expectation limit of the artificial problem: N = 1, f(x) = x1,
/// c(x) = x1 - x2^2. Minimizer (0, 0) with multiplier -1.
std::unique_ptr<SampledProblem> mean_limit_problem();

/// c_i(x) = x1 + i (zero-based i), f(x) = x1^2/2 + x2^2/2. Closed-form sample averages.
std::unique_ptr<SampledProblem> linear_probe_problem(Index n_samples);

/// Quadratic objective 0.5 x^T Q x + g^T x with linear constraint terms
/// c_i(x) = A_i^T x + b_i. The exact Hessian of the Fletcher function is known.
class QuadraticProbeProblem final : public SampledProblem {
 public:
  QuadraticProbeProblem(Index n, Index m, Index n_samples, std::uint64_t seed);

  Index num_variables() const override { return q_.rows(); }
  Index num_constraints() const override { return m_; }
  Index num_samples() const override { return static_cast<Index>(a_.size()); }

  double objective(const Vector& x) const override;
  Vector objective_gradient(const Vector& x) const override;
  Matrix objective_hessian(const Vector& x) const override;
  Vector constraint_term(const Vector& x, Index i) const override;
  Matrix constraint_term_jacobian(const Vector& x, Index i) const override;
  Matrix constraint_term_hessian(const Vector& x, Index i, Index j) const override;

  const Matrix& q() const noexcept { return q_; }
  const Vector& g() const noexcept { return g_; }
  /// Average of A_i over the given sample set.
  Matrix mean_constraint_matrix(const SampleSet& s) const;

 private:
  Index m_;
  Matrix q_;
  Vector g_;
  std::vector<Matrix> a_;
  std::vector<Vector> b_;
};

/// Smooth nonlinear family with sample-dependent coefficients, used for
/// derivative checks: f(x) = sum_k w_k cos(x_k) + 0.05 |x|^2,
/// [c_i]_j(x) = b_ij + A_ij^T x + 0.1 sum_k B_ijk x_k^2 + 0.05 sin(u_ij^T x).
class SmoothRandomProblem final : public SampledProblem {
 public:
  SmoothRandomProblem(Index n, Index m, Index n_samples, std::uint64_t seed);

  Index num_variables() const override { return n_; }
  Index num_constraints() const override { return m_; }
  Index num_samples() const override { return n_samples_; }

  double objective(const Vector& x) const override;
  Vector objective_gradient(const Vector& x) const override;
  Matrix objective_hessian(const Vector& x) const override;
  Vector constraint_term(const Vector& x, Index i) const override;
  Matrix constraint_term_jacobian(const Vector& x, Index i) const override;
  Matrix constraint_term_hessian(const Vector& x, Index i, Index j) const override;

 private:
  struct Term {
    double b;
    Vector a;
    Vector quad;
    Vector u;
  };
  const Term& term(Index i, Index j) const;

  Index n_;
  Index m_;
  Index n_samples_;
  Vector w_;
  std::vector<Term> terms_;  // row-major in (i, j)
};

// --- physics-informed network -------------------------------------------------

/// Fully connected 1 -> h -> h -> 1 tanh network trained so that its output
/// solves mass u'' + damping u' + stiffness u = 0 on [0, t_end].
///
/// Parameter layout: W1 (h), b1 (h), W2 (h x h, row-major), b2 (h), w3 (h), b3 (1).
struct MlpSpec {
  Index hidden = 16;
  Index n_objective = 64;    // N_f data/residual points in the objective
  Index n_samples = 128;     // N collocation points in the sampled constraint
  double t_end = 10.0;
  double mass = 1.0;
  double damping = 0.1;
  double stiffness = 1.0;
  double u0 = 1.0;
  double v0 = -1.0;
  double input_scale = 0.1;  // the first layer sees input_scale * t

  Index num_parameters() const { return hidden + hidden + (hidden * hidden + hidden) + (hidden + 1); }
};

struct TaylorOutput {
  double u = 0.0;
  double du_dt = 0.0;
  double d2u_dt2 = 0.0;
};

/// Network value and first two time derivatives by degree-2 forward propagation.
TaylorOutput mlp_forward_t2(const MlpSpec& spec, const Vector& params, double t);

/// Gradient with respect to the parameters of gu*u + g1*u' + g2*u'' at time t.
Vector mlp_parameter_gradient(const MlpSpec& spec, const Vector& params, double t,
                              double gu, double g1, double g2);

/// Closed-form underdamped solution of the oscillator with the spec's initial data.
double oscillator_solution(const MlpSpec& spec, double t);
double oscillator_velocity(const MlpSpec& spec, double t);
double oscillator_acceleration(const MlpSpec& spec, double t);

/// Seeded parameter initialization.
Vector initial_parameters(const MlpSpec& spec, std::uint64_t seed);

/// m = 3 constraint rows per term: u(0) - u0, u'(0) - v0, and the ODE residual at
/// t_i = t_end (i + 1) / N. Only the third row varies with the sample.
class PinnProblem final : public SampledProblem {
 public:
  explicit PinnProblem(const MlpSpec& spec);

  Index num_variables() const override { return spec_.num_parameters(); }
  Index num_constraints() const override { return 3; }
  Index num_samples() const override { return spec_.n_samples; }

  double objective(const Vector& x) const override;
  Vector objective_gradient(const Vector& x) const override;
  /// Central differences of the analytic gradient.
  Matrix objective_hessian(const Vector& x) const override;

  Vector constraint_term(const Vector& x, Index i) const override;
  Matrix constraint_term_jacobian(const Vector& x, Index i) const override;
  Matrix constraint_term_hessian(const Vector& x, Index i, Index j) const override;
  /// Central differences of the analytic term Jacobian.
  std::vector<Matrix> constraint_term_hessians(const Vector& x, Index i) const override;

  const MlpSpec& spec() const noexcept { return spec_; }
  double collocation_time(Index i) const;
  double objective_time(Index k) const;
  double residual(const Vector& x, double t) const;
  /// (1/N) sum_i residual(t_i), summed in ascending order.
  double mean_residual(const Vector& x) const;

 private:
  struct InitialRows;
  void initial_rows(const Vector& x, TaylorOutput* at_zero, double* grad_u, double* grad_v) const;

  MlpSpec spec_;
  std::vector<double> data_;  // reference solution at the objective times
  std::shared_ptr<InitialRows> initial_;
};

}  // namespace pcsm::problems
