#pragma once

// Problem abstraction for equality-constrained programs whose constraint is an
// average of N terms, c(x) = (1/N) sum_i c_i(x), together with the sampled
// quantities, least-squares multipliers and stationarity certification built
// on top of it.

#include "pcsm/linalg.hpp"

#include <atomic>
#include <cstdint>
#include <limits>
#include <vector>

namespace pcsm {

/// A problem min f(x) s.t. (1/N) sum_i c_i(x) = 0 with c_i : R^n -> R^m.
///
/// Sample indices are zero-based, 0 <= i < N. Jacobians are stored n x m, i.e.
/// column j is the gradient of the j-th component. Implementations must be
/// pure: evaluation may happen concurrently from several threads.
class SampledProblem {
 public:
  virtual ~SampledProblem() = default;

  virtual Index num_variables() const = 0;    // n
  virtual Index num_constraints() const = 0;  // m
  virtual Index num_samples() const = 0;      // N

  virtual double objective(const Vector& x) const = 0;
  virtual Vector objective_gradient(const Vector& x) const = 0;
  virtual Matrix objective_hessian(const Vector& x) const = 0;

  virtual Vector constraint_term(const Vector& x, Index i) const = 0;
  virtual Matrix constraint_term_jacobian(const Vector& x, Index i) const = 0;
  virtual Matrix constraint_term_hessian(const Vector& x, Index i, Index j) const = 0;

  /// All m component Hessians of c_i. Override when they share work.
  virtual std::vector<Matrix> constraint_term_hessians(const Vector& x, Index i) const;

 protected:
  void check_index(Index i) const;
};

/// Ordered set of distinct sample indices. Stored ascending, which fixes the
/// summation order of every sample average.
class SampleSet {
 public:
  SampleSet() = default;
  explicit SampleSet(std::vector<Index> indices);

  static SampleSet full(Index n_samples);

  const std::vector<Index>& indices() const noexcept { return indices_; }
  Index size() const noexcept { return static_cast<Index>(indices_.size()); }
  bool empty() const noexcept { return indices_.empty(); }
  bool contains(Index i) const;
  bool is_subset_of(const SampleSet& other) const;

  friend bool operator==(const SampleSet&, const SampleSet&) = default;

 private:
  std::vector<Index> indices_;
};

/// Plain copy of the evaluation ledger at one instant.
struct EvalSnapshot {
  std::uint64_t constraint_grad_evals = 0;
  std::uint64_t constraint_value_evals = 0;
  std::uint64_t objective_grad_evals = 0;
  std::uint64_t constraint_hess_evals = 0;
};

/// Evaluation ledger. The headline cost unit is one evaluation of one
/// constraint-term gradient; the other counters are diagnostics.
class EvalCounters {
 public:
  EvalCounters() = default;
  EvalCounters(const EvalCounters&) = delete;
  EvalCounters& operator=(const EvalCounters&) = delete;

  void add_constraint_grad(std::uint64_t k) { constraint_grad_.fetch_add(k, std::memory_order_relaxed); }
  void add_constraint_value(std::uint64_t k) { constraint_value_.fetch_add(k, std::memory_order_relaxed); }
  void add_objective_grad(std::uint64_t k) { objective_grad_.fetch_add(k, std::memory_order_relaxed); }
  void add_constraint_hess(std::uint64_t k) { constraint_hess_.fetch_add(k, std::memory_order_relaxed); }

  std::uint64_t constraint_grad_evals() const { return constraint_grad_.load(); }
  EvalSnapshot snapshot() const;

 private:
  std::atomic<std::uint64_t> constraint_grad_{0};
  std::atomic<std::uint64_t> constraint_value_{0};
  std::atomic<std::uint64_t> objective_grad_{0};
  std::atomic<std::uint64_t> constraint_hess_{0};
};

struct StationarityReport {
  double grad_lagrangian_norm = 0.0;
  double reduced_hess_min_eig = linalg::kEmptyNullSpace;
  double epsilon = 0.0;
  double zeta = 0.0;
  bool first_order_ok = false;
  bool second_order_ok = false;

  bool certified() const { return first_order_ok && second_order_ok; }
};

// --- sampled quantities -----------------------------------------------------

/// c_S(x). Adds |S| to constraint_value_evals.
Vector sampled_constraint(const SampledProblem& p, const SampleSet& s, const Vector& x,
                          EvalCounters& counters);

/// grad c_S(x), n x m. Adds |S| to constraint_grad_evals.
Matrix sampled_jacobian(const SampledProblem& p, const SampleSet& s, const Vector& x,
                        EvalCounters& counters);

/// Component Hessians of c_S(x). Adds |S| * m to constraint_hess_evals.
std::vector<Matrix> sampled_constraint_hessians(const SampledProblem& p, const SampleSet& s,
                                                const Vector& x, EvalCounters& counters);

/// y_S(x) = -grad c_S(x)^+ grad f(x).
Vector least_squares_multipliers(const SampledProblem& p, const SampleSet& s, const Vector& x,
                                 EvalCounters& counters);
Vector least_squares_multipliers(const Matrix& jacobian, const Vector& grad_f);

/// (grad f + grad c_S y ; c_S), length n + m.
Vector lagrangian_gradient(const SampledProblem& p, const SampleSet& s, const Vector& x,
                           const Vector& y, EvalCounters& counters);

/// grad^2 f + sum_j y_j grad^2 [c_S]_j.
Matrix lagrangian_hessian_xx(const SampledProblem& p, const SampleSet& s, const Vector& x,
                             const Vector& y, EvalCounters& counters);
Matrix lagrangian_hessian_xx(const Matrix& objective_hessian,
                             const std::vector<Matrix>& constraint_hessians, const Vector& y);

// --- first-order data at a point --------------------------------------------

/// Sampled first-order data at x, evaluated once and reused by the solvers so
/// that no constraint gradient is paid for twice.
struct PointEval {
  Vector x;
  double f = 0.0;
  Vector grad_f;
  Vector c;
  Matrix jacobian;   // n x m
  Vector y;          // least-squares multipliers
  Vector grad_lx;    // grad f + jacobian * y

  double grad_lagrangian_norm() const;
};

/// Evaluates f, grad f, c_S, grad c_S and y_S at x. Throws RankDeficient.
PointEval evaluate_point(const SampledProblem& p, const SampleSet& s, const Vector& x,
                         EvalCounters& counters);

/// First-order only certification; the second-order field is left unevaluated
/// (NaN) and second_order_ok is false.
StationarityReport certify_first_order(const PointEval& pe, double epsilon, double zeta);

/// Full certification from precomputed first-order data and the Lagrangian Hessian.
StationarityReport certify_from(const PointEval& pe, const Matrix& hess_lxx, double epsilon,
                                double zeta);

/// (epsilon, zeta)-stationarity of (x, y_S(x)) for the subsampled problem.
StationarityReport certify_stationarity(const SampledProblem& p, const SampleSet& s,
                                        const Vector& x, double epsilon, double zeta,
                                        EvalCounters& counters);

}  // namespace pcsm
