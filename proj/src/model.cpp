#include "pcsm/model.hpp"

#include "pcsm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pcsm {

std::vector<Matrix> SampledProblem::constraint_term_hessians(const Vector& x, Index i) const {
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(num_constraints()));
  for (Index j = 0; j < num_constraints(); ++j) out.push_back(constraint_term_hessian(x, i, j));
  return out;
}

void SampledProblem::check_index(Index i) const {
  if (i < 0 || i >= num_samples()) {
    throw PcsmError(ErrorCode::IndexOutOfRange,
                    "sample index " + std::to_string(i) + " outside [0, " +
                        std::to_string(num_samples()) + ")");
  }
}

SampleSet::SampleSet(std::vector<Index> indices) : indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end()) {
    throw PcsmError(ErrorCode::InvalidArgument, "sample set contains duplicate indices");
  }
}

SampleSet SampleSet::full(Index n_samples) {
  std::vector<Index> idx(static_cast<std::size_t>(n_samples));
  for (Index i = 0; i < n_samples; ++i) idx[static_cast<std::size_t>(i)] = i;
  return SampleSet(std::move(idx));
}

bool SampleSet::contains(Index i) const {
  return std::binary_search(indices_.begin(), indices_.end(), i);
}

bool SampleSet::is_subset_of(const SampleSet& other) const {
  return std::includes(other.indices_.begin(), other.indices_.end(), indices_.begin(),
                       indices_.end());
}

EvalSnapshot EvalCounters::snapshot() const {
  return {constraint_grad_.load(), constraint_value_.load(), objective_grad_.load(),
          constraint_hess_.load()};
}

namespace {

void require_nonempty(const SampleSet& s) {
  if (s.empty()) throw PcsmError(ErrorCode::EmptySample, "sample set is empty");
}

}  // namespace

Vector sampled_constraint(const SampledProblem& p, const SampleSet& s, const Vector& x,
                          EvalCounters& counters) {
  require_nonempty(s);
  Vector sum = Vector::Zero(p.num_constraints());
  for (Index i : s.indices()) sum += p.constraint_term(x, i);
  counters.add_constraint_value(static_cast<std::uint64_t>(s.size()));
  return sum / static_cast<double>(s.size());
}

Matrix sampled_jacobian(const SampledProblem& p, const SampleSet& s, const Vector& x,
                        EvalCounters& counters) {
  require_nonempty(s);
  Matrix sum = Matrix::Zero(p.num_variables(), p.num_constraints());
  for (Index i : s.indices()) sum += p.constraint_term_jacobian(x, i);
  counters.add_constraint_grad(static_cast<std::uint64_t>(s.size()));
  return sum / static_cast<double>(s.size());
}

std::vector<Matrix> sampled_constraint_hessians(const SampledProblem& p, const SampleSet& s,
                                                const Vector& x, EvalCounters& counters) {
  require_nonempty(s);
  const Index n = p.num_variables();
  const Index m = p.num_constraints();
  std::vector<Matrix> sum(static_cast<std::size_t>(m), Matrix::Zero(n, n));
  for (Index i : s.indices()) {
    const std::vector<Matrix> term = p.constraint_term_hessians(x, i);
    for (Index j = 0; j < m; ++j) sum[static_cast<std::size_t>(j)] += term[static_cast<std::size_t>(j)];
  }
  counters.add_constraint_hess(static_cast<std::uint64_t>(s.size() * m));
  const double inv = 1.0 / static_cast<double>(s.size());
  for (Matrix& h : sum) h *= inv;
  return sum;
}

Vector least_squares_multipliers(const Matrix& jacobian, const Vector& grad_f) {
  return -(linalg::pseudoinverse(jacobian) * grad_f);
}

Vector least_squares_multipliers(const SampledProblem& p, const SampleSet& s, const Vector& x,
                                 EvalCounters& counters) {
  const Matrix jac = sampled_jacobian(p, s, x, counters);
  counters.add_objective_grad(1);
  return least_squares_multipliers(jac, p.objective_gradient(x));
}

Vector lagrangian_gradient(const SampledProblem& p, const SampleSet& s, const Vector& x,
                           const Vector& y, EvalCounters& counters) {
  const Index n = p.num_variables();
  const Index m = p.num_constraints();
  Vector out(n + m);
  counters.add_objective_grad(1);
  out.head(n) = p.objective_gradient(x) + sampled_jacobian(p, s, x, counters) * y;
  out.tail(m) = sampled_constraint(p, s, x, counters);
  return out;
}

Matrix lagrangian_hessian_xx(const Matrix& objective_hessian,
                             const std::vector<Matrix>& constraint_hessians, const Vector& y) {
  Matrix h = objective_hessian;
  for (std::size_t j = 0; j < constraint_hessians.size(); ++j) {
    h += y(static_cast<Index>(j)) * constraint_hessians[j];
  }
  return h;
}

Matrix lagrangian_hessian_xx(const SampledProblem& p, const SampleSet& s, const Vector& x,
                             const Vector& y, EvalCounters& counters) {
  return lagrangian_hessian_xx(p.objective_hessian(x),
                               sampled_constraint_hessians(p, s, x, counters), y);
}

double PointEval::grad_lagrangian_norm() const {
  return std::sqrt(grad_lx.squaredNorm() + c.squaredNorm());
}

PointEval evaluate_point(const SampledProblem& p, const SampleSet& s, const Vector& x,
                         EvalCounters& counters) {
  PointEval pe;
  pe.x = x;
  pe.f = p.objective(x);
  pe.grad_f = p.objective_gradient(x);
  counters.add_objective_grad(1);
  pe.c = sampled_constraint(p, s, x, counters);
  pe.jacobian = sampled_jacobian(p, s, x, counters);
  pe.y = least_squares_multipliers(pe.jacobian, pe.grad_f);
  pe.grad_lx = pe.grad_f + pe.jacobian * pe.y;
  return pe;
}

StationarityReport certify_first_order(const PointEval& pe, double epsilon, double zeta) {
  StationarityReport r;
  r.epsilon = epsilon;
  r.zeta = zeta;
  r.grad_lagrangian_norm = pe.grad_lagrangian_norm();
  r.first_order_ok = r.grad_lagrangian_norm <= epsilon;
  r.reduced_hess_min_eig = std::numeric_limits<double>::quiet_NaN();
  r.second_order_ok = false;
  return r;
}

StationarityReport certify_from(const PointEval& pe, const Matrix& hess_lxx, double epsilon,
                                double zeta) {
  StationarityReport r = certify_first_order(pe, epsilon, zeta);
  const Matrix z = linalg::nullspace_basis(pe.jacobian.transpose());
  r.reduced_hess_min_eig = linalg::reduced_hessian_min_eig(hess_lxx, z);
  r.second_order_ok = r.reduced_hess_min_eig >= -zeta;
  return r;
}

StationarityReport certify_stationarity(const SampledProblem& p, const SampleSet& s,
                                        const Vector& x, double epsilon, double zeta,
                                        EvalCounters& counters) {
  if (!(epsilon > 0.0) || !(zeta > 0.0)) {
    throw PcsmError(ErrorCode::InvalidArgument, "certify_stationarity: tolerances must be positive");
  }
  const PointEval pe = evaluate_point(p, s, x, counters);
  const Matrix h = lagrangian_hessian_xx(p, s, x, pe.y, counters);
  return certify_from(pe, h, epsilon, zeta);
}

}  // namespace pcsm
