#include "pcsm/problems.hpp"

#include "pcsm/errors.hpp"

#include <cmath>
#include <random>

namespace pcsm::problems {

namespace {

class MeanLimitProblem final : public SampledProblem {
 public:
  Index num_variables() const override { return 2; }
  Index num_constraints() const override { return 1; }
  Index num_samples() const override { return 1; }

  double objective(const Vector& x) const override { return x(0); }
  Vector objective_gradient(const Vector&) const override { return Vector::Unit(2, 0); }
  Matrix objective_hessian(const Vector&) const override { return Matrix::Zero(2, 2); }

  Vector constraint_term(const Vector& x, Index i) const override {
    check_index(i);
    Vector c(1);
    c(0) = x(0) - x(1) * x(1);
    return c;
  }
  Matrix constraint_term_jacobian(const Vector& x, Index i) const override {
    check_index(i);
    Matrix j(2, 1);
    j << 1.0, -2.0 * x(1);
    return j;
  }
  Matrix constraint_term_hessian(const Vector&, Index i, Index) const override {
    check_index(i);
    Matrix h = Matrix::Zero(2, 2);
    h(1, 1) = -2.0;
    return h;
  }
};

class LinearProbeProblem final : public SampledProblem {
 public:
  explicit LinearProbeProblem(Index n_samples) : n_samples_(n_samples) {}

  Index num_variables() const override { return 2; }
  Index num_constraints() const override { return 1; }
  Index num_samples() const override { return n_samples_; }

  double objective(const Vector& x) const override { return 0.5 * x.squaredNorm(); }
  Vector objective_gradient(const Vector& x) const override { return x; }
  Matrix objective_hessian(const Vector&) const override { return Matrix::Identity(2, 2); }

  Vector constraint_term(const Vector& x, Index i) const override {
    check_index(i);
    Vector c(1);
    c(0) = x(0) + static_cast<double>(i);
    return c;
  }
  Matrix constraint_term_jacobian(const Vector&, Index i) const override {
    check_index(i);
    Matrix j(2, 1);
    j << 1.0, 0.0;
    return j;
  }
  Matrix constraint_term_hessian(const Vector&, Index i, Index) const override {
    check_index(i);
    return Matrix::Zero(2, 2);
  }

 private:
  Index n_samples_;
};

}  // namespace

std::unique_ptr<SampledProblem> mean_limit_problem() { return std::make_unique<MeanLimitProblem>(); }

std::unique_ptr<SampledProblem> linear_probe_problem(Index n_samples) {
  return std::make_unique<LinearProbeProblem>(n_samples);
}

// --- QuadraticProbeProblem ----------------------------------------------------

QuadraticProbeProblem::QuadraticProbeProblem(Index n, Index m, Index n_samples,
                                             std::uint64_t seed)
    : m_(m) {
  if (m > n || n_samples < 1) {
    throw PcsmError(ErrorCode::InvalidArgument, "quadratic probe: need m <= n and N >= 1");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Matrix r = Matrix::NullaryExpr(n, n, [&] { return normal(rng); });
  q_ = 0.5 * (r + r.transpose());
  g_ = Vector::NullaryExpr(n, [&] { return normal(rng); });
  // A shared well-conditioned block keeps every sample average full rank.
  Matrix base = Matrix::Zero(n, m);
  for (Index j = 0; j < m; ++j) base(j, j) = 2.0;
  for (Index i = 0; i < n_samples; ++i) {
    a_.push_back(base + 0.3 * Matrix::NullaryExpr(n, m, [&] { return normal(rng); }));
    b_.push_back(Vector::NullaryExpr(m, [&] { return normal(rng); }));
  }
}

double QuadraticProbeProblem::objective(const Vector& x) const {
  return 0.5 * x.dot(q_ * x) + g_.dot(x);
}
Vector QuadraticProbeProblem::objective_gradient(const Vector& x) const { return q_ * x + g_; }
Matrix QuadraticProbeProblem::objective_hessian(const Vector&) const { return q_; }

Vector QuadraticProbeProblem::constraint_term(const Vector& x, Index i) const {
  check_index(i);
  const auto k = static_cast<std::size_t>(i);
  return a_[k].transpose() * x + b_[k];
}
Matrix QuadraticProbeProblem::constraint_term_jacobian(const Vector&, Index i) const {
  check_index(i);
  return a_[static_cast<std::size_t>(i)];
}
Matrix QuadraticProbeProblem::constraint_term_hessian(const Vector&, Index i, Index) const {
  check_index(i);
  return Matrix::Zero(q_.rows(), q_.rows());
}

Matrix QuadraticProbeProblem::mean_constraint_matrix(const SampleSet& s) const {
  Matrix sum = Matrix::Zero(q_.rows(), m_);
  for (Index i : s.indices()) sum += a_[static_cast<std::size_t>(i)];
  return sum / static_cast<double>(s.size());
}

// --- SmoothRandomProblem ------------------------------------------------------

SmoothRandomProblem::SmoothRandomProblem(Index n, Index m, Index n_samples, std::uint64_t seed)
    : n_(n), m_(m), n_samples_(n_samples) {
  if (m > n || n_samples < 1) {
    throw PcsmError(ErrorCode::InvalidArgument, "smooth probe: need m <= n and N >= 1");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  w_ = Vector::NullaryExpr(n, [&] { return normal(rng); });
  terms_.reserve(static_cast<std::size_t>(n_samples * m));
  for (Index i = 0; i < n_samples; ++i) {
    for (Index j = 0; j < m; ++j) {
      Term t;
      t.b = 0.5 * normal(rng);
      t.a = 0.3 * Vector::NullaryExpr(n, [&] { return normal(rng); });
      t.a(j) += 2.0;
      t.quad = Vector::NullaryExpr(n, [&] { return normal(rng); });
      t.u = Vector::NullaryExpr(n, [&] { return normal(rng); });
      terms_.push_back(std::move(t));
    }
  }
}

const SmoothRandomProblem::Term& SmoothRandomProblem::term(Index i, Index j) const {
  return terms_[static_cast<std::size_t>(i * m_ + j)];
}

double SmoothRandomProblem::objective(const Vector& x) const {
  return w_.dot(x.array().cos().matrix()) + 0.05 * x.squaredNorm();
}
Vector SmoothRandomProblem::objective_gradient(const Vector& x) const {
  return (-w_.array() * x.array().sin()).matrix() + 0.1 * x;
}
Matrix SmoothRandomProblem::objective_hessian(const Vector& x) const {
  Vector d = (-w_.array() * x.array().cos()).matrix();
  d.array() += 0.1;
  return d.asDiagonal();
}

Vector SmoothRandomProblem::constraint_term(const Vector& x, Index i) const {
  check_index(i);
  Vector c(m_);
  for (Index j = 0; j < m_; ++j) {
    const Term& t = term(i, j);
    c(j) = t.b + t.a.dot(x) + 0.1 * t.quad.dot(x.cwiseProduct(x)) + 0.05 * std::sin(t.u.dot(x));
  }
  return c;
}

Matrix SmoothRandomProblem::constraint_term_jacobian(const Vector& x, Index i) const {
  check_index(i);
  Matrix jac(n_, m_);
  for (Index j = 0; j < m_; ++j) {
    const Term& t = term(i, j);
    jac.col(j) = t.a + 0.2 * t.quad.cwiseProduct(x) + 0.05 * std::cos(t.u.dot(x)) * t.u;
  }
  return jac;
}

Matrix SmoothRandomProblem::constraint_term_hessian(const Vector& x, Index i, Index j) const {
  check_index(i);
  const Term& t = term(i, j);
  Matrix h = -0.05 * std::sin(t.u.dot(x)) * (t.u * t.u.transpose());
  h.diagonal() += 0.2 * t.quad;
  return h;
}

}  // namespace pcsm::problems
