#include "pcsm/problems.hpp"

#include "pcsm/errors.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace pcsm::problems {

ArtificialProblem::ArtificialProblem(const ArtificialProblemSpec& spec) : spec_(spec) {
  if (spec.n_samples < 1 || !(spec.a > 0.0) || !(spec.phi > 0.0)) {
    throw PcsmError(ErrorCode::InvalidArgument, "artificial problem: invalid spec");
  }
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> dist(-std::numbers::pi, std::numbers::pi);
  omega_.resize(static_cast<std::size_t>(spec.n_samples));
  for (auto& w : omega_) {
    w[0] = dist(rng);
    w[1] = dist(rng);
  }
}

const std::array<double, 2>& ArtificialProblem::omega(Index i) const {
  check_index(i);
  return omega_[static_cast<std::size_t>(i)];
}

double ArtificialProblem::objective(const Vector& x) const { return x(0); }

Vector ArtificialProblem::objective_gradient(const Vector&) const { return Vector::Unit(2, 0); }

Matrix ArtificialProblem::objective_hessian(const Vector&) const { return Matrix::Zero(2, 2); }

double artificial_constraint_term(const ArtificialProblem& p, const Vector& x, Index i) {
  const auto& w = p.omega(i);
  const double a = p.spec().a;
  const double phi = p.spec().phi;
  return x(0) - x(1) * x(1) + a * std::sin(phi * x(0) + w[0]) + a * std::cos(phi * x(1) + w[1]);
}

Vector ArtificialProblem::constraint_term(const Vector& x, Index i) const {
  Vector c(1);
  c(0) = artificial_constraint_term(*this, x, i);
  return c;
}

Matrix ArtificialProblem::constraint_term_jacobian(const Vector& x, Index i) const {
  const auto& w = omega(i);
  const double a = spec_.a;
  const double phi = spec_.phi;
  Matrix j(2, 1);
  j(0, 0) = 1.0 + a * phi * std::cos(phi * x(0) + w[0]);
  j(1, 0) = -2.0 * x(1) - a * phi * std::sin(phi * x(1) + w[1]);
  return j;
}

Matrix ArtificialProblem::constraint_term_hessian(const Vector& x, Index i, Index j) const {
  if (j != 0) throw PcsmError(ErrorCode::IndexOutOfRange, "artificial problem has m = 1");
  const auto& w = omega(i);
  const double a = spec_.a;
  const double phi = spec_.phi;
  Matrix h = Matrix::Zero(2, 2);
  h(0, 0) = -a * phi * phi * std::sin(phi * x(0) + w[0]);
  h(1, 1) = -2.0 - a * phi * phi * std::cos(phi * x(1) + w[1]);
  return h;
}

}  // namespace pcsm::problems
