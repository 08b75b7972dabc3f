#include "pcsm/gradcheck.hpp"

#include "pcsm/fletcher.hpp"

#include <algorithm>
#include <cmath>

namespace pcsm::gradcheck {

Vector fd_gradient(const std::function<double(const Vector&)>& fn, const Vector& x, double h) {
  Vector g(x.size());
  Vector xp = x;
  for (Index k = 0; k < x.size(); ++k) {
    const double step = h * (1.0 + std::abs(x(k)));
    xp(k) = x(k) + step;
    const double fp = fn(xp);
    xp(k) = x(k) - step;
    const double fm = fn(xp);
    xp(k) = x(k);
    g(k) = (fp - fm) / (2.0 * step);
  }
  return g;
}

Matrix fd_jacobian(const std::function<Vector(const Vector&)>& fn, const Vector& x, double h) {
  Matrix jac;
  Vector xp = x;
  for (Index k = 0; k < x.size(); ++k) {
    const double step = h * (1.0 + std::abs(x(k)));
    xp(k) = x(k) + step;
    const Vector fp = fn(xp);
    xp(k) = x(k) - step;
    const Vector fm = fn(xp);
    xp(k) = x(k);
    if (k == 0) jac.resize(x.size(), fp.size());
    jac.row(k) = ((fp - fm) / (2.0 * step)).transpose();
  }
  return jac;
}

double relative_error(const Matrix& analytic, const Matrix& reference) {
  return (analytic - reference).norm() / (1.0 + analytic.norm());
}

double Report::max_error() const {
  return std::max({objective_gradient, objective_hessian, constraint_jacobian, constraint_hessian,
                   fletcher_gradient, multiplier_jacobian});
}

Report check_problem(const SampledProblem& p, const SampleSet& s,
                     const std::vector<Vector>& points, const Options& opts) {
  Report r;
  std::vector<Index> terms = opts.term_indices;
  if (terms.empty()) {
    for (Index i = 0; i < std::min<Index>(p.num_samples(), 8); ++i) terms.push_back(i);
  }
  const double h = opts.step;
  // Second derivatives are differenced from analytic first derivatives with a
  // larger step to balance truncation against cancellation.
  const double h2 = std::sqrt(h) * 1e-2;

  for (const Vector& x : points) {
    ++r.points;
    const auto f = [&](const Vector& z) { return p.objective(z); };
    r.objective_gradient =
        std::max(r.objective_gradient, relative_error(p.objective_gradient(x), fd_gradient(f, x, h)));
    if (opts.check_hessians) {
      const auto g = [&](const Vector& z) { return p.objective_gradient(z); };
      r.objective_hessian =
          std::max(r.objective_hessian, relative_error(p.objective_hessian(x), fd_jacobian(g, x, h2)));
    }
    for (Index i : terms) {
      const auto ci = [&](const Vector& z) { return p.constraint_term(z, i); };
      r.constraint_jacobian = std::max(
          r.constraint_jacobian, relative_error(p.constraint_term_jacobian(x, i), fd_jacobian(ci, x, h)));
      if (opts.check_hessians) {
        const std::vector<Matrix> hs = p.constraint_term_hessians(x, i);
        for (Index j = 0; j < p.num_constraints(); ++j) {
          const auto col = [&](const Vector& z) -> Vector {
            return p.constraint_term_jacobian(z, i).col(j);
          };
          r.constraint_hessian =
              std::max(r.constraint_hessian,
                       relative_error(hs[static_cast<std::size_t>(j)], fd_jacobian(col, x, h2)));
        }
      }
    }
    if (opts.check_fletcher) {
      EvalCounters scratch;
      const auto fval = [&](const Vector& z) { return fletcher_value(p, s, z, opts.rho, scratch); };
      r.fletcher_gradient =
          std::max(r.fletcher_gradient, relative_error(fletcher_gradient(p, s, x, opts.rho, scratch),
                                                       fd_gradient(fval, x, h)));
      const auto ys = [&](const Vector& z) { return least_squares_multipliers(p, s, z, scratch); };
      r.multiplier_jacobian =
          std::max(r.multiplier_jacobian, relative_error(multiplier_jacobian_term(p, s, x, scratch),
                                                         fd_jacobian(ys, x, h)));
    }
  }
  return r;
}

}  // namespace pcsm::gradcheck
