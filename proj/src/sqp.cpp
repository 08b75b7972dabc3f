#include "pcsm/sqp.hpp"

#include "pcsm/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace pcsm {

void SqpConfig::validate() const {
  const bool ok = alpha_init > 0.0 && nu > 0.0 && nu < 1.0 && sigma > 0.0 && sigma < 1.0 &&
                  eta > 0.0 && eta < 1.0 && tau_init > 0.0 && backtrack_factor > 0.0 &&
                  backtrack_factor < 1.0 && max_iters > 0 && merit_tau_min > 0.0 &&
                  merit_tau_min <= tau_init && min_step > 0.0;
  if (!ok) throw PcsmError(ErrorCode::InvalidArgument, "invalid SqpConfig");
}

SqpStep sqp_step(const PointEval& pe, const Vector& y) {
  const Matrix& j = pe.jacobian;
  // Range-space elimination of the identity-Hessian saddle system:
  //   J^T J (y + delta) = J^T (-grad f) + c   and   d = -grad f - J (y + delta).
  const Matrix pinv = linalg::pseudoinverse(j);  // throws RankDeficient
  const Vector y_new = pinv * (-pe.grad_f) + pinv * pinv.transpose() * pe.c;
  SqpStep step;
  step.d = -pe.grad_f - j * y_new;
  step.delta_y = y_new - y;
  return step;
}

SqpStep sqp_step(const SampledProblem& p, const SampleSet& s, const Vector& x, const Vector& y,
                 EvalCounters& counters) {
  return sqp_step(evaluate_point(p, s, x, counters), y);
}

namespace {

double merit(double tau, double f, const Vector& c) { return tau * f + c.lpNorm<1>(); }

}  // namespace

SolverResult solve_sqp(const SampledProblem& p, const SampleSet& s, const Vector& x0,
                       double epsilon, double zeta, const SqpConfig& cfg, EvalCounters& counters,
                       const IterateObserver& observer) {
  cfg.validate();
  if (!(epsilon > 0.0) || !(zeta > 0.0)) {
    throw PcsmError(ErrorCode::InvalidArgument, "tolerances must be positive");
  }
  if (!x0.allFinite()) throw PcsmError(ErrorCode::InvalidArgument, "starting point is not finite");

  SolverResult result;
  PointEval cur = evaluate_point(p, s, x0, counters);
  Vector y = cur.y;
  double tau = cfg.tau_init;
  StationarityReport report = certify_first_order(cur, epsilon, zeta);
  result.trace.push_back({0, counters.constraint_grad_evals(), report.grad_lagrangian_norm,
                          merit(tau, cur.f, cur.c), 0.0, "start"});

  Index iter = 0;
  while (!report.first_order_ok) {
    if (iter >= cfg.max_iters) {
      throw PcsmError(ErrorCode::MaxIters,
                      "SQP solver reached " + std::to_string(cfg.max_iters) + " iterations");
    }
    const SqpStep step = sqp_step(cur, y);
    const Vector& d = step.d;

    // Penalty update from the identity-model reduction.
    const double c_l1 = cur.c.lpNorm<1>();
    const double curvature = cur.grad_f.dot(d) + d.squaredNorm();
    double tau_trial = std::numeric_limits<double>::infinity();
    if (curvature > 0.0) tau_trial = (1.0 - cfg.sigma) * c_l1 / curvature;
    if (tau > tau_trial) tau = std::max(std::min(cfg.nu * tau, tau_trial), cfg.merit_tau_min);

    // Linearized l1 merit reduction; J^T d = -c makes the constraint model vanish.
    const double model_reduction = -tau * cur.grad_f.dot(d) + c_l1;
    const double phi0 = merit(tau, cur.f, cur.c);

    double alpha = cfg.alpha_init;
    double phi_trial = 0.0;
    Vector x_trial;
    for (;;) {
      x_trial = cur.x + alpha * d;
      const double f_trial = p.objective(x_trial);
      const Vector c_trial = sampled_constraint(p, s, x_trial, counters);
      phi_trial = merit(tau, f_trial, c_trial);
      if (std::isfinite(phi_trial) && phi_trial <= phi0 - cfg.eta * alpha * model_reduction) break;
      alpha *= cfg.backtrack_factor;
      if (alpha < cfg.min_step) {
        throw PcsmError(ErrorCode::LineSearchFailure, "no Armijo step on the l1 merit");
      }
    }

    y += alpha * step.delta_y;
    cur = evaluate_point(p, s, x_trial, counters);
    report = certify_first_order(cur, epsilon, zeta);
    ++iter;
    result.trace.push_back({iter, counters.constraint_grad_evals(), report.grad_lagrangian_norm,
                            phi_trial, alpha, "sqp"});
    if (observer) observer(cur.x, counters.constraint_grad_evals());
  }

  if (cfg.report_second_order) {
    // Logged only; kept off the caller's ledger since this solver is first order.
    EvalCounters logging;
    const Matrix h = lagrangian_hessian_xx(p, s, cur.x, cur.y, logging);
    report = certify_from(cur, h, epsilon, zeta);
  }
  result.x = cur.x;
  result.report = report;
  result.iterations = iter;
  return result;
}

}  // namespace pcsm
