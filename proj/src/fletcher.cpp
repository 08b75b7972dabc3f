#include "pcsm/fletcher.hpp"

#include "pcsm/errors.hpp"

#include <cmath>
#include <string>

namespace pcsm {

void FletcherConfig::validate() const {
  const bool ok = rho > 0.0 && grad_ls_init_step > 0.0 && curv_ls_init_step > 0.0 &&
                  armijo_c1 > 0.0 && armijo_c2 > 0.0 && backtrack_factor_grad > 0.0 &&
                  backtrack_factor_grad < 1.0 && backtrack_factor_curv > 0.0 &&
                  backtrack_factor_curv < 1.0 && grad_phase_threshold_factor > 0.0 &&
                  max_iters > 0 && fd_step > 0.0 && min_step > 0.0 &&
                  (mode != FletcherMode::ConstantStep || constant_step > 0.0);
  if (!ok) throw PcsmError(ErrorCode::InvalidArgument, "invalid FletcherConfig");
}

double fletcher_value(const PointEval& pe, double rho) {
  return pe.f + pe.c.dot(pe.y) + rho * pe.c.squaredNorm();
}

double fletcher_value(const SampledProblem& p, const SampleSet& s, const Vector& x, double rho,
                      EvalCounters& counters) {
  return fletcher_value(evaluate_point(p, s, x, counters), rho);
}

Matrix multiplier_jacobian_term(const PointEval& pe, const Matrix& hess_lxx,
                                const std::vector<Matrix>& constraint_hessians) {
  const Index n = pe.jacobian.rows();
  const Index m = pe.jacobian.cols();
  Matrix e(n, m);
  for (Index j = 0; j < m; ++j) {
    e.col(j) = constraint_hessians[static_cast<std::size_t>(j)] * pe.grad_lx;
  }
  // (J^T J)^{-1} = J^+ J^+^T for full column rank J.
  const Matrix pinv = linalg::pseudoinverse(pe.jacobian);
  return -(hess_lxx * pe.jacobian + e) * (pinv * pinv.transpose());
}

namespace {

FletcherPoint complete_point(const SampledProblem& p, const SampleSet& s, PointEval base,
                             double rho, EvalCounters& counters) {
  FletcherPoint fp;
  fp.constraint_hessians = sampled_constraint_hessians(p, s, base.x, counters);
  fp.hess_lxx = lagrangian_hessian_xx(p.objective_hessian(base.x), fp.constraint_hessians, base.y);
  fp.multiplier_jacobian = multiplier_jacobian_term(base, fp.hess_lxx, fp.constraint_hessians);
  fp.value = fletcher_value(base, rho);
  fp.gradient = base.grad_lx + fp.multiplier_jacobian * base.c + 2.0 * rho * (base.jacobian * base.c);
  fp.base = std::move(base);
  return fp;
}

void require_finite_start(const Vector& x0) {
  if (!x0.allFinite()) throw PcsmError(ErrorCode::InvalidArgument, "starting point is not finite");
}

void require_tolerances(double epsilon, double zeta) {
  if (!(epsilon > 0.0) || !(zeta > 0.0)) {
    throw PcsmError(ErrorCode::InvalidArgument, "tolerances must be positive");
  }
}

}  // namespace

Matrix multiplier_jacobian_term(const SampledProblem& p, const SampleSet& s, const Vector& x,
                                EvalCounters& counters) {
  return complete_point(p, s, evaluate_point(p, s, x, counters), 1.0, counters).multiplier_jacobian;
}

FletcherPoint evaluate_fletcher(const SampledProblem& p, const SampleSet& s, const Vector& x,
                                double rho, EvalCounters& counters) {
  return complete_point(p, s, evaluate_point(p, s, x, counters), rho, counters);
}

Vector fletcher_gradient(const SampledProblem& p, const SampleSet& s, const Vector& x, double rho,
                         EvalCounters& counters) {
  return evaluate_fletcher(p, s, x, rho, counters).gradient;
}

Vector fletcher_hessian_vec(const SampledProblem& p, const SampleSet& s, const Vector& x,
                            double rho, const Vector& v, double fd_step, EvalCounters& counters) {
  const double h = fd_step * (1.0 + x.norm());
  const Vector gp = fletcher_gradient(p, s, x + h * v, rho, counters);
  const Vector gm = fletcher_gradient(p, s, x - h * v, rho, counters);
  return (gp - gm) / (2.0 * h);
}

Matrix fletcher_hessian(const SampledProblem& p, const SampleSet& s, const Vector& x, double rho,
                        double fd_step, EvalCounters& counters) {
  const Index n = x.size();
  Matrix h(n, n);
  for (Index k = 0; k < n; ++k) {
    h.col(k) = fletcher_hessian_vec(p, s, x, rho, Vector::Unit(n, k), fd_step, counters);
  }
  return 0.5 * (h + h.transpose());
}

SolverResult solve_fletcher(const SampledProblem& p, const SampleSet& s, const Vector& x0,
                            double epsilon, double zeta, const FletcherConfig& cfg,
                            EvalCounters& counters, const IterateObserver& observer) {
  cfg.validate();
  require_tolerances(epsilon, zeta);
  require_finite_start(x0);

  SolverResult result;
  FletcherPoint cur = evaluate_fletcher(p, s, x0, cfg.rho, counters);
  StationarityReport report = certify_from(cur.base, cur.hess_lxx, epsilon, zeta);
  result.trace.push_back({0, counters.constraint_grad_evals(), report.grad_lagrangian_norm,
                          cur.value, 0.0, "start"});

  double threshold = cfg.grad_phase_threshold_factor * epsilon;
  Index iter = 0;

  while (!report.certified()) {
    if (iter >= cfg.max_iters) {
      throw PcsmError(ErrorCode::MaxIters, "Fletcher solver reached " +
                                               std::to_string(cfg.max_iters) + " iterations");
    }
    const Vector& x = cur.base.x;
    const Vector& g = cur.gradient;
    const double gnorm2 = g.squaredNorm();
    double step = 0.0;
    std::string phase;
    PointEval accepted;

    if (cfg.mode == FletcherMode::ConstantStep) {
      step = cfg.constant_step;
      phase = "constant";
      accepted = evaluate_point(p, s, x - step * g, counters);
      if (!std::isfinite(fletcher_value(accepted, cfg.rho))) {
        throw PcsmError(ErrorCode::LineSearchFailure, "constant step produced a non-finite value");
      }
    } else if (std::sqrt(gnorm2) > threshold) {
      phase = "gradient";
      double alpha = cfg.grad_ls_init_step;
      for (;;) {
        PointEval trial = evaluate_point(p, s, x - alpha * g, counters);
        const double f_trial = fletcher_value(trial, cfg.rho);
        if (std::isfinite(f_trial) && f_trial <= cur.value - cfg.armijo_c1 * alpha * gnorm2) {
          accepted = std::move(trial);
          break;
        }
        alpha *= cfg.backtrack_factor_grad;
        if (alpha < cfg.min_step) {
          throw PcsmError(ErrorCode::LineSearchFailure, "no Armijo step along -grad F");
        }
      }
      step = alpha;
    } else {
      bool curvature_step = false;
      if (!report.second_order_ok) {
        const Matrix hf = fletcher_hessian(p, s, x, cfg.rho, cfg.fd_step, counters);
        const linalg::SymmetricEigen eig = linalg::symmetric_eigen(hf);
        const double lambda = eig.values(0);
        if (lambda < 0.0) {
          Vector d = eig.vectors.col(0);
          if (g.dot(d) > 0.0) d = -d;
          const double slope = g.dot(d);
          phase = "curvature";
          double alpha = cfg.curv_ls_init_step;
          for (;;) {
            PointEval trial = evaluate_point(p, s, x + alpha * d, counters);
            const double f_trial = fletcher_value(trial, cfg.rho);
            const double decrease = alpha * slope + 0.5 * alpha * alpha * lambda;
            if (std::isfinite(f_trial) && f_trial <= cur.value + cfg.armijo_c2 * decrease) {
              accepted = std::move(trial);
              break;
            }
            alpha *= cfg.backtrack_factor_curv;
            if (alpha < cfg.min_step) {
              throw PcsmError(ErrorCode::LineSearchFailure, "no step along negative curvature");
            }
          }
          step = alpha;
          curvature_step = true;
        }
      }
      if (!curvature_step) {
        // Small grad F but not yet certified: resume descent with a tighter target.
        if (gnorm2 == 0.0) {
          throw PcsmError(ErrorCode::LineSearchFailure,
                          "grad F vanishes at a point that is not stationary");
        }
        while (std::sqrt(gnorm2) <= threshold) threshold *= 0.5;
        continue;
      }
    }

    cur = complete_point(p, s, std::move(accepted), cfg.rho, counters);
    report = certify_from(cur.base, cur.hess_lxx, epsilon, zeta);
    ++iter;
    result.trace.push_back({iter, counters.constraint_grad_evals(), report.grad_lagrangian_norm,
                            cur.value, step, phase});
    if (observer) observer(cur.base.x, counters.constraint_grad_evals());
  }

  result.x = cur.base.x;
  result.report = report;
  result.iterations = iter;
  return result;
}

}  // namespace pcsm
