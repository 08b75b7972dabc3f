#include "pcsm/theory.hpp"

#include "pcsm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

namespace pcsm::theory {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Smallest s in [1, N] with xi(N, s) <= bound; xi is strictly decreasing in s.
Index smallest_sample_with_xi_below(Index n_samples, double bound) {
  Index lo = 1;
  Index hi = n_samples;  // xi(N, N) = 0 always qualifies
  while (lo < hi) {
    const Index mid = lo + (hi - lo) / 2;
    if (xi(n_samples, mid) <= bound) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

double acute_style_threshold(Index n_samples, double sigma_min, double dispersion) {
  const double ratio = 4.0 * sigma_min * sigma_min / dispersion;  // +inf when dispersion = 0
  return 2.0 * static_cast<double>(n_samples) / (1.0 + std::sqrt(1.0 + ratio));
}

}  // namespace

void ProblemConstants::validate() const {
  const bool ok = sigma_min > 0.0 && kappa_grad_f >= 0.0 && kappa_grad_c >= 0.0 &&
                  kappa_hess_f >= 0.0 && kappa_hess_c >= 0.0 && gamma_c >= 0.0 &&
                  gamma_grad_c >= 0.0 && gamma_hess_c >= 0.0 && alpha > 0.0 && beta > 0.0 &&
                  m >= 1 && n_samples >= 1;
  if (!ok) throw PcsmError(ErrorCode::InvalidArgument, "invalid ProblemConstants");
}

double xi(Index n_samples, Index sample_size) {
  if (sample_size < 1 || sample_size > n_samples) {
    throw PcsmError(ErrorCode::InvalidArgument, "xi: need 1 <= s <= N");
  }
  const double n = static_cast<double>(n_samples);
  const double s = static_cast<double>(sample_size);
  return std::sqrt(n * (n - s) / (s * s));
}

Kappas kappas(const ProblemConstants& c) {
  c.validate();
  Kappas k;
  k.kappa1 = std::sqrt(c.gamma_grad_c) * c.kappa_grad_c / c.sigma_min;
  k.kappa2 = std::sqrt(c.gamma_c + c.kappa_grad_f * c.kappa_grad_f * k.kappa1 * k.kappa1);
  k.kappa3 = 3.0 * c.kappa_hess_f * k.kappa1 +
             std::sqrt(static_cast<double>(c.m)) *
                 (5.0 * c.kappa_grad_f * c.kappa_hess_c / (2.0 * c.sigma_min)) *
                 (3.0 * k.kappa1 + std::sqrt(c.gamma_hess_c));
  return k;
}

Taus taus(const ProblemConstants& c) {
  const Kappas k = kappas(c);
  Taus t;
  t.tau1 = k.kappa2;
  t.tau2 = (c.kappa_hess_f +
            std::sqrt(static_cast<double>(c.m)) * c.kappa_grad_f * c.kappa_hess_c / c.sigma_min) *
           k.kappa1;
  return t;
}

MorseMargins morse_margins(const ProblemConstants& c, double xi_value) {
  if (!(xi_value >= 0.0)) throw PcsmError(ErrorCode::InvalidArgument, "xi must be nonnegative");
  const Kappas k = kappas(c);
  MorseMargins mm;
  mm.alpha_s = c.alpha - xi_value * k.kappa2;
  mm.beta_s = (1.0 - k.kappa1 * xi_value / 3.0) * c.beta - k.kappa3 * xi_value;
  mm.alpha_ok = mm.alpha_s >= 0.5 * c.alpha;
  mm.beta_ok = mm.beta_s >= 0.5 * c.beta;
  return mm;
}

SampleSizeThresholds min_sample_sizes(const ProblemConstants& c) {
  const Kappas k = kappas(c);
  const double dispersion = c.gamma_grad_c * c.kappa_grad_c * c.kappa_grad_c;
  SampleSizeThresholds t;
  t.acute = acute_style_threshold(c.n_samples, c.sigma_min, dispersion);
  t.multiplier = acute_style_threshold(c.n_samples, c.sigma_min, 9.0 * dispersion);
  const double inv3k1 = 1.0 / (3.0 * k.kappa1);
  const double morse_bound =
      std::min({inv3k1, c.alpha / (2.0 * k.kappa2), 7.0 * c.beta / (18.0 * k.kappa3)});
  const double warm_bound =
      std::min({inv3k1, c.alpha / (4.0 * k.kappa2), 2.0 * c.beta / (9.0 * k.kappa3)});
  t.morse = smallest_sample_with_xi_below(c.n_samples, morse_bound);
  t.warm_start = smallest_sample_with_xi_below(c.n_samples, warm_bound);
  return t;
}

FletcherConstants fletcher_constants(double kappa_s, double sigma_min, double beta_s, Index m,
                                     double m_bar, double r) {
  if (!(kappa_s > 0.0) || !(sigma_min > 0.0) || !(beta_s > 0.0) || m < 1) {
    throw PcsmError(ErrorCode::InvalidArgument, "fletcher_constants: invalid inputs");
  }
  const double md = static_cast<double>(m);
  const double s2 = sigma_min * sigma_min;
  FletcherConstants fc;
  fc.kappa_s = kappa_s;
  fc.sigma_min = sigma_min;
  fc.beta_s = beta_s;
  fc.m = m;
  fc.m_bar = m_bar;
  fc.r = r;
  fc.eta1 = (2.0 * std::sqrt(md) / sigma_min + md) * kappa_s;
  fc.eta2 = 2.0 * md * kappa_s;
  fc.eta3 = 0.5 * beta_s * s2 / (fc.eta1 * s2 + 0.5 * beta_s * fc.eta2);
  fc.eta4 = fc.eta1 * fc.eta3 + (1.0 + md * kappa_s) * kappa_s;
  fc.eps_bar = 0.5 * beta_s * s2 / (fc.eta1 * s2 + 0.5 * beta_s * fc.eta2 + fc.eta2 * fc.eta4);
  return fc;
}

RhoInterval fletcher_rho_interval(const FletcherConstants& fc, double beta_s, double epsilon) {
  if (!(epsilon >= 0.0) || !(epsilon < fc.eps_bar)) {
    throw PcsmError(ErrorCode::EpsilonOutOfRange, "epsilon must lie in [0, eps_bar)");
  }
  RhoInterval out;
  const double s2 = fc.sigma_min * fc.sigma_min;
  out.rho_lo = (0.5 * beta_s + fc.eta4) / (2.0 * s2 - fc.eta2 * epsilon);
  const double denom = fc.eta2 * epsilon;
  if (denom == 0.0) {
    out.rho_hi = kInf;
    out.hi_unbounded = true;
  } else {
    out.rho_hi = (0.5 * beta_s - fc.eta1 * epsilon) / denom;
  }
  return out;
}

ComplexityBounds complexity_bounds(const ComplexityInputs& in) {
  const bool ok = in.n_samples >= 1 && in.first_sample_size >= 1 &&
                  in.first_sample_size <= in.n_samples && in.eps1 > 0.0 && in.zeta1 > 0.0 &&
                  in.eps > 0.0 && in.zeta > 0.0 && in.u1 > 0.0 && in.u2 > 0.0 &&
                  in.omega_bar > 0.0 && in.tau1 > 0.0 && in.kappa1 > 0.0;
  if (!ok) throw PcsmError(ErrorCode::InvalidArgument, "complexity_bounds: invalid inputs");
  const double n = static_cast<double>(in.n_samples);
  const double s1 = static_cast<double>(in.first_sample_size);
  const auto solver_iters = [&](double eps, double zeta) {
    return std::ceil(std::max(in.u1 / (eps * eps), in.u2 / (zeta * zeta * zeta)));
  };
  ComplexityBounds b;
  b.one_shot = n * solver_iters(in.eps, in.zeta);
  const double middle =
      std::ceil(0.5 * std::log2(180.0 * in.omega_bar * in.omega_bar * (1.0 + n / 2.0)));
  const double last =
      std::ceil(std::log2(std::sqrt(5.0) * in.omega_bar * in.tau1 / (in.kappa1 * in.eps)));
  b.progressive = s1 * solver_iters(in.eps1, in.zeta1) + (n - 2.0 * s1) * middle + n * last;
  return b;
}

MorseGrid morse_scan(const SampledProblem& p, const SampleSet& s, const GridSpec& grid,
                     double eps_level, unsigned threads) {
  if (p.num_variables() != 2) {
    throw PcsmError(ErrorCode::InvalidArgument, "morse_scan needs a two-dimensional problem");
  }
  if (grid.resolution < 1) throw PcsmError(ErrorCode::InvalidArgument, "grid resolution < 1");
  const Index res = grid.resolution;
  const auto coord = [&](int axis, Index k) {
    if (res == 1) return 0.5 * (grid.lo[axis] + grid.hi[axis]);
    return grid.lo[axis] + (grid.hi[axis] - grid.lo[axis]) * static_cast<double>(k) /
                               static_cast<double>(res - 1);
  };

  MorseGrid out;
  out.eps_level = eps_level;
  out.points.resize(static_cast<std::size_t>(res * res));

  const auto evaluate = [&](Index begin, Index end) {
    EvalCounters scratch;
    for (Index idx = begin; idx < end; ++idx) {
      MorsePoint& mp = out.points[static_cast<std::size_t>(idx)];
      mp.x1 = coord(0, idx / res);
      mp.x2 = coord(1, idx % res);
      Vector x(2);
      x << mp.x1, mp.x2;
      try {
        const PointEval pe = evaluate_point(p, s, x, scratch);
        const Matrix h = lagrangian_hessian_xx(p, s, x, pe.y, scratch);
        const Matrix z = linalg::nullspace_basis(pe.jacobian.transpose());
        const Vector eig = linalg::reduced_hessian_eigenvalues(h, z);
        mp.grad_l_norm = pe.grad_lagrangian_norm();
        if (eig.size() == 0) {
          mp.lambda_min = kInf;
          mp.lambda_min_abs = kInf;
        } else {
          mp.lambda_min = eig(0);
          mp.lambda_min_abs = eig.cwiseAbs().minCoeff();
        }
      } catch (const PcsmError& e) {
        if (e.code() != ErrorCode::RankDeficient) throw;
        mp.rank_ok = false;
        mp.grad_l_norm = std::numeric_limits<double>::quiet_NaN();
        mp.lambda_min = std::numeric_limits<double>::quiet_NaN();
        mp.lambda_min_abs = std::numeric_limits<double>::quiet_NaN();
      }
    }
  };

  const Index total = res * res;
  unsigned n_threads = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  n_threads = static_cast<unsigned>(std::min<Index>(n_threads, total));
  if (n_threads <= 1) {
    evaluate(0, total);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(n_threads);
    const Index chunk = (total + n_threads - 1) / n_threads;
    for (unsigned t = 0; t < n_threads; ++t) {
      const Index begin = std::min<Index>(total, t * chunk);
      const Index end = std::min<Index>(total, begin + chunk);
      pool.emplace_back([&, t, begin, end] {
        try {
          evaluate(begin, end);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  out.min_lambda = kInf;
  for (const MorsePoint& mp : out.points) {
    if (mp.rank_ok && mp.grad_l_norm <= eps_level) {
      ++out.qualifying;
      out.min_lambda = std::min(out.min_lambda, mp.lambda_min_abs);
    }
  }
  return out;
}

}  // namespace pcsm::theory
