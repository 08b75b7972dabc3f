#include "pcsm/driver.hpp"

#include "pcsm/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace pcsm {

std::vector<Index> sample_schedule(Index n_samples, Index p1, bool grow_to_full) {
  if (p1 < 1 || p1 > n_samples) {
    throw PcsmError(ErrorCode::InvalidArgument, "sample_schedule: need 1 <= p1 <= N");
  }
  std::vector<Index> sizes{p1};
  while (sizes.back() < n_samples) sizes.push_back(std::min(2 * sizes.back(), n_samples));
  if (!grow_to_full) {
    // K = ceil(log2(N / p1)), at least one level.
    Index levels = 0;
    for (Index p = p1; p < n_samples; p *= 2) ++levels;
    sizes.resize(static_cast<std::size_t>(std::max<Index>(levels, 1)));
  }
  return sizes;
}

std::vector<Index> seeded_permutation(Index n_samples, std::uint64_t seed) {
  std::vector<Index> perm(static_cast<std::size_t>(n_samples));
  std::iota(perm.begin(), perm.end(), Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  return perm;
}

SampleSet grow_sample(const SampleSet& prev, Index target_size, Index n_samples,
                      std::uint64_t seed) {
  if (target_size > n_samples) {
    throw PcsmError(ErrorCode::TargetExceedsN, "target sample size " + std::to_string(target_size) +
                                                   " exceeds N = " + std::to_string(n_samples));
  }
  if (target_size < prev.size()) {
    throw PcsmError(ErrorCode::InvalidArgument, "grow_sample cannot shrink a sample set");
  }
  if (target_size == prev.size()) return prev;
  std::vector<Index> out = prev.indices();
  for (Index i : seeded_permutation(n_samples, seed)) {
    if (static_cast<Index>(out.size()) == target_size) break;
    if (!prev.contains(i)) out.push_back(i);
  }
  return SampleSet(std::move(out));
}

double sampling_error_scale(Index n_samples, Index sample_size) {
  const double n = static_cast<double>(n_samples);
  const double s = static_cast<double>(sample_size);
  return std::sqrt(n * (n - s) / (s * s));
}

std::vector<std::pair<double, double>> tolerance_schedule(Index n_samples,
                                                          const std::vector<Index>& sizes,
                                                          double final_epsilon, double final_zeta,
                                                          ToleranceRule rule) {
  std::vector<std::pair<double, double>> out;
  out.reserve(sizes.size());
  for (Index size : sizes) {
    double scale = 1.0;
    if (rule == ToleranceRule::PaperRule) {
      const double xi = sampling_error_scale(n_samples, size);
      scale = std::sqrt(xi * xi + 1.0);
    }
    out.emplace_back(final_epsilon * scale, final_zeta * scale);
  }
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double full_sample_grad_norm(const SampledProblem& p, const SampleSet& full, const Vector& x) {
  EvalCounters audit;
  return evaluate_point(p, full, x, audit).grad_lagrangian_norm();
}

}  // namespace

RunResult run_pcsm(const SampledProblem& p, const Vector& x0, const PcsmConfig& cfg) {
  const Index n_samples = p.num_samples();
  if (!(cfg.final_epsilon > 0.0) || !(cfg.final_zeta > 0.0)) {
    throw PcsmError(ErrorCode::InvalidArgument, "final tolerances must be positive");
  }
  if (x0.size() != p.num_variables() || !x0.allFinite()) {
    throw PcsmError(ErrorCode::InvalidArgument, "starting point has wrong size or is not finite");
  }
  const std::vector<Index> sizes = sample_schedule(n_samples, cfg.p1, cfg.grow_to_full);
  const auto tolerances =
      tolerance_schedule(n_samples, sizes, cfg.final_epsilon, cfg.final_zeta, cfg.schedule);
  const SampleSet full = SampleSet::full(n_samples);

  RunResult result;
  EvalCounters counters;
  const auto run_start = Clock::now();
  SampleSet sample;
  Vector x = x0;

  for (std::size_t level = 0; level < sizes.size(); ++level) {
    const Index k = static_cast<Index>(level) + 1;
    const auto level_start = Clock::now();
    sample = grow_sample(sample, sizes[level], n_samples, cfg.seed);
    const auto [eps_k, zeta_k] = tolerances[level];

    IterateObserver observer;
    if (cfg.record_history) {
      observer = [&](const Vector& xi, std::uint64_t evals) {
        result.history.push_back({k, evals, full_sample_grad_norm(p, full, xi)});
      };
      result.history.push_back(
          {k, counters.constraint_grad_evals(), full_sample_grad_norm(p, full, x)});
    }

    SolverResult solved;
    try {
      if (cfg.solver == SolverKind::Fletcher) {
        solved = solve_fletcher(p, sample, x, eps_k, zeta_k, cfg.fletcher, counters, observer);
      } else {
        solved = solve_sqp(p, sample, x, eps_k, zeta_k, cfg.sqp, counters, observer);
      }
    } catch (const PcsmError& e) {
      throw PcsmError(e.code(), "level k=" + std::to_string(k) + " |S|=" +
                                    std::to_string(sample.size()) + ": " + e.what());
    }
    x = solved.x;

    LevelRecord rec;
    rec.k = k;
    rec.sample_size = sample.size();
    rec.epsilon = eps_k;
    rec.zeta = zeta_k;
    rec.cumulative_constraint_grad_evals = counters.constraint_grad_evals();
    rec.grad_lagrangian_norm = solved.report.grad_lagrangian_norm;
    rec.grad_lagrangian_norm_full = full_sample_grad_norm(p, full, x);
    rec.reduced_hess_min_eig = solved.report.reduced_hess_min_eig;
    rec.iterations = solved.iterations;
    rec.wall_time_seconds = cfg.record_wall_time ? seconds_since(level_start) : 0.0;
    result.trace.push_back(rec);
  }

  // Final certification on the full sample, off the ledger.
  EvalCounters audit;
  const PointEval pe = evaluate_point(p, full, x, audit);
  const Matrix h = lagrangian_hessian_xx(p, full, x, pe.y, audit);
  result.report = certify_from(pe, h, cfg.final_epsilon, cfg.final_zeta);
  result.x = x;
  result.y = pe.y;
  result.counters = counters.snapshot();
  result.wall_time_seconds = cfg.record_wall_time ? seconds_since(run_start) : 0.0;
  result.success = cfg.solver == SolverKind::Fletcher ? result.report.certified()
                                                      : result.report.first_order_ok;
  return result;
}

}  // namespace pcsm
