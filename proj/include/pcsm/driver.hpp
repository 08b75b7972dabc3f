#pragma once

// Progressive constraint sampling: solve a chain of subsampled problems over
// nested, doubling sample sets, warm-starting each solve from the previous
// solution and tightening the tolerances as the sample grows.

#include "pcsm/fletcher.hpp"
#include "pcsm/sqp.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace pcsm {

enum class ToleranceRule { PaperRule, Fixed };
enum class SolverKind { Fletcher, Sqp };

struct PcsmConfig {
  Index p1 = 1;
  double final_epsilon = 1e-6;
  double final_zeta = 1e-6;
  ToleranceRule schedule = ToleranceRule::PaperRule;
  SolverKind solver = SolverKind::Fletcher;
  std::uint64_t seed = 0;
  bool grow_to_full = true;
  FletcherConfig fletcher;
  SqpConfig sqp;
  /// Audit the full-sample Lagrangian gradient after every solver iterate
  /// (off the ledger). Produces RunResult::history.
  bool record_history = false;
  /// When false every wall-time field is written as zero, making outputs
  /// byte-for-byte reproducible.
  bool record_wall_time = true;
};

/// Per-level record of a run.
struct LevelRecord {
  Index k = 0;
  Index sample_size = 0;
  double epsilon = 0.0;
  double zeta = 0.0;
  std::uint64_t cumulative_constraint_grad_evals = 0;
  double grad_lagrangian_norm = 0.0;       // on S_k at exit
  double grad_lagrangian_norm_full = 0.0;  // on [N] at exit, audited off the ledger
  double reduced_hess_min_eig = 0.0;       // on S_k at exit (NaN if not evaluated)
  Index iterations = 0;
  double wall_time_seconds = 0.0;

  friend bool operator==(const LevelRecord&, const LevelRecord&) = default;
};

using RunTrace = std::vector<LevelRecord>;

/// Full-sample audit point for the per-iteration history.
struct HistoryPoint {
  Index k = 0;
  std::uint64_t constraint_grad_evals = 0;
  double grad_lagrangian_norm_full = 0.0;

  friend bool operator==(const HistoryPoint&, const HistoryPoint&) = default;
};

struct RunResult {
  Vector x;
  Vector y;                       // least-squares multipliers on [N]
  StationarityReport report;      // final certification on [N]
  RunTrace trace;
  std::vector<HistoryPoint> history;
  EvalSnapshot counters;          // the run's ledger, excluding audits
  double wall_time_seconds = 0.0;
  bool success = false;           // certified (Fletcher) or first-order (SQP) on [N]
};

/// p_1, 2 p_1, 4 p_1, ... capped at N. The first ceil(log2(N / p1)) sizes form
/// the nominal schedule; grow_to_full appends levels until the last size is N.
std::vector<Index> sample_schedule(Index n_samples, Index p1, bool grow_to_full = true);

/// Fixed pseudo-random ordering of [0, N) determined by the seed.
std::vector<Index> seeded_permutation(Index n_samples, std::uint64_t seed);

/// Superset of prev with exactly target_size indices; new indices are taken in
/// permutation order. Throws TargetExceedsN.
SampleSet grow_sample(const SampleSet& prev, Index target_size, Index n_samples,
                      std::uint64_t seed);

/// sqrt(N (N - p) / p^2).
double sampling_error_scale(Index n_samples, Index sample_size);

/// Subproblem tolerances per level. PaperRule scales the final pair by
/// sqrt(N (N - p_k) / p_k^2 + 1); Fixed repeats the final pair.
std::vector<std::pair<double, double>> tolerance_schedule(Index n_samples,
                                                          const std::vector<Index>& sizes,
                                                          double final_epsilon, double final_zeta,
                                                          ToleranceRule rule);

RunResult run_pcsm(const SampledProblem& p, const Vector& x0, const PcsmConfig& cfg);

}  // namespace pcsm
