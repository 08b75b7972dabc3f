#include "pcsm/driver.hpp"
#include "pcsm/errors.hpp"
#include "pcsm/problems.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

using namespace pcsm;

namespace {

Vector v2(double a, double b) {
  Vector x(2);
  x << a, b;
  return x;
}

PcsmConfig quiet_config(SolverKind solver, Index p1, double tol) {
  PcsmConfig cfg;
  cfg.solver = solver;
  cfg.p1 = p1;
  cfg.final_epsilon = tol;
  cfg.final_zeta = tol;
  cfg.seed = 3;
  cfg.record_wall_time = false;
  return cfg;
}

}  // namespace

TEST(Schedule, DoublingExamples) {
  EXPECT_EQ(sample_schedule(2048, 64), (std::vector<Index>{64, 128, 256, 512, 1024, 2048}));
  EXPECT_EQ(sample_schedule(100, 30), (std::vector<Index>{30, 60, 100}));
  EXPECT_EQ(sample_schedule(100, 100), (std::vector<Index>{100}));
  EXPECT_EQ(sample_schedule(1, 1), (std::vector<Index>{1}));
}

TEST(Schedule, NominalLengthWithoutGrowToFull) {
  EXPECT_EQ(sample_schedule(2048, 64, false), (std::vector<Index>{64, 128, 256, 512, 1024}));
  EXPECT_EQ(sample_schedule(100, 30, false), (std::vector<Index>{30, 60}));
  EXPECT_EQ(sample_schedule(100, 100, false), (std::vector<Index>{100}));
}

TEST(Schedule, InvalidP1) {
  EXPECT_THROW(sample_schedule(100, 0), PcsmError);
  EXPECT_THROW(sample_schedule(100, 101), PcsmError);
}

TEST(Schedule, PropertiesOverManyPairs) {
  for (Index n = 1; n <= 300; n += 7) {
    for (Index p1 = 1; p1 <= n; p1 += 5) {
      const auto s = sample_schedule(n, p1);
      EXPECT_EQ(s.front(), p1);
      EXPECT_EQ(s.back(), n);
      for (std::size_t i = 1; i < s.size(); ++i) {
        EXPECT_GT(s[i], s[i - 1]);
        EXPECT_LE(s[i], 2 * s[i - 1]);
        if (i + 1 < s.size()) EXPECT_EQ(s[i], 2 * s[i - 1]);
      }
    }
  }
}

TEST(Tolerances, PaperRuleExamples) {
  const auto sizes = sample_schedule(2048, 64);
  const auto tol = tolerance_schedule(2048, sizes, 1e-6, 2e-6, ToleranceRule::PaperRule);
  ASSERT_EQ(tol.size(), sizes.size());
  EXPECT_NEAR(tol[0].first, 1e-6 * std::sqrt(993.0), 1e-18);
  EXPECT_NEAR(tol[0].second, 2e-6 * std::sqrt(993.0), 1e-18);
  EXPECT_DOUBLE_EQ(tol.back().first, 1e-6);
  EXPECT_DOUBLE_EQ(tol.back().second, 2e-6);
  for (std::size_t i = 1; i < tol.size(); ++i) EXPECT_LT(tol[i].first, tol[i - 1].first);
  EXPECT_DOUBLE_EQ(sampling_error_scale(2048, 64), std::sqrt(992.0));
  EXPECT_EQ(sampling_error_scale(2048, 2048), 0.0);
}

TEST(Tolerances, FixedRuleRepeats) {
  const auto tol = tolerance_schedule(100, {30, 60, 100}, 1e-4, 1e-3, ToleranceRule::Fixed);
  for (const auto& [e, z] : tol) {
    EXPECT_EQ(e, 1e-4);
    EXPECT_EQ(z, 1e-3);
  }
}

TEST(Sampling, PermutationIsDeterministic) {
  const auto a = seeded_permutation(500, 9);
  EXPECT_EQ(a, seeded_permutation(500, 9));
  EXPECT_NE(a, seeded_permutation(500, 10));
  std::vector<Index> sorted = a;
  std::sort(sorted.begin(), sorted.end());
  for (Index i = 0; i < 500; ++i) EXPECT_EQ(sorted[static_cast<std::size_t>(i)], i);
}

TEST(Sampling, GrowSampleIsNested) {
  SampleSet prev;
  for (Index size : sample_schedule(2048, 64)) {
    const SampleSet next = grow_sample(prev, size, 2048, 5);
    EXPECT_EQ(next.size(), size);
    EXPECT_TRUE(prev.is_subset_of(next));
    prev = next;
  }
  EXPECT_EQ(prev, SampleSet::full(2048));
  EXPECT_EQ(grow_sample(SampleSet(), 64, 2048, 5), grow_sample(SampleSet(), 64, 2048, 5));
  const SampleSet a = grow_sample(SampleSet(), 64, 2048, 5);
  EXPECT_EQ(grow_sample(a, 64, 2048, 5), a);
}

TEST(Sampling, GrowSampleErrors) {
  try {
    grow_sample(SampleSet(), 11, 10, 1);
    FAIL();
  } catch (const PcsmError& e) {
    EXPECT_EQ(e.code(), ErrorCode::TargetExceedsN);
  }
  EXPECT_THROW(grow_sample(SampleSet::full(5), 3, 10, 1), PcsmError);
}

TEST(RunPcsm, FletcherArtificialRun) {
  problems::ArtificialProblem art({});
  const RunResult r = run_pcsm(art, v2(0.4, -0.5), quiet_config(SolverKind::Fletcher, 64, 1e-5));
  EXPECT_TRUE(r.success);
  EXPECT_TRUE(r.report.certified());
  EXPECT_LE(r.report.grad_lagrangian_norm, 1e-5);
  ASSERT_EQ(r.trace.size(), 6u);
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    const LevelRecord& rec = r.trace[i];
    EXPECT_EQ(rec.k, static_cast<Index>(i) + 1);
    EXPECT_EQ(rec.sample_size, 64 << i);
    EXPECT_LE(rec.grad_lagrangian_norm, rec.epsilon);
    EXPECT_EQ(rec.wall_time_seconds, 0.0);
    if (i > 0) {
      EXPECT_GE(rec.cumulative_constraint_grad_evals, r.trace[i - 1].cumulative_constraint_grad_evals);
    }
  }
  EXPECT_EQ(r.trace.back().cumulative_constraint_grad_evals, r.counters.constraint_grad_evals);
  EXPECT_EQ(r.wall_time_seconds, 0.0);
}

TEST(RunPcsm, SqpArtificialRun) {
  problems::ArtificialProblem art({});
  const RunResult r = run_pcsm(art, v2(0.4, -0.5), quiet_config(SolverKind::Sqp, 64, 1e-5));
  EXPECT_TRUE(r.success);
  EXPECT_TRUE(r.report.first_order_ok);
  EXPECT_LE(r.report.grad_lagrangian_norm, 1e-5);
}

TEST(RunPcsm, DeterministicWithoutWallTime) {
  problems::ArtificialProblem art({});
  PcsmConfig cfg = quiet_config(SolverKind::Fletcher, 64, 1e-4);
  cfg.record_history = true;
  const RunResult a = run_pcsm(art, v2(0.3, 0.3), cfg);
  const RunResult b = run_pcsm(art, v2(0.3, 0.3), cfg);
  EXPECT_EQ(a.trace, b.trace);
  EXPECT_EQ(a.history, b.history);
  EXPECT_EQ(a.x, b.x);
  EXPECT_FALSE(a.history.empty());
  for (std::size_t i = 1; i < a.history.size(); ++i) {
    EXPECT_GE(a.history[i].constraint_grad_evals, a.history[i - 1].constraint_grad_evals);
    EXPECT_GE(a.history[i].k, a.history[i - 1].k);
  }
}

TEST(RunPcsm, HistoryDoesNotChargeTheLedger) {
  problems::ArtificialProblem art({});
  PcsmConfig cfg = quiet_config(SolverKind::Sqp, 128, 1e-4);
  const RunResult plain = run_pcsm(art, v2(-0.2, 0.6), cfg);
  cfg.record_history = true;
  const RunResult audited = run_pcsm(art, v2(-0.2, 0.6), cfg);
  EXPECT_EQ(plain.counters.constraint_grad_evals, audited.counters.constraint_grad_evals);
  EXPECT_EQ(plain.trace, audited.trace);
}

TEST(RunPcsm, SingleLevelEqualsOneShot) {
  problems::ArtificialProblem art({});
  const RunResult r = run_pcsm(art, v2(0.1, 0.1), quiet_config(SolverKind::Fletcher, 2048, 1e-6));
  ASSERT_EQ(r.trace.size(), 1u);
  EvalCounters ct;
  const SolverResult direct =
      solve_fletcher(art, SampleSet::full(2048), v2(0.1, 0.1), 1e-6, 1e-6, FletcherConfig{}, ct);
  EXPECT_EQ(direct.x, r.x);
  EXPECT_EQ(ct.constraint_grad_evals(), r.counters.constraint_grad_evals);
}

TEST(RunPcsm, SeedChangesSamplesNotValidity) {
  problems::ArtificialProblem art({});
  std::set<std::uint64_t> evals;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    PcsmConfig cfg = quiet_config(SolverKind::Fletcher, 256, 1e-5);
    cfg.seed = seed;
    const RunResult r = run_pcsm(art, v2(0.2, -0.2), cfg);
    EXPECT_TRUE(r.success);
    evals.insert(r.counters.constraint_grad_evals);
  }
  EXPECT_GE(evals.size(), 2u);
}

TEST(RunPcsm, InvalidInputs) {
  problems::ArtificialProblem art({});
  PcsmConfig cfg = quiet_config(SolverKind::Fletcher, 64, 1e-5);
  EXPECT_THROW(run_pcsm(art, Vector::Zero(3), cfg), PcsmError);
  cfg.final_epsilon = 0.0;
  EXPECT_THROW(run_pcsm(art, v2(0, 0), cfg), PcsmError);
  cfg = quiet_config(SolverKind::Fletcher, 4096, 1e-5);
  EXPECT_THROW(run_pcsm(art, v2(0, 0), cfg), PcsmError);
}
