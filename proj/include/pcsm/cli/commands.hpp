#pragma once

#include "pcsm/cli/config.hpp"
#include "pcsm/trace_io.hpp"

#include <iosfwd>

namespace pcsm::cli {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitSolverFailure = 2;

/// Runs PCSM once. Writes trace.csv and summary.json (plus history.csv when
/// history is recorded and solution.csv for the network problem).
int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// One-shot against progressive runs at every configured tolerance; bench.csv.
int cmd_bench(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Strong-Morse grid scan of a two-dimensional problem; morse.csv.
int cmd_scan(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Theory constants report; constants.json.
int cmd_constants(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Finite-difference verification of every problem family.
int cmd_check_grad(const RunConfig& cfg, std::ostream& out, std::ostream& err);

nlohmann::json summary_json(const RunResult& r, Index p1, Index n_samples);
nlohmann::json constants_report(const ConstantsConfig& c, const nlohmann::json& echo);

/// One row of the comparison table for a single tolerance.
io::BenchRow bench_row(const SampledProblem& p, const Vector& x0, const PcsmConfig& base,
                       Index p1, double tolerance);

}  // namespace pcsm::cli
