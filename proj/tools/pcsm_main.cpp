#include "pcsm/cli/commands.hpp"
#include "pcsm/errors.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <optional>

int main(int argc, char** argv) {
  using namespace pcsm::cli;

  CLI::App app{"Progressive constraint sampling for sample-average equality-constrained problems"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::string> solver;
  std::optional<long> p1;
  std::optional<double> tol;
  bool no_timing = false;

  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "sample-order seed");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--solver", solver, "subproblem solver")->check(CLI::IsMember({"fletcher", "sqp"}));
  app.add_option("--p1", p1, "first sample size")->check(CLI::PositiveNumber);
  app.add_option("--tol", tol, "final tolerance (epsilon = zeta)")->check(CLI::PositiveNumber);
  app.add_flag("--no-timing", no_timing, "write zero wall times for reproducible output");

  auto* solve = app.add_subcommand("solve", "run the progressive method once");
  auto* bench = app.add_subcommand("bench", "compare one-shot and progressive runs");
  auto* scan = app.add_subcommand("scan", "strong-Morse grid scan");
  auto* constants = app.add_subcommand("constants", "theory constants report");
  auto* check = app.add_subcommand("check-grad", "finite-difference derivative checks");
  for (auto* sub : {solve, bench, scan, constants, check}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitSuccess : kExitConfigError;
  }

  RunConfig cfg;
  try {
    cfg = config_path.empty() ? parse_config(nlohmann::json::object()) : load_config(config_path);
    apply_environment(cfg);
    if (seed) cfg.pcsm.seed = *seed;
    if (out_dir) cfg.out_dir = *out_dir;
    if (solver) cfg.pcsm.solver = *solver == "sqp" ? pcsm::SolverKind::Sqp : pcsm::SolverKind::Fletcher;
    if (p1) {
      cfg.pcsm.p1 = *p1;
      cfg.bench.p1 = *p1;
    }
    if (tol) {
      cfg.pcsm.final_epsilon = *tol;
      cfg.pcsm.final_zeta = *tol;
      cfg.bench.tolerances = {*tol};
    }
    if (no_timing) cfg.pcsm.record_wall_time = false;
  } catch (const pcsm::PcsmError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  }

  try {
    if (solve->parsed()) return cmd_solve(cfg, std::cout, std::cerr);
    if (bench->parsed()) return cmd_bench(cfg, std::cout, std::cerr);
    if (scan->parsed()) return cmd_scan(cfg, std::cout, std::cerr);
    if (constants->parsed()) return cmd_constants(cfg, std::cout, std::cerr);
    if (check->parsed()) return cmd_check_grad(cfg, std::cout, std::cerr);
  } catch (const pcsm::PcsmError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == pcsm::ErrorCode::ConfigError ? kExitConfigError : kExitSolverFailure;
  }
  return kExitConfigError;
}
