#pragma once

// Run configuration for the command-line harness, read from a JSON file.
// See configs/README.md for the schema.

#include "pcsm/driver.hpp"
#include "pcsm/problems.hpp"
#include "pcsm/theory.hpp"

#include "json.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace pcsm::cli {

struct ProblemConfig {
  std::string type = "artificial";  // artificial | mean | pinn
  problems::ArtificialProblemSpec artificial;
  problems::MlpSpec pinn;
};

struct BenchConfig {
  std::vector<double> tolerances{1e-3, 1e-4, 1e-5, 1e-6};
  Index p1 = 64;  // first sample size of the progressive runs
};

struct ScanConfig {
  theory::GridSpec grid;
  double eps_level = 0.6;
  Index sample_size = 0;  // 0 scans the full sample
  unsigned threads = 0;
};

struct ConstantsConfig {
  theory::ProblemConstants problem;
  // Optional Fletcher penalty block.
  bool has_fletcher = false;
  double kappa_s = 0.0;
  double sigma_min = 1.0;
  double beta_s = 0.0;
  Index m = 1;
  double m_bar = 0.0;
  double r = 0.0;
  double epsilon = 0.0;
  // Optional complexity block.
  bool has_complexity = false;
  theory::ComplexityInputs complexity;
};

struct CheckGradConfig {
  Index points = 50;
  std::uint64_t seed = 1;
  double step = 1e-6;
  double rho = 10.0;
  double tolerance = 1e-5;
  Index pinn_hidden = 4;  // width of the network used for the check
};

struct RunConfig {
  ProblemConfig problem;
  PcsmConfig pcsm;
  std::optional<std::vector<double>> x0;
  std::uint64_t x0_seed = 1;
  std::string out_dir = "out";
  BenchConfig bench;
  ScanConfig scan;
  ConstantsConfig constants;
  CheckGradConfig check_grad;
  nlohmann::json source;  // the parsed input, echoed into reports
};

/// Throws PcsmError(ConfigError) on malformed input or unknown keys.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

/// PCSM_SEED and PCSM_OUT_DIR override the seed and output directory.
void apply_environment(RunConfig& cfg);

std::unique_ptr<SampledProblem> make_problem(const ProblemConfig& cfg);

/// The configured x0, or a seeded draw: uniform on [-1, 1]^n for the
/// two-dimensional problems, the network initializer for the PINN.
Vector initial_point(const RunConfig& cfg, const SampledProblem& p);

}  // namespace pcsm::cli
