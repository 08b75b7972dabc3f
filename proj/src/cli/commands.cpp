#include "pcsm/cli/commands.hpp"

#include "pcsm/errors.hpp"
#include "pcsm/gradcheck.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>

namespace pcsm::cli {

namespace {

std::filesystem::path prepare_dir(const std::string& dir) {
  std::filesystem::path p(dir);
  std::error_code ec;
  std::filesystem::create_directories(p, ec);
  if (ec) throw PcsmError(ErrorCode::ConfigError, "cannot create output directory " + dir);
  return p;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw PcsmError(ErrorCode::ConfigError, "cannot write " + path.string());
  return os;
}

int exit_code_for(const PcsmError& e) {
  return e.code() == ErrorCode::ConfigError || e.code() == ErrorCode::InvalidArgument
             ? kExitConfigError
             : kExitSolverFailure;
}

// NaN and infinities become null in JSON; keep them readable instead.
nlohmann::json real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

void check_p1(const PcsmConfig& c, Index n) {
  if (c.p1 < 1 || c.p1 > n) {
    throw PcsmError(ErrorCode::ConfigError,
                    "p1 = " + std::to_string(c.p1) + " outside [1, " + std::to_string(n) + "]");
  }
}

void write_solution_csv(const problems::PinnProblem& p, const Vector& x, std::ostream& os) {
  os << "t,u_true,u_pred\n";
  const problems::MlpSpec& spec = p.spec();
  const Index points = 201;
  for (Index k = 0; k < points; ++k) {
    const double t = spec.t_end * static_cast<double>(k) / static_cast<double>(points - 1);
    os << io::format_real(t) << ',' << io::format_real(problems::oscillator_solution(spec, t))
       << ',' << io::format_real(problems::mlp_forward_t2(spec, x, t).u) << '\n';
  }
}

}  // namespace

nlohmann::json summary_json(const RunResult& r, Index p1, Index n_samples) {
  nlohmann::json j;
  j["final_grad_L_norm"] = real(r.report.grad_lagrangian_norm);
  j["reduced_hess_min_eig"] = real(r.report.reduced_hess_min_eig);
  j["total_constraint_grad_evals"] = r.counters.constraint_grad_evals;
  nlohmann::json its = nlohmann::json::array();
  for (const LevelRecord& l : r.trace) its.push_back(l.iterations);
  j["iterations_per_level"] = its;
  j["wall_time_seconds"] = r.wall_time_seconds;
  j["p1"] = p1;
  j["n_samples"] = n_samples;
  j["certified"] = r.report.certified();
  j["first_order_ok"] = r.report.first_order_ok;
  j["success"] = r.success;
  j["epsilon"] = r.report.epsilon;
  j["zeta"] = r.report.zeta;
  j["counters"] = {{"constraint_grad_evals", r.counters.constraint_grad_evals},
                   {"constraint_value_evals", r.counters.constraint_value_evals},
                   {"objective_grad_evals", r.counters.objective_grad_evals},
                   {"constraint_hess_evals", r.counters.constraint_hess_evals}};
  j["x"] = std::vector<double>(r.x.data(), r.x.data() + r.x.size());
  j["y"] = std::vector<double>(r.y.data(), r.y.data() + r.y.size());
  return j;
}

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  std::unique_ptr<SampledProblem> problem;
  Vector x0;
  std::filesystem::path dir;
  try {
    problem = make_problem(cfg.problem);
    x0 = initial_point(cfg, *problem);
    check_p1(cfg.pcsm, problem->num_samples());
    dir = prepare_dir(cfg.out_dir);
  } catch (const PcsmError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  }

  RunResult result;
  try {
    result = run_pcsm(*problem, x0, cfg.pcsm);
  } catch (const PcsmError& e) {
    err << "solver failure: " << e.what() << '\n';
    return exit_code_for(e);
  }

  {
    auto os = open_out(dir / "trace.csv");
    io::write_trace_csv(os, result.trace);
  }
  {
    auto os = open_out(dir / "summary.json");
    os << summary_json(result, cfg.pcsm.p1, problem->num_samples()).dump(2) << '\n';
  }
  if (cfg.pcsm.record_history) {
    auto os = open_out(dir / "history.csv");
    io::write_history_csv(os, result.history);
  }
  if (const auto* pinn = dynamic_cast<const problems::PinnProblem*>(problem.get())) {
    auto os = open_out(dir / "solution.csv");
    write_solution_csv(*pinn, result.x, os);
  }

  out << (result.success ? "success" : "not certified") << ": |grad L| = "
      << io::format_real(result.report.grad_lagrangian_norm)
      << ", reduced Hessian min eig = " << io::format_real(result.report.reduced_hess_min_eig)
      << ", constraint gradient evaluations = " << result.counters.constraint_grad_evals << '\n';
  return result.success ? kExitSuccess : kExitSolverFailure;
}

io::BenchRow bench_row(const SampledProblem& p, const Vector& x0, const PcsmConfig& base,
                       Index p1, double tolerance) {
  io::BenchRow row;
  row.tolerance = tolerance;
  PcsmConfig c = base;
  c.final_epsilon = tolerance;
  c.final_zeta = tolerance;
  c.record_history = false;
  try {
    c.p1 = p.num_samples();
    const RunResult one = run_pcsm(p, x0, c);
    row.evals_one_shot = one.counters.constraint_grad_evals;
    c.p1 = p1;
    const RunResult prog = run_pcsm(p, x0, c);
    row.evals_progressive = prog.counters.constraint_grad_evals;
    if (!one.success || !prog.success) {
      row.status = "failed: final certification";
    }
    row.ratio = static_cast<double>(row.evals_progressive) / static_cast<double>(row.evals_one_shot);
  } catch (const PcsmError& e) {
    row.status = std::string("failed: ") + e.what();
    row.ratio = std::nan("");
  }
  return row;
}

int cmd_bench(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  std::unique_ptr<SampledProblem> problem;
  Vector x0;
  std::filesystem::path dir;
  try {
    problem = make_problem(cfg.problem);
    x0 = initial_point(cfg, *problem);
    PcsmConfig probe = cfg.pcsm;
    probe.p1 = cfg.bench.p1;
    check_p1(probe, problem->num_samples());
    dir = prepare_dir(cfg.out_dir);
  } catch (const PcsmError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  }

  std::vector<io::BenchRow> rows;
  bool all_ok = true;
  for (double tol : cfg.bench.tolerances) {
    rows.push_back(bench_row(*problem, x0, cfg.pcsm, cfg.bench.p1, tol));
    const io::BenchRow& r = rows.back();
    all_ok = all_ok && r.status == "ok";
    char line[256];
    std::snprintf(line, sizeof line, "tol %-8.1e one-shot %12llu progressive %12llu ratio %.4f %s",
                  r.tolerance, static_cast<unsigned long long>(r.evals_one_shot),
                  static_cast<unsigned long long>(r.evals_progressive), r.ratio, r.status.c_str());
    out << line << '\n';
  }
  auto os = open_out(dir / "bench.csv");
  io::write_bench_csv(os, rows);
  return all_ok ? kExitSuccess : kExitSolverFailure;
}

int cmd_scan(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  std::unique_ptr<SampledProblem> problem;
  SampleSet s;
  std::filesystem::path dir;
  try {
    problem = make_problem(cfg.problem);
    if (problem->num_variables() != 2) {
      throw PcsmError(ErrorCode::ConfigError, "scan needs a two-dimensional problem");
    }
    const Index n = problem->num_samples();
    const Index size = cfg.scan.sample_size == 0 ? n : cfg.scan.sample_size;
    if (size < 1 || size > n) throw PcsmError(ErrorCode::ConfigError, "scan.sample_size outside [1, N]");
    s = grow_sample(SampleSet(), size, n, cfg.pcsm.seed);
    dir = prepare_dir(cfg.out_dir);
  } catch (const PcsmError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  }

  theory::MorseGrid grid;
  try {
    grid = theory::morse_scan(*problem, s, cfg.scan.grid, cfg.scan.eps_level, cfg.scan.threads);
  } catch (const PcsmError& e) {
    err << "scan failure: " << e.what() << '\n';
    return exit_code_for(e);
  }
  auto os = open_out(dir / "morse.csv");
  io::write_morse_csv(os, grid);
  out << "eps_level=" << grid.eps_level << " min_lambda=" << grid.min_lambda
      << " qualifying=" << grid.qualifying << " points=" << grid.points.size()
      << " |S|=" << s.size() << '\n';
  return kExitSuccess;
}

nlohmann::json constants_report(const ConstantsConfig& c, const nlohmann::json& echo) {
  using namespace theory;
  nlohmann::json j;
  j["inputs"] = echo;
  const Kappas k = kappas(c.problem);
  const Taus t = taus(c.problem);
  const SampleSizeThresholds th = min_sample_sizes(c.problem);
  j["kappas"] = {{"kappa1", real(k.kappa1)}, {"kappa2", real(k.kappa2)}, {"kappa3", real(k.kappa3)}};
  j["taus"] = {{"tau1", real(t.tau1)}, {"tau2", real(t.tau2)}};
  j["thresholds"] = {{"acute", real(th.acute)},
                     {"multiplier", real(th.multiplier)},
                     {"morse", th.morse},
                     {"warm_start", th.warm_start}};
  if (c.has_fletcher) {
    const FletcherConstants fc =
        fletcher_constants(c.kappa_s, c.sigma_min, c.beta_s, c.m, c.m_bar, c.r);
    j["fletcher"] = {{"eta1", real(fc.eta1)}, {"eta2", real(fc.eta2)}, {"eta3", real(fc.eta3)},
                     {"eta4", real(fc.eta4)}, {"eps_bar", real(fc.eps_bar)}};
    try {
      const RhoInterval ri = fletcher_rho_interval(fc, c.beta_s, c.epsilon);
      j["rho_interval"] = {{"rho_lo", real(ri.rho_lo)},
                           {"rho_hi", real(ri.rho_hi)},
                           {"hi_unbounded", ri.hi_unbounded}};
    } catch (const PcsmError& e) {
      j["rho_interval"] = {{"error", e.what()}};
    }
  }
  if (c.has_complexity) {
    const ComplexityBounds b = complexity_bounds(c.complexity);
    j["complexity"] = {{"one_shot", real(b.one_shot)}, {"progressive", real(b.progressive)}};
  }
  return j;
}

int cmd_constants(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  nlohmann::json report;
  std::filesystem::path dir;
  try {
    cfg.constants.problem.validate();
    const nlohmann::json echo =
        cfg.source.contains("constants") ? cfg.source.at("constants") : nlohmann::json::object();
    report = constants_report(cfg.constants, echo);
    dir = prepare_dir(cfg.out_dir);
  } catch (const PcsmError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  }
  auto os = open_out(dir / "constants.json");
  os << report.dump(2) << '\n';
  out << report.dump(2) << '\n';
  return kExitSuccess;
}

int cmd_check_grad(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const CheckGradConfig& g = cfg.check_grad;
  std::mt19937_64 rng(g.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const auto random_points = [&](Index n, Index count, double scale) {
    std::vector<Vector> pts;
    for (Index k = 0; k < count; ++k) {
      Vector x(n);
      for (Index i = 0; i < n; ++i) x(i) = scale * unit(rng);
      pts.push_back(x);
    }
    return pts;
  };

  struct Suite {
    std::string name;
    std::unique_ptr<SampledProblem> problem;
    std::vector<Vector> points;
  };
  std::vector<Suite> suites;
  try {
    auto art = std::make_unique<problems::ArtificialProblem>(cfg.problem.artificial);
    suites.push_back({"artificial", std::move(art), random_points(2, g.points, 1.0)});
    suites.push_back({"mean", problems::mean_limit_problem(), random_points(2, g.points, 1.0)});
    suites.push_back({"quadratic", std::make_unique<problems::QuadraticProbeProblem>(5, 2, 6, g.seed),
                      random_points(5, g.points, 1.0)});
    suites.push_back({"smooth", std::make_unique<problems::SmoothRandomProblem>(6, 2, 5, g.seed),
                      random_points(6, g.points, 1.0)});
    problems::MlpSpec spec = cfg.problem.pinn;
    spec.hidden = g.pinn_hidden;
    spec.n_objective = 8;
    spec.n_samples = 8;
    std::vector<Vector> pinn_points;
    const Index pinn_count = std::max<Index>(1, g.points / 10);
    for (Index k = 0; k < pinn_count; ++k) {
      pinn_points.push_back(problems::initial_parameters(spec, g.seed + static_cast<std::uint64_t>(k)));
    }
    suites.push_back({"pinn", std::make_unique<problems::PinnProblem>(spec), pinn_points});
  } catch (const PcsmError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  }

  gradcheck::Options opts;
  opts.step = g.step;
  opts.rho = g.rho;
  double worst = 0.0;
  for (const Suite& s : suites) {
    const SampleSet all = SampleSet::full(std::min<Index>(s.problem->num_samples(), 8));
    gradcheck::Report r;
    try {
      r = gradcheck::check_problem(*s.problem, all, s.points, opts);
    } catch (const PcsmError& e) {
      err << s.name << ": " << e.what() << '\n';
      return kExitSolverFailure;
    }
    char line[320];
    std::snprintf(line, sizeof line,
                  "%-10s points %3lld  grad_f %.2e  hess_f %.2e  jac_c %.2e  hess_c %.2e  "
                  "fletcher %.2e  dy %.2e  max %.2e",
                  s.name.c_str(), static_cast<long long>(r.points), r.objective_gradient,
                  r.objective_hessian, r.constraint_jacobian, r.constraint_hessian,
                  r.fletcher_gradient, r.multiplier_jacobian, r.max_error());
    out << line << '\n';
    worst = std::max(worst, r.max_error());
  }
  out << "max relative error " << io::format_real(worst) << " (tolerance "
      << io::format_real(g.tolerance) << ")\n";
  return worst <= g.tolerance ? kExitSuccess : kExitSolverFailure;
}

}  // namespace pcsm::cli
