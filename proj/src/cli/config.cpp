#include "pcsm/cli/config.hpp"

#include "pcsm/errors.hpp"

#include <array>
#include <cstdlib>
#include <fstream>
#include <random>
#include <set>
#include <type_traits>

namespace pcsm::cli {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw PcsmError(ErrorCode::ConfigError, msg); }

template <typename T>
struct is_std_array : std::false_type {};
template <typename T, std::size_t N>
struct is_std_array<std::array<T, N>> : std::true_type {};

// Reads the fields of one JSON object and rejects keys nobody asked for.
class Section {
 public:
  Section(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_ + " must be an object");
  }

  template <typename T>
  void read(const char* key, T& target) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    if constexpr (is_std_array<T>::value) {
      if (!j_.at(key).is_array() || j_.at(key).size() != std::tuple_size_v<T>) {
        fail(path_ + "." + key + " must have " + std::to_string(std::tuple_size_v<T>) + " entries");
      }
    }
    try {
      target = j_.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
      fail(path_ + "." + key + ": " + e.what());
    }
  }

  bool has(const char* key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  Section sub(const char* key) {
    seen_.insert(key);
    return Section(j_.at(key), path_ + "." + key);
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) fail("unknown key " + path_ + "." + item.key());
    }
  }

 private:
  const nlohmann::json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

ToleranceRule parse_rule(const std::string& s) {
  if (s == "paper_rule") return ToleranceRule::PaperRule;
  if (s == "fixed") return ToleranceRule::Fixed;
  fail("pcsm.schedule must be paper_rule or fixed, got " + s);
}

SolverKind parse_solver(const std::string& s) {
  if (s == "fletcher") return SolverKind::Fletcher;
  if (s == "sqp") return SolverKind::Sqp;
  fail("solver must be fletcher or sqp, got " + s);
}

void read_problem(Section sec, ProblemConfig& out) {
  sec.read("type", out.type);
  if (out.type != "artificial" && out.type != "mean" && out.type != "pinn") {
    fail("problem.type must be artificial, mean or pinn, got " + out.type);
  }
  if (sec.has("artificial")) {
    Section a = sec.sub("artificial");
    a.read("a", out.artificial.a);
    a.read("phi", out.artificial.phi);
    a.read("n_samples", out.artificial.n_samples);
    a.read("seed", out.artificial.seed);
    a.finish();
  }
  if (sec.has("pinn")) {
    Section p = sec.sub("pinn");
    p.read("hidden", out.pinn.hidden);
    p.read("n_objective", out.pinn.n_objective);
    p.read("n_samples", out.pinn.n_samples);
    p.read("t_end", out.pinn.t_end);
    p.read("mass", out.pinn.mass);
    p.read("damping", out.pinn.damping);
    p.read("stiffness", out.pinn.stiffness);
    p.read("u0", out.pinn.u0);
    p.read("v0", out.pinn.v0);
    p.read("input_scale", out.pinn.input_scale);
    p.finish();
  }
  sec.finish();
}

void read_solver(Section sec, PcsmConfig& out) {
  std::string type = "fletcher";
  sec.read("type", type);
  out.solver = parse_solver(type);
  if (sec.has("fletcher")) {
    Section f = sec.sub("fletcher");
    FletcherConfig& c = out.fletcher;
    f.read("rho", c.rho);
    f.read("grad_ls_init_step", c.grad_ls_init_step);
    f.read("curv_ls_init_step", c.curv_ls_init_step);
    f.read("armijo_c1", c.armijo_c1);
    f.read("armijo_c2", c.armijo_c2);
    f.read("backtrack_factor_grad", c.backtrack_factor_grad);
    f.read("backtrack_factor_curv", c.backtrack_factor_curv);
    f.read("grad_phase_threshold_factor", c.grad_phase_threshold_factor);
    f.read("max_iters", c.max_iters);
    f.read("fd_step", c.fd_step);
    f.finish();
  }
  if (sec.has("sqp")) {
    Section q = sec.sub("sqp");
    SqpConfig& c = out.sqp;
    q.read("alpha_init", c.alpha_init);
    q.read("nu", c.nu);
    q.read("sigma", c.sigma);
    q.read("eta", c.eta);
    q.read("tau_init", c.tau_init);
    q.read("backtrack_factor", c.backtrack_factor);
    q.read("max_iters", c.max_iters);
    q.read("merit_tau_min", c.merit_tau_min);
    q.finish();
  }
  sec.finish();
}

void read_pcsm(Section sec, PcsmConfig& out) {
  sec.read("p1", out.p1);
  sec.read("final_epsilon", out.final_epsilon);
  sec.read("final_zeta", out.final_zeta);
  std::string rule = "paper_rule";
  sec.read("schedule", rule);
  out.schedule = parse_rule(rule);
  sec.read("grow_to_full", out.grow_to_full);
  sec.read("record_history", out.record_history);
  sec.read("record_wall_time", out.record_wall_time);
  sec.finish();
}

void read_constants(Section sec, ConstantsConfig& out) {
  theory::ProblemConstants& c = out.problem;
  sec.read("sigma_min", c.sigma_min);
  sec.read("kappa_grad_f", c.kappa_grad_f);
  sec.read("kappa_grad_c", c.kappa_grad_c);
  sec.read("kappa_hess_f", c.kappa_hess_f);
  sec.read("kappa_hess_c", c.kappa_hess_c);
  sec.read("gamma_c", c.gamma_c);
  sec.read("gamma_grad_c", c.gamma_grad_c);
  sec.read("gamma_hess_c", c.gamma_hess_c);
  sec.read("alpha", c.alpha);
  sec.read("beta", c.beta);
  sec.read("m", c.m);
  sec.read("n_samples", c.n_samples);
  if (sec.has("fletcher")) {
    Section f = sec.sub("fletcher");
    out.has_fletcher = true;
    f.read("kappa_s", out.kappa_s);
    f.read("sigma_min", out.sigma_min);
    f.read("beta_s", out.beta_s);
    f.read("m", out.m);
    f.read("m_bar", out.m_bar);
    f.read("r", out.r);
    f.read("epsilon", out.epsilon);
    f.finish();
  }
  if (sec.has("complexity")) {
    Section k = sec.sub("complexity");
    out.has_complexity = true;
    theory::ComplexityInputs& in = out.complexity;
    in.n_samples = c.n_samples;
    k.read("n_samples", in.n_samples);
    k.read("first_sample_size", in.first_sample_size);
    k.read("eps1", in.eps1);
    k.read("zeta1", in.zeta1);
    k.read("eps", in.eps);
    k.read("zeta", in.zeta);
    k.read("u1", in.u1);
    k.read("u2", in.u2);
    k.read("omega_bar", in.omega_bar);
    k.read("tau1", in.tau1);
    k.read("kappa1", in.kappa1);
    k.finish();
  }
  sec.finish();
}

}  // namespace

RunConfig parse_config(const nlohmann::json& j) {
  RunConfig cfg;
  cfg.source = j;
  Section root(j, "config");
  if (root.has("problem")) read_problem(root.sub("problem"), cfg.problem);
  if (root.has("solver")) {
    if (j.at("solver").is_string()) {
      cfg.pcsm.solver = parse_solver(j.at("solver").get<std::string>());
    } else {
      read_solver(root.sub("solver"), cfg.pcsm);
    }
  }
  if (root.has("pcsm")) read_pcsm(root.sub("pcsm"), cfg.pcsm);
  root.read("seed", cfg.pcsm.seed);
  if (root.has("x0")) {
    std::vector<double> x0;
    root.read("x0", x0);
    cfg.x0 = x0;
  }
  root.read("x0_seed", cfg.x0_seed);
  if (root.has("output")) {
    Section o = root.sub("output");
    o.read("dir", cfg.out_dir);
    o.finish();
  }
  if (root.has("bench")) {
    Section b = root.sub("bench");
    b.read("tolerances", cfg.bench.tolerances);
    b.read("p1", cfg.bench.p1);
    b.finish();
  }
  if (root.has("scan")) {
    Section s = root.sub("scan");
    s.read("lo", cfg.scan.grid.lo);
    s.read("hi", cfg.scan.grid.hi);
    s.read("resolution", cfg.scan.grid.resolution);
    s.read("eps_level", cfg.scan.eps_level);
    s.read("sample_size", cfg.scan.sample_size);
    s.read("threads", cfg.scan.threads);
    s.finish();
  }
  if (root.has("constants")) read_constants(root.sub("constants"), cfg.constants);
  if (root.has("check_grad")) {
    Section g = root.sub("check_grad");
    g.read("points", cfg.check_grad.points);
    g.read("seed", cfg.check_grad.seed);
    g.read("step", cfg.check_grad.step);
    g.read("rho", cfg.check_grad.rho);
    g.read("tolerance", cfg.check_grad.tolerance);
    g.read("pinn_hidden", cfg.check_grad.pinn_hidden);
    g.finish();
  }
  root.finish();

  if (!(cfg.pcsm.final_epsilon > 0.0) || !(cfg.pcsm.final_zeta > 0.0)) {
    fail("pcsm tolerances must be positive");
  }
  if (cfg.pcsm.p1 < 1) fail("pcsm.p1 must be at least 1");
  if (cfg.bench.tolerances.empty()) fail("bench.tolerances must be nonempty");
  if (cfg.scan.grid.resolution < 1) fail("scan.resolution must be positive");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config file " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::parse_error& e) {
    fail(path + ": " + e.what());
  }
  return parse_config(j);
}

void apply_environment(RunConfig& cfg) {
  if (const char* seed = std::getenv("PCSM_SEED"); seed != nullptr && *seed != '\0') {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(seed, &end, 10);
    if (end == seed || *end != '\0') fail(std::string("PCSM_SEED is not an integer: ") + seed);
    cfg.pcsm.seed = v;
  }
  if (const char* dir = std::getenv("PCSM_OUT_DIR"); dir != nullptr && *dir != '\0') {
    cfg.out_dir = dir;
  }
}

std::unique_ptr<SampledProblem> make_problem(const ProblemConfig& cfg) {
  try {
    if (cfg.type == "artificial") return std::make_unique<problems::ArtificialProblem>(cfg.artificial);
    if (cfg.type == "mean") return problems::mean_limit_problem();
    if (cfg.type == "pinn") return std::make_unique<problems::PinnProblem>(cfg.pinn);
  } catch (const PcsmError& e) {
    fail(std::string("problem: ") + e.what());
  }
  fail("unknown problem type " + cfg.type);
}

Vector initial_point(const RunConfig& cfg, const SampledProblem& p) {
  const Index n = p.num_variables();
  if (cfg.x0) {
    if (static_cast<Index>(cfg.x0->size()) != n) {
      fail("x0 has " + std::to_string(cfg.x0->size()) + " entries, problem has " +
           std::to_string(n) + " variables");
    }
    return Eigen::Map<const Vector>(cfg.x0->data(), n);
  }
  if (cfg.problem.type == "pinn") return problems::initial_parameters(cfg.problem.pinn, cfg.x0_seed);
  std::mt19937_64 rng(cfg.x0_seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Vector x(n);
  for (Index k = 0; k < n; ++k) x(k) = unit(rng);
  return x;
}

}  // namespace pcsm::cli
