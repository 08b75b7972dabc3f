#include "pcsm/trace_io.hpp"

#include "pcsm/errors.hpp"

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

namespace pcsm::io {

namespace {

constexpr const char* kTraceHeader =
    "k,sample_size,epsilon,zeta,cumulative_constraint_grad_evals,grad_L_norm,grad_L_norm_full,"
    "reduced_hess_min_eig,iterations,wall_time_seconds";
constexpr const char* kHistoryHeader = "k,constraint_grad_evals,grad_L_norm_full";
constexpr const char* kMorseHeader = "x1,x2,grad_L_norm,lambda_min_abs,lambda_min,rank_ok";
constexpr const char* kBenchHeader = "tolerance,evals_one_shot,evals_progressive,ratio,status";

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// Reads the header, then yields each data row split into fields.
std::vector<std::vector<std::string>> read_rows(std::istream& is, const char* header,
                                                std::size_t min_fields) {
  std::string line;
  if (!std::getline(is, line) || line != header) {
    throw PcsmError(ErrorCode::ConfigError, std::string("unexpected CSV header, wanted ") + header);
  }
  std::vector<std::vector<std::string>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto fields = split(line);
    if (fields.size() < min_fields) throw PcsmError(ErrorCode::ConfigError, "short CSV row: " + line);
    rows.push_back(std::move(fields));
  }
  return rows;
}

double parse_real(const std::string& s) { return std::strtod(s.c_str(), nullptr); }
long long parse_int(const std::string& s) { return std::strtoll(s.c_str(), nullptr, 10); }
std::uint64_t parse_uint(const std::string& s) { return std::strtoull(s.c_str(), nullptr, 10); }

}  // namespace

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trace_csv(std::ostream& os, const RunTrace& trace) {
  os << kTraceHeader << '\n';
  for (const LevelRecord& r : trace) {
    os << r.k << ',' << r.sample_size << ',' << format_real(r.epsilon) << ','
       << format_real(r.zeta) << ',' << r.cumulative_constraint_grad_evals << ','
       << format_real(r.grad_lagrangian_norm) << ',' << format_real(r.grad_lagrangian_norm_full)
       << ',' << format_real(r.reduced_hess_min_eig) << ',' << r.iterations << ','
       << format_real(r.wall_time_seconds) << '\n';
  }
}

RunTrace read_trace_csv(std::istream& is) {
  RunTrace out;
  for (const auto& f : read_rows(is, kTraceHeader, 10)) {
    LevelRecord r;
    r.k = parse_int(f[0]);
    r.sample_size = parse_int(f[1]);
    r.epsilon = parse_real(f[2]);
    r.zeta = parse_real(f[3]);
    r.cumulative_constraint_grad_evals = parse_uint(f[4]);
    r.grad_lagrangian_norm = parse_real(f[5]);
    r.grad_lagrangian_norm_full = parse_real(f[6]);
    r.reduced_hess_min_eig = parse_real(f[7]);
    r.iterations = parse_int(f[8]);
    r.wall_time_seconds = parse_real(f[9]);
    out.push_back(r);
  }
  return out;
}

void write_history_csv(std::ostream& os, const std::vector<HistoryPoint>& history) {
  os << kHistoryHeader << '\n';
  for (const HistoryPoint& h : history) {
    os << h.k << ',' << h.constraint_grad_evals << ',' << format_real(h.grad_lagrangian_norm_full)
       << '\n';
  }
}

std::vector<HistoryPoint> read_history_csv(std::istream& is) {
  std::vector<HistoryPoint> out;
  for (const auto& f : read_rows(is, kHistoryHeader, 3)) {
    out.push_back({parse_int(f[0]), parse_uint(f[1]), parse_real(f[2])});
  }
  return out;
}

void write_morse_csv(std::ostream& os, const theory::MorseGrid& grid) {
  os << kMorseHeader << '\n';
  for (const theory::MorsePoint& p : grid.points) {
    os << format_real(p.x1) << ',' << format_real(p.x2) << ',' << format_real(p.grad_l_norm) << ','
       << format_real(p.lambda_min_abs) << ',' << format_real(p.lambda_min) << ','
       << (p.rank_ok ? 1 : 0) << '\n';
  }
}

std::vector<theory::MorsePoint> read_morse_csv(std::istream& is) {
  std::vector<theory::MorsePoint> out;
  for (const auto& f : read_rows(is, kMorseHeader, 6)) {
    theory::MorsePoint p;
    p.x1 = parse_real(f[0]);
    p.x2 = parse_real(f[1]);
    p.grad_l_norm = parse_real(f[2]);
    p.lambda_min_abs = parse_real(f[3]);
    p.lambda_min = parse_real(f[4]);
    p.rank_ok = f[5] == "1";
    out.push_back(p);
  }
  return out;
}

void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows) {
  os << kBenchHeader << '\n';
  for (const BenchRow& r : rows) {
    os << format_real(r.tolerance) << ',' << r.evals_one_shot << ',' << r.evals_progressive << ','
       << format_real(r.ratio) << ',' << r.status << '\n';
  }
}

std::vector<BenchRow> read_bench_csv(std::istream& is) {
  std::vector<BenchRow> out;
  for (const auto& f : read_rows(is, kBenchHeader, 5)) {
    BenchRow r;
    r.tolerance = parse_real(f[0]);
    r.evals_one_shot = parse_uint(f[1]);
    r.evals_progressive = parse_uint(f[2]);
    r.ratio = parse_real(f[3]);
    // The status may itself contain commas.
    r.status = f[4];
    for (std::size_t k = 5; k < f.size(); ++k) r.status += "," + f[k];
    out.push_back(r);
  }
  return out;
}

}  // namespace pcsm::io
