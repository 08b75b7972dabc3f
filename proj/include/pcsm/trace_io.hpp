#pragma once

// CSV serialization of run traces, audit histories, Morse grids and benchmark
// tables. Reals are written with 17 significant digits so that reading a file
// back reproduces the in-memory records exactly.

#include "pcsm/driver.hpp"
#include "pcsm/theory.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace pcsm::io {

struct BenchRow {
  double tolerance = 0.0;
  std::uint64_t evals_one_shot = 0;
  std::uint64_t evals_progressive = 0;
  double ratio = 0.0;
  std::string status = "ok";  // "ok" or "failed: <reason>"

  friend bool operator==(const BenchRow&, const BenchRow&) = default;
};

std::string format_real(double v);

void write_trace_csv(std::ostream& os, const RunTrace& trace);
RunTrace read_trace_csv(std::istream& is);

void write_history_csv(std::ostream& os, const std::vector<HistoryPoint>& history);
std::vector<HistoryPoint> read_history_csv(std::istream& is);

void write_morse_csv(std::ostream& os, const theory::MorseGrid& grid);
std::vector<theory::MorsePoint> read_morse_csv(std::istream& is);

void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows);
std::vector<BenchRow> read_bench_csv(std::istream& is);

}  // namespace pcsm::io
