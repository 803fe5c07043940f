#include "zinbspc/arl_table.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <string>

#include "zinbspc/error.hpp"
#include "zinbspc/io.hpp"
#include "zinbspc/runlength.hpp"

namespace zinbspc {

namespace {

constexpr const char* kHeader = "lambda,L,ucl,p1,theta1,k1,arl,sdrl,se";

double parse_field(const std::string& text, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ParseError("not a number: '" + text + "'", line);
  }
}

}  // namespace

std::vector<ArlTableRow> build_arl_table(const std::vector<GridCell>& grid,
                                         const TableOptions& options) {
  std::vector<ArlTableRow> rows;
  rows.reserve(grid.size());
  // Cells run one after another; each estimate_arl spreads its replications
  // over the workers, which keeps the result independent of the schedule.
  for (const GridCell& cell : grid) {
    SimulationJob job;
    job.chart = cell.chart;
    job.truth = cell.shift;
    job.reps = options.reps;
    job.max_rl = options.max_rl;
    job.master_seed = options.master_seed;
    job.threads = options.threads;
    const ControlLimits limits = compute_limits(cell.chart);
    const RunLengthSummary s = estimate_arl(job);
    rows.push_back({cell.chart.lambda, cell.chart.L, limits.ucl, cell.shift.p, cell.shift.theta,
                    cell.shift.k, s.arl, s.sdrl, s.se_arl});
  }
  return rows;
}

std::vector<GridCell> read_grid(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::map<std::string, std::size_t> columns;
  std::vector<GridCell> grid;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t,") == std::string::npos) continue;
    const auto fields = split_csv_line(line);
    if (columns.empty()) {
      for (std::size_t i = 0; i < fields.size(); ++i) columns[fields[i]] = i;
      for (const char* name : {"lambda", "L", "n", "k", "p", "theta"}) {
        if (!columns.contains(name)) throw ParseError(std::string("grid header lacks ") + name, line_no);
      }
      continue;
    }
    auto get = [&](const std::string& name, double fallback) {
      const auto it = columns.find(name);
      if (it == columns.end() || it->second >= fields.size() || fields[it->second].empty()) {
        return fallback;
      }
      return parse_field(fields[it->second], line_no);
    };
    GridCell cell;
    cell.chart.lambda = get("lambda", 0.0);
    cell.chart.L = get("L", 0.0);
    const double n = get("n", 1.0);
    if (n < 1.0 || n != std::floor(n)) throw ParseError("n must be a positive integer", line_no);
    cell.chart.n = static_cast<int>(n);
    cell.chart.params = {get("k", 0.0), get("p", 0.0), get("theta", 0.0)};
    cell.shift = {get("k1", cell.chart.params.k), get("p1", cell.chart.params.p),
                  get("theta1", cell.chart.params.theta)};
    try {
      cell.chart.validate();
      cell.shift.validate();
    } catch (const DomainError& e) {
      throw ParseError(e.what(), line_no);
    }
    grid.push_back(cell);
  }
  if (columns.empty()) throw ParseError("empty grid file", line_no);
  return grid;
}

std::vector<GridCell> read_grid(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string(), 0);
  return read_grid(in);
}

void write_arl_table(std::ostream& out, const std::vector<ArlTableRow>& rows) {
  out << kHeader << '\n';
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::fixed << std::setprecision(4);
  for (const ArlTableRow& r : rows) {
    out << r.lambda << ',' << r.L << ',' << r.ucl << ',' << r.p1 << ',' << r.theta1 << ','
        << r.k1 << ',' << r.arl << ',' << r.sdrl << ',' << r.se << '\n';
  }
  out.flags(flags);
  out.precision(precision);
}

std::vector<ArlTableRow> read_arl_table(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<ArlTableRow> rows;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != kHeader) throw ParseError("unexpected ARL table header", line_no);
      header_seen = true;
      continue;
    }
    const auto f = split_csv_line(line);
    if (f.size() != 9) throw ParseError("expected 9 fields", line_no);
    ArlTableRow r;
    double* slots[] = {&r.lambda, &r.L, &r.ucl, &r.p1, &r.theta1, &r.k1, &r.arl, &r.sdrl, &r.se};
    for (std::size_t i = 0; i < 9; ++i) *slots[i] = parse_field(f[i], line_no);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace zinbspc
