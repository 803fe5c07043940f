#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "zinbspc/chart.hpp"
#include "zinbspc/distributions.hpp"

namespace zinbspc {

struct ArlTableRow {
  double lambda = 0.0;
  double L = 0.0;
  double ucl = 0.0;
  double p1 = 0.0;
  double theta1 = 0.0;
  double k1 = 0.0;
  double arl = 0.0;
  double sdrl = 0.0;
  double se = 0.0;
};

/// One table cell: a chart designed on chart.params, run on `shift`.
struct GridCell {
  ChartConfig chart;
  ZinbParams shift;
};

struct TableOptions {
  std::int64_t reps = 10'000;
  std::int64_t max_rl = 1'000'000;
  std::uint64_t master_seed = 20240101;
  unsigned threads = 0;
};

/// Every cell uses the same master seed, so a single-cell grid matches a
/// direct estimate_arl call.
std::vector<ArlTableRow> build_arl_table(const std::vector<GridCell>& grid,
                                         const TableOptions& options);

/// Grid file: header with lambda,L,n,k,p,theta and optionally p1,theta1,k1
/// (missing shift columns default to the in-control values).
std::vector<GridCell> read_grid(std::istream& in);
std::vector<GridCell> read_grid(const std::filesystem::path& path);

/// Header "lambda,L,ucl,p1,theta1,k1,arl,sdrl,se", 4 decimals.
void write_arl_table(std::ostream& out, const std::vector<ArlTableRow>& rows);
std::vector<ArlTableRow> read_arl_table(std::istream& in);

}  // namespace zinbspc
