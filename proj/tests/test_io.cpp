#include <gtest/gtest.h>

#include <sstream>

#include "zinbspc/arl_table.hpp"
#include "zinbspc/error.hpp"
#include "zinbspc/io.hpp"
#include "zinbspc/runlength.hpp"

using namespace zinbspc;

namespace {

std::vector<std::int64_t> read(const std::string& text, const std::string& column = {}) {
  std::istringstream in(text);
  return read_counts(in, column);
}

}  // namespace

TEST(ReadCounts, PlainColumn) {
  EXPECT_EQ(read("3\n0\n7\n"), (std::vector<std::int64_t>{3, 0, 7}));
}

TEST(ReadCounts, HeaderDetected) {
  EXPECT_EQ(read("SiblingNegotiation\n4\n0\n"), (std::vector<std::int64_t>{4, 0}));
}

TEST(ReadCounts, BlankLinesAndCrlf) {
  EXPECT_EQ(read("count\r\n\r\n5\r\n\n6\r\n"), (std::vector<std::int64_t>{5, 6}));
}

TEST(ReadCounts, SelectByNameAndIndex) {
  const std::string text = "\"Nest\",\"Food\",\"SiblingNegotiation\"\n\"A\",\"Dep\",4\n\"B\",\"Sat\",0\n";
  EXPECT_EQ(read(text, "SiblingNegotiation"), (std::vector<std::int64_t>{4, 0}));
  EXPECT_EQ(read(text, "3"), (std::vector<std::int64_t>{4, 0}));
  EXPECT_THROW(read(text, "Missing"), ParseError);
}

TEST(ReadCounts, ErrorsCarryLineNumber) {
  try {
    read("count\n1\n\nx\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
  }
  try {
    read("1\n-2\n");
    FAIL();
  } catch (const NegativeCountError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(read("1\n2.5\n"), ParseError);
}

TEST(ReadCounts, NumericFirstRowIsData) {
  EXPECT_EQ(read("1,2\n3,4\n", "2"), (std::vector<std::int64_t>{2, 4}));
}

TEST(IngestCounts, FixtureFile) {
  const auto y = ingest_counts(std::string(ZINBSPC_TEST_DATA) + "/synthetic_zinb.csv", "count");
  EXPECT_EQ(y.size(), 599u);
  EXPECT_THROW(ingest_counts("/nonexistent/file.csv"), ParseError);
}

TEST(ArlTable, CsvRoundTrip) {
  const std::vector<ArlTableRow> rows{{0.05, 3.105, 0.6832, 0.4, 0.85, 1.0, 500.81234, 501.87, 5.0187},
                                      {1.0, 8.435, 7.9988, 0.33, 0.8, 2.0, 162.38, 162.63, 1.6263}};
  std::ostringstream out;
  write_arl_table(out, rows);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "lambda,L,ucl,p1,theta1,k1,arl,sdrl,se");
  std::istringstream in(out.str());
  const auto back = read_arl_table(in);
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_NEAR(back[i].lambda, rows[i].lambda, 5e-5);
    EXPECT_NEAR(back[i].L, rows[i].L, 5e-5);
    EXPECT_NEAR(back[i].ucl, rows[i].ucl, 5e-5);
    EXPECT_NEAR(back[i].p1, rows[i].p1, 5e-5);
    EXPECT_NEAR(back[i].theta1, rows[i].theta1, 5e-5);
    EXPECT_NEAR(back[i].k1, rows[i].k1, 5e-5);
    EXPECT_NEAR(back[i].arl, rows[i].arl, 5e-5);
    EXPECT_NEAR(back[i].sdrl, rows[i].sdrl, 5e-5);
    EXPECT_NEAR(back[i].se, rows[i].se, 5e-5);
  }
  std::ostringstream again;
  write_arl_table(again, back);
  EXPECT_EQ(again.str(), out.str());
}

TEST(ArlTable, SingleCellMatchesDirectEstimate) {
  GridCell cell{{0.2, 3.631, 10, {1.0, 0.4, 0.85}}, {1.0, 0.35, 0.85}};
  TableOptions opt;
  opt.reps = 2000;
  const auto rows = build_arl_table({cell}, opt);
  SimulationJob job;
  job.chart = cell.chart;
  job.truth = cell.shift;
  job.reps = 2000;
  const auto s = estimate_arl(job);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].arl, s.arl);
  EXPECT_EQ(rows[0].sdrl, s.sdrl);
  EXPECT_EQ(rows[0].se, s.se_arl);
  EXPECT_NEAR(rows[0].ucl, 0.5777, 1e-4);
}

TEST(ArlTable, ReadGridDefaultsShiftToInControl) {
  std::istringstream in("lambda,L,n,k,p,theta,p1\n0.1,3,1,1,0.4,0.85,0.35\n1,8.435,1,1,0.4,0.85,\n");
  const auto grid = read_grid(in);
  ASSERT_EQ(grid.size(), 2u);
  EXPECT_EQ(grid[0].shift.p, 0.35);
  EXPECT_EQ(grid[0].shift.k, 1.0);
  EXPECT_EQ(grid[1].shift.p, 0.4);
}

TEST(ArlTable, ReadGridErrors) {
  std::istringstream missing("lambda,L,n,k,p\n0.1,3,1,1,0.4\n");
  EXPECT_THROW(read_grid(missing), ParseError);
  std::istringstream bad("lambda,L,n,k,p,theta\n0.1,3,1,1,1.4,0.85\n");
  EXPECT_THROW(read_grid(bad), ParseError);
}
