#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "zinbspc/svg.hpp"

using namespace zinbspc;

namespace {

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

MonitoringRun small_run(std::size_t phase1_end) {
  const std::vector<std::int64_t> y{0, 1, 0, 9, 0, 0, 12, 14, 0, 1};
  return run_chart(y, phase1_end, {1.0, 3.0, 1, {1.0, 0.4, 0.85}});
}

}  // namespace

TEST(ChartSvg, OneMarkerPerPhaseTwoSignal) {
  const auto run = small_run(5);
  const auto svg = chart_svg(run);
  EXPECT_EQ(count(svg, "<circle class=\"ooc\""), run.ooc_indices.size());
  EXPECT_EQ(run.ooc_indices, (std::vector<std::size_t>{7, 8}));
  EXPECT_EQ(count(svg, "class=\"phase1-signal\""), 1u);
  EXPECT_EQ(count(svg, "class=\"ucl\""), 1u);
  EXPECT_EQ(count(svg, "class=\"cl\""), 1u);
  EXPECT_EQ(count(svg, "class=\"phase-divider\""), 1u);
  EXPECT_EQ(count(svg, "class=\"z-path\""), 1u);
  EXPECT_EQ(svg.rfind("</svg>\n"), svg.size() - 7);
}

TEST(ChartSvg, EmptyPhaseTwo) {
  const auto run = small_run(10);
  const auto svg = chart_svg(run);
  EXPECT_EQ(count(svg, "<circle class=\"ooc\""), 0u);
  EXPECT_EQ(count(svg, "class=\"phase-divider\""), 0u);
}

TEST(ArlSvg, OneCurvePerLambdaOnLogAxis) {
  std::vector<ArlTableRow> rows;
  const double lambdas[] = {1.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.5, 0.8};
  for (double lam : lambdas) {
    double arl = 500.0;
    for (double p1 : {0.4, 0.38, 0.35, 0.33}) {
      rows.push_back({lam, 3.0, 1.0, p1, 0.85, 1.0, arl, arl, 1.0});
      arl *= 0.6;
    }
  }
  const auto svg = arl_curves_svg(rows, "ARL");
  EXPECT_EQ(count(svg, "<polyline class=\"arl-curve\""), 8u);
  // Each curve descends left to right: svg y grows as ARL falls.
  std::regex pts("class=\"arl-curve\"[^>]*points=\"([^\"]*)\"");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), pts); it != std::sregex_iterator(); ++it) {
    std::istringstream in((*it)[1].str());
    double x, y, prev_x = -1, prev_y = -1;
    char comma;
    while (in >> x >> comma >> y) {
      EXPECT_GT(x, prev_x);
      EXPECT_GT(y, prev_y);
      prev_x = x;
      prev_y = y;
    }
  }
  EXPECT_NE(svg.find("Shewhart"), std::string::npos);
}

TEST(RenderFiles, WritesSvg) {
  const auto dir = std::filesystem::temp_directory_path();
  const auto path = dir / "zinbspc_render_test.svg";
  render_chart(small_run(5), path);
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_NE(ss.str().find("<svg"), std::string::npos);
  std::filesystem::remove(path);
  EXPECT_THROW(render_chart(small_run(5), "/nonexistent/dir/x.svg"), std::runtime_error);
}
