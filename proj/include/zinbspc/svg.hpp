#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "zinbspc/arl_table.hpp"
#include "zinbspc/monitor.hpp"

namespace zinbspc {

/// Monitoring chart: z path, UCL and CL lines, a Phase I/II divider and one
/// `<circle class="ooc">` per Phase II signal.
std::string chart_svg(const MonitoringRun& run, const std::string& title = {});
void render_chart(const MonitoringRun& run, const std::filesystem::path& path,
                  const std::string& title = {});

/// ARL against shift on a log axis: one `<polyline class="arl-curve">` per
/// (lambda, L) pair, with shifts in table order along the x axis.
std::string arl_curves_svg(const std::vector<ArlTableRow>& rows, const std::string& title = {});
void render_arl_curves(const std::vector<ArlTableRow>& rows, const std::filesystem::path& path,
                       const std::string& title = {});

}  // namespace zinbspc
