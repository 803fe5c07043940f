#include "zinbspc/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "zinbspc/error.hpp"

namespace zinbspc {

namespace {

constexpr double kWidth = 900.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                "#9467bd", "#8c564b", "#e377c2", "#17becf"};

struct Frame {
  double x0, x1, y0, y1;
  bool log_y = false;

  double px(double x) const {
    const double span = x1 > x0 ? x1 - x0 : 1.0;
    return kLeft + (x - x0) / span * (kWidth - kLeft - kRight);
  }
  double py(double y) const {
    double a = y0, b = y1, v = y;
    if (log_y) {
      a = std::log10(a);
      b = std::log10(b);
      v = std::log10(std::max(y, y0));
    }
    const double span = b > a ? b - a : 1.0;
    return kHeight - kBottom - (v - a) / span * (kHeight - kTop - kBottom);
  }
};

std::string escape(const std::string& text) {
  std::string out;
  for (const char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void open_svg(std::ostringstream& s, const std::string& title) {
  s << std::fixed << std::setprecision(2);
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty()) {
    s << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << escape(title) << "</text>\n";
  }
}

void axes(std::ostringstream& s, const std::string& xlabel, const std::string& ylabel) {
  const double xb = kHeight - kBottom;
  s << "<g class=\"axes\" stroke=\"black\">\n"
    << "<line x1=\"" << kLeft << "\" y1=\"" << xb << "\" x2=\"" << kWidth - kRight << "\" y2=\"" << xb << "\"/>\n"
    << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << xb << "\"/>\n"
    << "</g>\n"
    << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"" << kHeight - 12
    << "\" text-anchor=\"middle\">" << escape(xlabel) << "</text>\n"
    << "<text transform=\"translate(18," << (kTop + xb) / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
    << escape(ylabel) << "</text>\n";
}

void y_tick(std::ostringstream& s, const Frame& f, double value, int digits) {
  const double y = f.py(value);
  s << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << y << "\" x2=\"" << kLeft << "\" y2=\"" << y
    << "\" stroke=\"black\"/>\n<text x=\"" << kLeft - 8 << "\" y=\"" << y + 4
    << "\" text-anchor=\"end\">" << std::setprecision(digits) << value << std::setprecision(2)
    << "</text>\n";
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

std::string chart_svg(const MonitoringRun& run, const std::string& title) {
  std::ostringstream s;
  open_svg(s, title);
  double ymax = run.limits.ucl;
  double ymin = std::min(run.limits.lcl, run.limits.cl);
  for (const auto& p : run.points) {
    ymax = std::max(ymax, p.z);
    ymin = std::min(ymin, p.z);
  }
  const double pad = 0.08 * (ymax - ymin > 0 ? ymax - ymin : 1.0);
  const double n = static_cast<double>(std::max<std::size_t>(run.points.size(), 2));
  const Frame f{1.0, n, ymin - pad, ymax + pad};
  axes(s, "Observation", run.config.is_shewhart() ? "Count" : "EWMA statistic");
  for (int i = 0; i <= 4; ++i) y_tick(s, f, f.y0 + (f.y1 - f.y0) * i / 4.0, 2);

  const auto hline = [&](double v, const char* cls, const char* colour, const char* label) {
    s << "<line class=\"" << cls << "\" x1=\"" << kLeft << "\" y1=\"" << f.py(v) << "\" x2=\""
      << kWidth - kRight << "\" y2=\"" << f.py(v) << "\" stroke=\"" << colour
      << "\" stroke-dasharray=\"6 4\"/>\n<text x=\"" << kWidth - kRight + 6 << "\" y=\""
      << f.py(v) + 4 << "\">" << label << ' ' << std::setprecision(4) << v << std::setprecision(2)
      << "</text>\n";
  };
  hline(run.limits.ucl, "ucl", "#d62728", "UCL");
  hline(run.limits.cl, "cl", "#555555", "CL");

  if (run.phase1_end < run.points.size()) {
    const double x = f.px(static_cast<double>(run.phase1_end) + 0.5);
    s << "<line class=\"phase-divider\" x1=\"" << x << "\" y1=\"" << kTop << "\" x2=\"" << x
      << "\" y2=\"" << kHeight - kBottom << "\" stroke=\"#888888\"/>\n"
      << "<text x=\"" << x - 6 << "\" y=\"" << kTop + 12 << "\" text-anchor=\"end\">Phase I</text>\n"
      << "<text x=\"" << x + 6 << "\" y=\"" << kTop + 12 << "\">Phase II</text>\n";
  }

  if (!run.points.empty()) {
    s << "<polyline class=\"z-path\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.2\" points=\"";
    for (const auto& p : run.points) {
      s << f.px(static_cast<double>(p.index)) << ',' << f.py(p.z) << ' ';
    }
    s << "\"/>\n";
  }
  for (const auto& p : run.points) {
    if (!p.signal) continue;
    const bool phase2 = p.index > run.phase1_end;
    s << "<circle class=\"" << (phase2 ? "ooc" : "phase1-signal") << "\" cx=\""
      << f.px(static_cast<double>(p.index)) << "\" cy=\"" << f.py(p.z) << "\" r=\"4\" fill=\""
      << (phase2 ? "#d62728" : "none") << "\" stroke=\"#d62728\"><title>" << p.index
      << "</title></circle>\n";
  }
  s << "</svg>\n";
  return s.str();
}

void render_chart(const MonitoringRun& run, const std::filesystem::path& path,
                  const std::string& title) {
  write_file(path, chart_svg(run, title));
}

std::string arl_curves_svg(const std::vector<ArlTableRow>& rows, const std::string& title) {
  struct Curve {
    double lambda, L;
    std::vector<double> arl;
  };
  std::vector<Curve> curves;
  for (const auto& r : rows) {
    auto it = std::find_if(curves.begin(), curves.end(),
                           [&](const Curve& c) { return c.lambda == r.lambda && c.L == r.L; });
    if (it == curves.end()) {
      curves.push_back({r.lambda, r.L, {}});
      it = std::prev(curves.end());
    }
    it->arl.push_back(r.arl);
  }
  std::size_t shifts = 0;
  double lo = 1e300, hi = 0.0;
  for (const auto& c : curves) {
    shifts = std::max(shifts, c.arl.size());
    for (const double a : c.arl) {
      if (a > 0.0) {
        lo = std::min(lo, a);
        hi = std::max(hi, a);
      }
    }
  }
  if (hi <= 0.0) {
    lo = 1.0;
    hi = 10.0;
  }
  const double y0 = std::pow(10.0, std::floor(std::log10(lo)));
  const double y1 = std::pow(10.0, std::ceil(std::log10(hi * 1.0001)));

  std::ostringstream s;
  open_svg(s, title);
  const Frame f{0.0, static_cast<double>(std::max<std::size_t>(shifts, 2) - 1), y0, y1, true};
  axes(s, "Shift (table order)", "ARL (log scale)");
  for (double d = y0; d <= y1 * 1.0001; d *= 10.0) y_tick(s, f, d, 0);

  // Shift labels come from the first curve that covers each position.
  for (std::size_t i = 0; i < shifts; ++i) {
    std::size_t seen = 0;
    for (const auto& r : rows) {
      if (r.lambda != curves.front().lambda || r.L != curves.front().L) continue;
      if (seen++ != i) continue;
      s << "<text x=\"" << f.px(static_cast<double>(i)) << "\" y=\"" << kHeight - kBottom + 16
        << "\" text-anchor=\"middle\" font-size=\"10\">" << std::setprecision(2) << r.p1 << '/'
        << r.theta1 << '/' << r.k1 << "</text>\n";
    }
  }
  for (std::size_t c = 0; c < curves.size(); ++c) {
    const char* colour = kPalette[c % std::size(kPalette)];
    s << "<polyline class=\"arl-curve\" data-lambda=\"" << std::setprecision(4) << curves[c].lambda
      << "\" fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"" << std::setprecision(2);
    for (std::size_t i = 0; i < curves[c].arl.size(); ++i) {
      s << f.px(static_cast<double>(i)) << ',' << f.py(curves[c].arl[i]) << ' ';
    }
    s << "\"/>\n";
    const double ly = kTop + 16.0 * static_cast<double>(c);
    s << "<line x1=\"" << kWidth - kRight + 10 << "\" y1=\"" << ly << "\" x2=\"" << kWidth - kRight + 30
      << "\" y2=\"" << ly << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n<text x=\""
      << kWidth - kRight + 34 << "\" y=\"" << ly + 4 << "\">"
      << (curves[c].lambda == 1.0 ? std::string("Shewhart") : "EWMA " + [&] {
            std::ostringstream l;
            l << "λ=" << curves[c].lambda;
            return l.str();
          }())
      << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

void render_arl_curves(const std::vector<ArlTableRow>& rows, const std::filesystem::path& path,
                       const std::string& title) {
  write_file(path, arl_curves_svg(rows, title));
}

}  // namespace zinbspc
