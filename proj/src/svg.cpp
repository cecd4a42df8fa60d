#include "annulus/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "annulus/common.hpp"

namespace annulus {

namespace {

constexpr double kWidth = 480.0;
constexpr double kHeight = 360.0;
constexpr double kMargin = 56.0;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '-':
        // "--" is not allowed inside XML comments.
        out += (!out.empty() && out.back() == '-') ? " -" : "-";
        break;
      default: out += c;
    }
  }
  return out;
}

std::string fixed(double v) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(2);
  s << v;
  return s.str();
}

std::string tick(double v) {
  std::ostringstream s;
  s.precision(3);
  s << v;
  return s.str();
}

void render_panel(std::ostringstream& out, const PlotPanel& panel, double x0) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (const auto& s : panel.series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  if (!(xmax > xmin)) xmin -= 0.5, xmax += 0.5;
  if (!(ymax > ymin)) ymin -= 0.5, ymax += 0.5;
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;
  auto px = [&](double x) { return x0 + kMargin + (x - xmin) / (xmax - xmin) * (kWidth - 1.5 * kMargin); };
  auto py = [&](double y) { return kHeight - kMargin - (y - ymin) / (ymax - ymin) * (kHeight - 1.5 * kMargin); };

  out << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<text x=\"" << fixed(x0 + kWidth / 2) << "\" y=\"18\" text-anchor=\"middle\" font-size=\"13\">"
      << escape(panel.title) << "</text>\n";
  out << "<rect x=\"" << fixed(px(xmin)) << "\" y=\"" << fixed(py(ymax)) << "\" width=\""
      << fixed(px(xmax) - px(xmin)) << "\" height=\"" << fixed(py(ymin) - py(ymax))
      << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = xmin + (xmax - xmin) * t / 4.0;
    const double yv = ymin + (ymax - ymin) * t / 4.0;
    out << "<text x=\"" << fixed(px(xv)) << "\" y=\"" << fixed(py(ymin) + 14) << "\" text-anchor=\"middle\">"
        << tick(xv) << "</text>\n";
    out << "<text x=\"" << fixed(px(xmin) - 4) << "\" y=\"" << fixed(py(yv) + 4) << "\" text-anchor=\"end\">"
        << tick(yv) << "</text>\n";
  }
  out << "<text x=\"" << fixed(x0 + kWidth / 2) << "\" y=\"" << fixed(kHeight - 12)
      << "\" text-anchor=\"middle\">" << escape(panel.x_label) << "</text>\n";
  out << "<text x=\"" << fixed(x0 + 14) << "\" y=\"" << fixed(kHeight / 2) << "\" transform=\"rotate(-90 "
      << fixed(x0 + 14) << ' ' << fixed(kHeight / 2) << ")\" text-anchor=\"middle\">" << escape(panel.y_label)
      << "</text>\n";

  std::size_t color = 0;
  for (const auto& s : panel.series) {
    const char* stroke = kColors[color++ % std::size(kColors)];
    out << "<!-- series: " << escape(s.label) << "\n";
    for (std::size_t i = 0; i < s.x.size(); ++i) out << format_real(s.x[i]) << ',' << format_real(s.y[i]) << '\n';
    out << "-->\n<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.5\""
        << (s.dashed ? " stroke-dasharray=\"5,3\"" : "") << " points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      out << fixed(px(s.x[i])) << ',' << fixed(py(s.y[i])) << ' ';
    }
    out << "\"/>\n";
    const double ly = 34.0 + 14.0 * static_cast<double>(color);
    out << "<line x1=\"" << fixed(x0 + kWidth - 150) << "\" y1=\"" << fixed(ly) << "\" x2=\""
        << fixed(x0 + kWidth - 130) << "\" y2=\"" << fixed(ly) << "\" stroke=\"" << stroke << "\""
        << (s.dashed ? " stroke-dasharray=\"5,3\"" : "") << "/>\n";
    out << "<text x=\"" << fixed(x0 + kWidth - 126) << "\" y=\"" << fixed(ly + 4) << "\">" << escape(s.label)
        << "</text>\n";
  }
  out << "</g>\n";
}

}  // namespace

std::string render_svg(const std::vector<PlotPanel>& panels) {
  std::ostringstream out;
  const double width = kWidth * static_cast<double>(std::max<std::size_t>(1, panels.size()));
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(width) << "\" height=\"" << fixed(kHeight)
      << "\" viewBox=\"0 0 " << fixed(width) << ' ' << fixed(kHeight) << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < panels.size(); ++i) render_panel(out, panels[i], kWidth * static_cast<double>(i));
  out << "</svg>\n";
  return out.str();
}

void write_svg(const std::vector<PlotPanel>& panels, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string());
  out << render_svg(panels);
}

}  // namespace annulus
