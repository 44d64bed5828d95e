#include "aeg/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace aeg {

namespace {

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
                          "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double log10v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "1e%d", static_cast<int>(std::lround(log10v)));
  return buf;
}

}  // namespace

std::string render_loglog_svg(const std::vector<PlotPanel>& panels, int width, int panel_height) {
  const int total_height = panel_height * static_cast<int>(panels.size());
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << total_height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  const double margin_l = 70, margin_r = 150, margin_t = 40, margin_b = 45;

  for (std::size_t pi = 0; pi < panels.size(); ++pi) {
    const PlotPanel& panel = panels[pi];
    const double top = static_cast<double>(pi) * panel_height;
    const double plot_w = width - margin_l - margin_r;
    const double plot_h = panel_height - margin_t - margin_b;

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const PlotSeries& s : panel.series) {
      for (const auto& [x, y] : s.points) {
        if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y)) continue;
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
      }
    }
    if (!(xmin < xmax)) { xmin = 1.0; xmax = 10.0; }
    if (!(ymin < ymax)) { ymin = 1e-1; ymax = 1.0; }

    const double lx0 = std::log10(xmin), lx1 = std::log10(xmax);
    const double ly0 = std::log10(ymin), ly1 = std::log10(ymax);
    auto sx = [&](double x) { return margin_l + (std::log10(x) - lx0) / (lx1 - lx0) * plot_w; };
    auto sy = [&](double y) {
      return top + margin_t + plot_h - (std::log10(y) - ly0) / (ly1 - ly0) * plot_h;
    };

    svg << "<rect x=\"" << fmt(margin_l) << "\" y=\"" << fmt(top + margin_t) << "\" width=\""
        << fmt(plot_w) << "\" height=\"" << fmt(plot_h)
        << "\" fill=\"none\" stroke=\"#333\"/>\n";
    svg << "<text x=\"" << fmt(margin_l) << "\" y=\"" << fmt(top + margin_t - 12)
        << "\" font-size=\"14\">" << panel.title << "</text>\n";

    // decade ticks
    for (int e = static_cast<int>(std::ceil(lx0)); e <= static_cast<int>(std::floor(lx1)); ++e) {
      const double px = sx(std::pow(10.0, e));
      svg << "<line x1=\"" << fmt(px) << "\" y1=\"" << fmt(top + margin_t) << "\" x2=\"" << fmt(px)
          << "\" y2=\"" << fmt(top + margin_t + plot_h)
          << "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
      svg << "<text x=\"" << fmt(px - 10) << "\" y=\"" << fmt(top + margin_t + plot_h + 16)
          << "\">" << tick_label(e) << "</text>\n";
    }
    for (int e = static_cast<int>(std::ceil(ly0)); e <= static_cast<int>(std::floor(ly1)); ++e) {
      const double py = sy(std::pow(10.0, e));
      svg << "<line x1=\"" << fmt(margin_l) << "\" y1=\"" << fmt(py) << "\" x2=\""
          << fmt(margin_l + plot_w) << "\" y2=\"" << fmt(py)
          << "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
      svg << "<text x=\"" << fmt(margin_l - 45) << "\" y=\"" << fmt(py + 4) << "\">"
          << tick_label(e) << "</text>\n";
    }

    svg << "<text x=\"" << fmt(margin_l + plot_w / 2) << "\" y=\""
        << fmt(top + panel_height - 8) << "\">" << panel.x_label << "</text>\n";

    for (std::size_t si = 0; si < panel.series.size(); ++si) {
      const PlotSeries& s = panel.series[si];
      const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
      std::ostringstream pts;
      bool any = false;
      for (const auto& [x, y] : s.points) {
        if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y)) continue;
        pts << fmt(sx(x)) << ',' << fmt(sy(y)) << ' ';
        any = true;
      }
      if (any) {
        svg << "<polyline fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.5\" points=\"" << pts.str() << "\"/>\n";
      }
      const double ly = top + margin_t + 14 + 16 * static_cast<double>(si);
      svg << "<line x1=\"" << fmt(margin_l + plot_w + 8) << "\" y1=\"" << fmt(ly - 4) << "\" x2=\""
          << fmt(margin_l + plot_w + 28) << "\" y2=\"" << fmt(ly - 4) << "\" stroke=\"" << color
          << "\" stroke-width=\"2\"/>\n";
      svg << "<text x=\"" << fmt(margin_l + plot_w + 32) << "\" y=\"" << fmt(ly) << "\">"
          << s.label << "</text>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace aeg
