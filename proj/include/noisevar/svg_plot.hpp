#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

// Minimal static line charts: vertically stacked panels sharing an x axis,
// one <polyline> per series.
namespace noisevar::svg {

struct Series {
  std::string label;
  std::string color;
  std::vector<double> x;
  std::vector<double> y;
};

struct Panel {
  std::string title;
  std::vector<Series> series;
  // Values outside the range are clamped to the panel edge.
  std::optional<double> y_min;
  std::optional<double> y_max;
};

struct Layout {
  double width = 960.0;
  double panel_height = 300.0;
  double margin_left = 70.0;
  double margin_right = 170.0;
  double margin_top = 30.0;
  double gap = 50.0;
};

inline std::string fixed(double v, int digits = 2) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, digits);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("0");
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
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

inline std::string render(const std::vector<Panel>& panels, const std::string& x_label,
                          const Layout& layout = {}) {
  const double plot_w = layout.width - layout.margin_left - layout.margin_right;
  const double height = layout.margin_top +
                        static_cast<double>(panels.size()) * (layout.panel_height + layout.gap);

  double x_lo = INFINITY, x_hi = -INFINITY;
  for (const auto& p : panels)
    for (const auto& s : p.series)
      for (double v : s.x) {
        x_lo = std::min(x_lo, v);
        x_hi = std::max(x_hi, v);
      }
  if (!(x_hi > x_lo)) {
    x_lo = 0.0;
    x_hi = 1.0;
  }

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(layout.width, 0)
      << "\" height=\"" << fixed(height, 0) << "\" viewBox=\"0 0 " << fixed(layout.width, 0) << ' '
      << fixed(height, 0) << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (std::size_t pi = 0; pi < panels.size(); ++pi) {
    const auto& panel = panels[pi];
    const double top = layout.margin_top + static_cast<double>(pi) * (layout.panel_height + layout.gap);
    const double bottom = top + layout.panel_height;

    double y_lo = INFINITY, y_hi = -INFINITY;
    for (const auto& s : panel.series)
      for (double v : s.y)
        if (std::isfinite(v)) {
          y_lo = std::min(y_lo, v);
          y_hi = std::max(y_hi, v);
        }
    if (panel.y_min) y_lo = *panel.y_min;
    if (panel.y_max) y_hi = *panel.y_max;
    if (!(y_hi > y_lo)) {
      y_lo -= 0.5;
      y_hi += 0.5;
    }

    auto px = [&](double v) { return layout.margin_left + (v - x_lo) / (x_hi - x_lo) * plot_w; };
    auto py = [&](double v) {
      const double c = std::clamp(v, y_lo, y_hi);
      return bottom - (c - y_lo) / (y_hi - y_lo) * layout.panel_height;
    };

    out << "<g class=\"panel\">\n"
        << "<text x=\"" << fixed(layout.margin_left) << "\" y=\"" << fixed(top - 8.0) << "\">"
        << escape(panel.title) << "</text>\n"
        << "<rect x=\"" << fixed(layout.margin_left) << "\" y=\"" << fixed(top) << "\" width=\""
        << fixed(plot_w) << "\" height=\"" << fixed(layout.panel_height)
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
      const double v = y_lo + (y_hi - y_lo) * t / 4.0;
      out << "<text x=\"" << fixed(layout.margin_left - 6.0) << "\" y=\"" << fixed(py(v) + 4.0)
          << "\" text-anchor=\"end\">" << fixed(v, 3) << "</text>\n";
    }
    for (int t = 0; t <= 5; ++t) {
      const double v = x_lo + (x_hi - x_lo) * t / 5.0;
      out << "<text x=\"" << fixed(px(v)) << "\" y=\"" << fixed(bottom + 16.0)
          << "\" text-anchor=\"middle\">" << fixed(v, 1) << "</text>\n";
    }

    for (std::size_t si = 0; si < panel.series.size(); ++si) {
      const auto& s = panel.series[si];
      out << "<polyline fill=\"none\" stroke=\"" << escape(s.color)
          << "\" stroke-width=\"1\" data-label=\"" << escape(s.label) << "\" points=\"";
      const std::size_t n = std::min(s.x.size(), s.y.size());
      bool first = true;
      for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(s.y[i])) continue;
        if (!first) out << ' ';
        out << fixed(px(s.x[i])) << ',' << fixed(py(s.y[i]));
        first = false;
      }
      out << "\"/>\n";
      const double ly = top + 14.0 + 18.0 * static_cast<double>(si);
      const double lx = layout.margin_left + plot_w + 12.0;
      out << "<line x1=\"" << fixed(lx) << "\" y1=\"" << fixed(ly - 4.0) << "\" x2=\""
          << fixed(lx + 20.0) << "\" y2=\"" << fixed(ly - 4.0) << "\" stroke=\"" << escape(s.color)
          << "\" stroke-width=\"2\"/>\n"
          << "<text x=\"" << fixed(lx + 26.0) << "\" y=\"" << fixed(ly) << "\">" << escape(s.label)
          << "</text>\n";
    }
    out << "</g>\n";
  }
  const double last_bottom = height - layout.gap;
  out << "<text x=\"" << fixed(layout.margin_left + plot_w / 2.0) << "\" y=\""
      << fixed(last_bottom + 34.0) << "\" text-anchor=\"middle\">" << escape(x_label)
      << "</text>\n"
      << "</svg>\n";
  return out.str();
}

}  // namespace noisevar::svg
