#include "odelab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "odelab/errors.hpp"

namespace odelab {
namespace {

constexpr const char* kPalette[] = {"#1f6f8b", "#c2571a", "#3a7d44", "#8b2252", "#5a5a9f"};
constexpr int kPaletteSize = 5;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// Text payloads pass through XML escaping so arbitrary labels stay valid.
std::string escape(const std::string& s) {
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

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void grow(double v) {
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }

  // Degenerate spans widen symmetrically so a flat series still plots.
  void widen() {
    if (lo > hi) {
      lo = 0.0;
      hi = 1.0;
    } else if (hi - lo < 1e-300) {
      double pad = std::max(1.0, std::abs(lo)) * 0.5;
      lo -= pad;
      hi += pad;
    }
  }
};

}  // namespace

void write_svg_plot(const std::string& path, const std::string& title,
                    const std::vector<SvgSeries>& series, int width, int height) {
  require(!series.empty(), Err::BadConfig, "plot needs at least one series");
  require(width >= 100 && height >= 100, Err::BadConfig, "plot canvas too small");

  Range rx, ry;
  for (const SvgSeries& s : series) {
    require(s.x.size() == s.y.size(), Err::DimMismatch,
            "series '" + s.label + "' has unequal x/y lengths");
    for (double v : s.x) rx.grow(v);
    for (double v : s.y) ry.grow(v);
  }
  rx.widen();
  ry.widen();

  // Fixed margins leave room for the title, tick labels, and legend.
  const double ml = 64.0, mr = 16.0, mt = 36.0, mb = 44.0;
  const double pw = width - ml - mr;
  const double ph = height - mt - mb;
  auto px = [&](double v) { return ml + (v - rx.lo) / (rx.hi - rx.lo) * pw; };
  auto py = [&](double v) { return mt + ph - (v - ry.lo) / (ry.hi - ry.lo) * ph; };

  std::ofstream out(path, std::ios::binary);
  require(out.good(), Err::IoError, "cannot write '" + path + "'");

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"#ffffff\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"14\">" << escape(title) << "</text>\n";
  out << "<rect x=\"" << fmt(ml) << "\" y=\"" << fmt(mt) << "\" width=\"" << fmt(pw)
      << "\" height=\"" << fmt(ph) << "\" fill=\"none\" stroke=\"#404040\"/>\n";

  // Four ticks per axis, values at the grid lines.
  for (int t = 0; t <= 4; ++t) {
    double fx = rx.lo + (rx.hi - rx.lo) * t / 4.0;
    double fy = ry.lo + (ry.hi - ry.lo) * t / 4.0;
    out << "<line x1=\"" << fmt(px(fx)) << "\" y1=\"" << fmt(mt + ph) << "\" x2=\""
        << fmt(px(fx)) << "\" y2=\"" << fmt(mt + ph + 5.0) << "\" stroke=\"#404040\"/>\n";
    out << "<text x=\"" << fmt(px(fx)) << "\" y=\"" << fmt(mt + ph + 18.0)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" << fmt(fx)
        << "</text>\n";
    out << "<line x1=\"" << fmt(ml - 5.0) << "\" y1=\"" << fmt(py(fy)) << "\" x2=\"" << fmt(ml)
        << "\" y2=\"" << fmt(py(fy)) << "\" stroke=\"#404040\"/>\n";
    out << "<text x=\"" << fmt(ml - 8.0) << "\" y=\"" << fmt(py(fy) + 3.0)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << fmt(fy)
        << "</text>\n";
  }

  for (std::size_t k = 0; k < series.size(); ++k) {
    const SvgSeries& s = series[k];
    const char* color = kPalette[k % kPaletteSize];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if (!first) out << ' ';
      out << fmt(px(s.x[i])) << ',' << fmt(py(s.y[i]));
      first = false;
    }
    out << "\"/>\n";
    // Legend swatch and label, stacked inside the top-left of the frame.
    double ly = mt + 14.0 + 16.0 * double(k);
    out << "<line x1=\"" << fmt(ml + 8.0) << "\" y1=\"" << fmt(ly) << "\" x2=\""
        << fmt(ml + 28.0) << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << color
        << "\" stroke-width=\"1.5\"/>\n";
    out << "<text x=\"" << fmt(ml + 34.0) << "\" y=\"" << fmt(ly + 3.0)
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(s.label) << "</text>\n";
  }

  out << "</svg>\n";
  require(out.good(), Err::IoError, "write failed for '" + path + "'");
}

}  // namespace odelab
