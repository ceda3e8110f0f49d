#pragma once
// Minimal line-plot writer. Plots are a viewing convenience layered over the
// CSV data; the numbers in CSV/JSON stay the artifact of record. Output is
// deterministic: fixed layout, fixed palette, no timestamps.

#include <string>
#include <vector>

#include "odelab/linalg.hpp"

namespace odelab {

struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

// Writes one SVG file with all series drawn as polylines over a common axis
// box, a tick-labelled frame, and a legend. Throws DimMismatch when a series
// has unequal x/y lengths, BadConfig when there is nothing to draw, IoError
// on file failure.
void write_svg_plot(const std::string& path, const std::string& title,
                    const std::vector<SvgSeries>& series, int width = 640, int height = 400);

}  // namespace odelab
