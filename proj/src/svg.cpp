#include "avf/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

namespace avf::svg {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

// HSV with full saturation and value to #rrggbb.
std::string hue_color(double h) {
  h = (h - std::floor(h)) * 6.0;
  const int i = static_cast<int>(h) % 6;
  const double f = h - std::floor(h);
  double r = 0, g = 0, b = 0;
  switch (i) {
    case 0: r = 1, g = f, b = 0; break;
    case 1: r = 1 - f, g = 1, b = 0; break;
    case 2: r = 0, g = 1, b = f; break;
    case 3: r = 0, g = 1 - f, b = 1; break;
    case 4: r = f, g = 0, b = 1; break;
    default: r = 1, g = 0, b = 1 - f; break;
  }
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(r * 255)),
                static_cast<int>(std::lround(g * 255)), static_cast<int>(std::lround(b * 255)));
  return buf;
}

}  // namespace

std::string ordered_size_plot(const std::vector<std::int64_t>& sizes, double reference_slope) {
  std::vector<std::int64_t> s;
  for (std::int64_t n : sizes) {
    if (n > 0) s.push_back(n);
  }
  if (s.empty()) throw std::invalid_argument("no positive sizes to plot");
  std::sort(s.begin(), s.end(), std::greater<>());

  const double width = 640, height = 480, margin = 60;
  const double x_lo = 0.0, x_hi = std::max(1.0, std::ceil(std::log10(static_cast<double>(s.front())) + 1e-9));
  const double y_lo = 0.0, y_hi = std::max(1.0, std::ceil(std::log10(static_cast<double>(s.size())) + 1e-9));
  const auto px = [&](double lx) { return margin + (lx - x_lo) / (x_hi - x_lo) * (width - 2 * margin); };
  const auto py = [&](double ly) { return height - margin - (ly - y_lo) / (y_hi - y_lo) * (height - 2 * margin); };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << width - 2 * margin << "\" height=\""
      << height - 2 * margin << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int d = static_cast<int>(x_lo); d <= static_cast<int>(x_hi); ++d) {
    out << "<text x=\"" << fmt(px(d)) << "\" y=\"" << height - margin + 20 << "\" font-size=\"12\" "
        << "text-anchor=\"middle\">1e" << d << "</text>\n";
  }
  for (int d = static_cast<int>(y_lo); d <= static_cast<int>(y_hi); ++d) {
    out << "<text x=\"" << margin - 8 << "\" y=\"" << fmt(py(d) + 4) << "\" font-size=\"12\" "
        << "text-anchor=\"end\">1e" << d << "</text>\n";
  }
  out << "<text x=\"" << width / 2 << "\" y=\"" << height - 15 << "\" font-size=\"13\" text-anchor=\"middle\">"
      << "avalanche size n</text>\n";
  out << "<text x=\"18\" y=\"" << height / 2 << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << height / 2 << ")\">rank (number of sizes &#8805; n)</text>\n";

  // Thin out identical ranks for large inputs: keep the last point of each
  // run of equal sizes.
  out << "<g fill=\"black\">\n";
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (k + 1 < s.size() && s[k + 1] == s[k]) continue;
    const double lx = std::log10(static_cast<double>(s[k]));
    const double ly = std::log10(static_cast<double>(k + 1));
    out << "<circle cx=\"" << fmt(px(lx)) << "\" cy=\"" << fmt(py(ly)) << "\" r=\"1.5\"/>\n";
  }
  out << "</g>\n";

  const std::size_t mid = s.size() / 2;
  const double ax = std::log10(static_cast<double>(s[mid]));
  const double ay = std::log10(static_cast<double>(mid + 1));
  const double x0 = x_lo, x1 = x_hi;
  out << "<line x1=\"" << fmt(px(x0)) << "\" y1=\"" << fmt(py(ay + reference_slope * (x0 - ax))) << "\" x2=\""
      << fmt(px(x1)) << "\" y2=\"" << fmt(py(ay + reference_slope * (x1 - ax))) << "\" stroke=\"red\" "
      << "stroke-width=\"1.5\" clip-path=\"url(#frame)\"/>\n";
  out << "<clipPath id=\"frame\"><rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << width - 2 * margin
      << "\" height=\"" << height - 2 * margin << "\"/></clipPath>\n";
  out << "<text x=\"" << width - margin << "\" y=\"" << margin - 10 << "\" font-size=\"12\" text-anchor=\"end\" "
      << "fill=\"red\">slope " << reference_slope << "</text>\n";
  out << "</svg>\n";
  return out.str();
}

std::string partition_raster(const io::PartitionSnapshot& s, int cell_pixels) {
  if (s.labels.empty()) throw std::invalid_argument("empty partition");
  const std::int32_t max_label = *std::max_element(s.labels.begin(), s.labels.end());
  const int labels = std::max<int>(max_label + 1, static_cast<int>(s.sigma.size()));
  std::vector<int> position(static_cast<std::size_t>(labels));
  for (int b = 0; b < labels; ++b) position[b] = b;
  for (std::size_t k = 0; k < s.sigma.size(); ++k) position[s.sigma[k]] = static_cast<int>(k);

  std::ostringstream out;
  const int w = s.lx * cell_pixels, h = s.ly * cell_pixels;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" shape-rendering=\""
      << "crispEdges\">\n";
  for (int y = 0; y < s.ly; ++y) {
    // Merge horizontal runs of one label into a single rect.
    int x = 0;
    while (x < s.lx) {
      const std::int32_t label = s.labels[static_cast<std::size_t>(y) * s.lx + x];
      int run = 1;
      while (x + run < s.lx && s.labels[static_cast<std::size_t>(y) * s.lx + x + run] == label) ++run;
      out << "<rect x=\"" << x * cell_pixels << "\" y=\"" << (s.ly - 1 - y) * cell_pixels << "\" width=\""
          << run * cell_pixels << "\" height=\"" << cell_pixels << "\" fill=\""
          << hue_color(static_cast<double>(position[label]) / labels) << "\"/>\n";
      x += run;
    }
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace avf::svg
