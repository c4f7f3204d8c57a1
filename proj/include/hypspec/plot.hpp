// Minimal static SVG output: eigenvalues against index with horizontal
// reference lines (the 1/4 floor and computed bounds).
#pragma once

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

namespace hypspec {

struct PlotLine {
  double value = 0;
  std::string label;
  std::string color = "#c0392b";
};

inline void write_spectrum_svg(const std::vector<double>& eigenvalues,
                               const std::vector<PlotLine>& lines, std::ostream& os) {
  const int W = 640, H = 420, ml = 70, mr = 20, mt = 20, mb = 45;
  double ymax = 0.3;
  for (double l : eigenvalues) ymax = std::max(ymax, l);
  for (const auto& ln : lines) ymax = std::max(ymax, ln.value);
  ymax *= 1.08;
  double n = std::max<size_t>(1, eigenvalues.size() - 1);
  auto X = [&](double i) { return ml + (W - ml - mr) * (i / n); };
  auto Y = [&](double v) { return H - mb - (H - mt - mb) * (v / ymax); };

  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
  os << "<rect width='100%' height='100%' fill='white'/>\n";
  os << "<line x1='" << ml << "' y1='" << H - mb << "' x2='" << W - mr << "' y2='" << H - mb
     << "' stroke='black'/>\n";
  os << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << H - mb
     << "' stroke='black'/>\n";
  for (int k = 0; k <= 5; ++k) {
    double v = ymax * k / 5;
    os << "<text x='" << ml - 8 << "' y='" << Y(v) + 4
       << "' font-size='11' text-anchor='end' font-family='sans-serif'>" << std::setprecision(3)
       << v << "</text>\n";
    os << "<line x1='" << ml - 4 << "' y1='" << Y(v) << "' x2='" << ml << "' y2='" << Y(v)
       << "' stroke='black'/>\n";
  }
  os << "<text x='" << (ml + W - mr) / 2 << "' y='" << H - 12
     << "' font-size='12' text-anchor='middle' font-family='sans-serif'>eigenvalue index</text>\n";
  for (const auto& ln : lines) {
    os << "<line x1='" << ml << "' y1='" << Y(ln.value) << "' x2='" << W - mr << "' y2='"
       << Y(ln.value) << "' stroke='" << ln.color << "' stroke-dasharray='6 3'/>\n";
    os << "<text x='" << W - mr - 4 << "' y='" << Y(ln.value) - 4
       << "' font-size='11' text-anchor='end' fill='" << ln.color
       << "' font-family='sans-serif'>" << ln.label << "</text>\n";
  }
  for (size_t i = 0; i < eigenvalues.size(); ++i) {
    os << "<circle cx='" << X(static_cast<double>(i)) << "' cy='" << Y(eigenvalues[i])
       << "' r='3.5' fill='#2c3e50'/>\n";
  }
  os << "</svg>\n";
}

inline void save_spectrum_svg(const std::vector<double>& eigenvalues,
                              const std::vector<PlotLine>& lines, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_spectrum_svg(eigenvalues, lines, os);
}

}  // namespace hypspec
