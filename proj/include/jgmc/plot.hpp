#pragma once

#include "jgmc/io.hpp"

#include <map>

namespace jgmc {

/// Metric-vs-sigma line chart, one series per method (mean over rows sharing sigma).
inline std::string svg_chart(const std::vector<CsvRow>& rows, const std::string& metric = "mc_acc") {
  if (rows.empty()) throw InputError("plot: no rows");
  const auto pick = [&](const CsvRow& r) {
    if (metric == "m_acc") return r.m_acc;
    if (metric == "f1") return r.f1;
    if (metric == "f2") return r.f2;
    if (metric == "c_acc") return r.c_acc;
    if (metric == "mc_acc") return r.mc_acc;
    if (metric == "secs") return r.secs;
    throw InputError("plot: unknown metric '" + metric + "'");
  };
  std::map<std::string, std::map<double, std::pair<double, int>>> series;
  double xmin = rows.front().sigma, xmax = xmin, ymax = 0.0;
  for (const auto& r : rows) {
    auto& cell = series[r.method][r.sigma];
    cell.first += pick(r);
    ++cell.second;
    xmin = std::min(xmin, r.sigma);
    xmax = std::max(xmax, r.sigma);
  }
  for (auto& [name, pts] : series)
    for (auto& [x, cell] : pts) ymax = std::max(ymax, cell.first / cell.second);
  if (metric != "secs") ymax = std::max(ymax, 1.0);
  if (ymax <= 0.0) ymax = 1.0;
  if (xmax == xmin) xmax = xmin + 1.0;

  const double w = 640, h = 400, left = 60, right = 160, top = 20, bottom = 50;
  const auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (w - left - right); };
  const auto py = [&](double y) { return h - bottom - y / ymax * (h - top - bottom); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

  std::ostringstream s;
  s << std::setprecision(6);
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<line x1=\"" << left << "\" y1=\"" << h - bottom << "\" x2=\"" << w - right << "\" y2=\"" << h - bottom
    << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << h - bottom
    << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double y = ymax * t / 4.0, x = xmin + (xmax - xmin) * t / 4.0;
    s << "<text x=\"" << left - 8 << "\" y=\"" << py(y) + 4 << "\" font-size=\"11\" text-anchor=\"end\">" << y
      << "</text>\n";
    s << "<text x=\"" << px(x) << "\" y=\"" << h - bottom + 16 << "\" font-size=\"11\" text-anchor=\"middle\">" << x
      << "</text>\n";
  }
  s << "<text x=\"" << (left + w - right) / 2 << "\" y=\"" << h - 10
    << "\" font-size=\"12\" text-anchor=\"middle\">sigma</text>\n";
  s << "<text x=\"14\" y=\"" << (top + h - bottom) / 2 << "\" font-size=\"12\" transform=\"rotate(-90 14 "
    << (top + h - bottom) / 2 << ")\" text-anchor=\"middle\">" << metric << "</text>\n";
  int idx = 0;
  for (const auto& [name, pts] : series) {
    const char* color = colors[idx % 6];
    s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& [x, cell] : pts) s << px(x) << ',' << py(cell.first / cell.second) << ' ';
    s << "\"/>\n";
    for (const auto& [x, cell] : pts)
      s << "<circle cx=\"" << px(x) << "\" cy=\"" << py(cell.first / cell.second) << "\" r=\"3\" fill=\"" << color
        << "\"/>\n";
    const double ly = top + 10 + 18 * idx;
    s << "<line x1=\"" << w - right + 10 << "\" y1=\"" << ly << "\" x2=\"" << w - right + 30 << "\" y2=\"" << ly
      << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    s << "<text x=\"" << w - right + 36 << "\" y=\"" << ly + 4 << "\" font-size=\"11\">" << name << "</text>\n";
    ++idx;
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace jgmc
