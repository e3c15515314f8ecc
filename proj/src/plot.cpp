#include "creditrisk/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace creditrisk {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#9467bd", "#8c564b"};
constexpr const char* kBadColor = "#d62728";
constexpr const char* kGoodColor = "#2ca02c";

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string Fixed(double v, int digits) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string Escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string Header(int width, int height) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
         "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " +
         std::to_string(width) + " " + std::to_string(height) +
         "\" font-family=\"sans-serif\" font-size=\"12\">\n"
         "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(width) + "\" height=\"" +
         std::to_string(height) + "\" fill=\"white\"/>\n";
}

std::string Text(double x, double y, const std::string& content, const std::string& extra = "") {
  return "<text x=\"" + Num(x) + "\" y=\"" + Num(y) + "\"" + (extra.empty() ? "" : " " + extra) +
         ">" + Escape(content) + "</text>\n";
}

}  // namespace

std::string LorenzSvg(const std::vector<LorenzSeries>& series, std::size_t max_points) {
  const int width = 560, height = 520;
  const double left = 70, top = 40, size = 400;
  auto px = [&](double share) { return left + share * size; };
  auto py = [&](double share) { return top + (1.0 - share) * size; };

  std::string svg = Header(width, height);
  svg += Text(left, 24, "Lorenz curve", "font-size=\"16\"");
  svg += "<rect class=\"frame\" x=\"" + Num(left) + "\" y=\"" + Num(top) + "\" width=\"" +
         Num(size) + "\" height=\"" + Num(size) + "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double s = t / 4.0;
    svg += Text(px(s) - 10, top + size + 18, Fixed(s, 2));
    svg += Text(left - 40, py(s) + 4, Fixed(s, 2));
  }
  svg += Text(left + size / 2 - 110, top + size + 40, "share of population (riskiest first)");
  svg += Text(16, top + size / 2, "share of bads captured",
              "transform=\"rotate(-90 16 " + Num(top + size / 2) + ")\" text-anchor=\"middle\"");
  svg += "<line class=\"diagonal\" x1=\"" + Num(px(0)) + "\" y1=\"" + Num(py(0)) + "\" x2=\"" +
         Num(px(1)) + "\" y2=\"" + Num(py(1)) + "\" stroke=\"#999\" stroke-dasharray=\"4 4\"/>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& points = series[s].report.lorenz_points;
    const char* color = kPalette[s % std::size(kPalette)];
    const std::size_t stride =
        std::max<std::size_t>(1, (points.size() + max_points - 1) / std::max<std::size_t>(max_points, 2));
    std::string coords;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (i % stride != 0 && i + 1 != points.size()) continue;
      if (!coords.empty()) coords += ' ';
      coords += Num(px(points[i].population_share)) + "," + Num(py(points[i].bad_share));
    }
    svg += "<polyline class=\"lorenz\" data-label=\"" + Escape(series[s].label) +
           "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"2\" points=\"" + coords +
           "\"/>\n";
    const double ly = top + size - 20 - 18.0 * static_cast<double>(series.size() - 1 - s);
    svg += "<line x1=\"" + Num(left + size - 170) + "\" y1=\"" + Num(ly - 4) + "\" x2=\"" +
           Num(left + size - 150) + "\" y2=\"" + Num(ly - 4) + "\" stroke=\"" + color +
           "\" stroke-width=\"2\"/>\n";
    svg += Text(left + size - 145, ly,
                series[s].label + ": Gini = " + Fixed(series[s].report.gini, 4), "class=\"legend\"");
  }
  svg += "</svg>\n";
  return svg;
}

std::string ExplanationSvg(const Explanation& e) {
  const auto shown = e.Shown();
  const int bar_height = 26;
  const int width = 760;
  const double header = 110;
  const double axis_x = 470;
  const double half = 250;
  const int height = static_cast<int>(header) + bar_height * static_cast<int>(shown.size()) + 50;

  double scale_max = 0.0;
  for (const auto& c : shown) scale_max = std::max(scale_max, std::abs(c.contribution));
  if (scale_max == 0.0) scale_max = 1.0;

  std::string svg = Header(width, height);
  const std::string title = e.unit_id.empty() ? "Explanation" : "Unit " + e.unit_id;
  svg += Text(20, 22, title, "font-size=\"16\"");
  svg += Text(20, 42, "Model prediction: " + Fixed(e.blackbox_prediction, 3));
  svg += Text(20, 58, "Surrogate prediction: " + Fixed(e.surrogate_prediction, 3));
  svg += Text(20, 74, "Surrogate R2: " + Fixed(e.surrogate_r_squared, 3));
  svg += Text(20, 90, "Intercept: " + Fixed(e.intercept, 3));
  svg += Text(axis_x - half, header - 6, "<- good payer", "fill=\"" + std::string(kGoodColor) + "\"");
  svg += Text(axis_x + half - 80, header - 6, "bad payer ->", "fill=\"" + std::string(kBadColor) + "\"");

  for (std::size_t i = 0; i < shown.size(); ++i) {
    const auto& c = shown[i];
    const double y = header + static_cast<double>(i) * bar_height + 4;
    const double length = std::abs(c.contribution) / scale_max * half;
    const bool toward_bad = c.contribution > 0.0;
    const double x = toward_bad ? axis_x : axis_x - length;
    svg += "<rect class=\"bar " + std::string(toward_bad ? "bad" : "good") + "\" data-feature=\"" +
           Escape(c.feature_name) + "\" data-value=\"" + Fixed(c.contribution, 6) + "\" x=\"" +
           Num(x) + "\" y=\"" + Num(y) + "\" width=\"" + Num(length) + "\" height=\"" +
           std::to_string(bar_height - 8) + "\" fill=\"" + (toward_bad ? kBadColor : kGoodColor) +
           "\"/>\n";
    svg += Text(10, y + 13, c.description, "class=\"label\"");
  }
  const double bottom = header + bar_height * static_cast<double>(shown.size());
  svg += "<line class=\"axis\" x1=\"" + Num(axis_x) + "\" y1=\"" + Num(header) + "\" x2=\"" +
         Num(axis_x) + "\" y2=\"" + Num(bottom) + "\" stroke=\"#000\"/>\n";
  svg += Text(axis_x - half, bottom + 20, Fixed(-scale_max, 4));
  svg += Text(axis_x + half - 40, bottom + 20, Fixed(scale_max, 4));
  svg += "</svg>\n";
  return svg;
}

}  // namespace creditrisk
