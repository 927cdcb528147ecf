#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

namespace wdrift::svg {

struct Series {
  std::string name;
  std::vector<double> values;  // one per x label; non-finite values are skipped
};

inline std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

/// Round step for about `target` ticks over [0, hi].
inline double nice_step(double hi, int target = 5) {
  const double raw = hi / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double f : {1.0, 2.0, 2.5, 5.0, 10.0})
    if (f * mag >= raw) return f * mag;
  return 10.0 * mag;
}

inline constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

}  // namespace detail

/// Line chart on a 960x540 viewBox, one polyline per series. The y axis
/// starts at 0. Output depends only on the arguments.
inline std::string line_chart(std::string_view title, const std::vector<std::string>& x_labels,
                              const std::vector<Series>& series, std::string_view y_label) {
  constexpr double W = 960, H = 540, left = 80, right = 30, top = 50, bottom = 90;
  const double pw = W - left - right, ph = H - top - bottom;

  double ymax = 0.0;
  for (const auto& s : series)
    for (double v : s.values)
      if (std::isfinite(v)) ymax = std::max(ymax, v);
  if (ymax <= 0.0) ymax = 1.0;
  const double step = detail::nice_step(ymax);
  const double yhi = std::ceil(ymax / step - 1e-9) * step;

  const std::size_t n = x_labels.size();
  auto x_at = [&](std::size_t i) { return left + (n <= 1 ? pw / 2 : pw * static_cast<double>(i) / static_cast<double>(n - 1)); };
  auto y_at = [&](double v) { return top + ph - ph * v / yhi; };

  std::string o;
  o += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  o += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 960 540\" width=\"960\" height=\"540\">\n";
  o += "<rect x=\"0\" y=\"0\" width=\"960\" height=\"540\" fill=\"white\"/>\n";
  o += "<text x=\"480\" y=\"30\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"18\">" + escape(title) + "</text>\n";

  o += "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#333\">\n";
  for (double v = 0.0; v <= yhi + step * 1e-6; v += step) {
    const auto y = detail::num(y_at(v));
    o += "<line x1=\"" + detail::num(left) + "\" y1=\"" + y + "\" x2=\"" + detail::num(left + pw) + "\" y2=\"" + y +
         "\" stroke=\"#e0e0e0\"/>\n";
    o += "<text x=\"" + detail::num(left - 8) + "\" y=\"" + y + "\" text-anchor=\"end\" dominant-baseline=\"middle\">" +
         detail::num(v) + "</text>\n";
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = detail::num(x_at(i));
    const auto y = detail::num(top + ph + 14);
    o += "<text x=\"" + x + "\" y=\"" + y + "\" text-anchor=\"end\" transform=\"rotate(-45 " + x + " " + y + ")\">" +
         escape(x_labels[i]) + "</text>\n";
  }
  o += "</g>\n";
  o += "<line x1=\"" + detail::num(left) + "\" y1=\"" + detail::num(top + ph) + "\" x2=\"" + detail::num(left + pw) +
       "\" y2=\"" + detail::num(top + ph) + "\" stroke=\"black\"/>\n";
  o += "<line x1=\"" + detail::num(left) + "\" y1=\"" + detail::num(top) + "\" x2=\"" + detail::num(left) + "\" y2=\"" +
       detail::num(top + ph) + "\" stroke=\"black\"/>\n";
  o += "<text x=\"20\" y=\"" + detail::num(top + ph / 2) + "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       "font-size=\"14\" transform=\"rotate(-90 20 " + detail::num(top + ph / 2) + ")\">" + escape(y_label) + "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = detail::kPalette[s % std::size(detail::kPalette)];
    std::string pts;
    for (std::size_t i = 0; i < series[s].values.size() && i < n; ++i) {
      const double v = series[s].values[i];
      if (!std::isfinite(v)) continue;
      if (!pts.empty()) pts.push_back(' ');
      pts += detail::num(x_at(i)) + "," + detail::num(y_at(v));
    }
    o += "<polyline data-series=\"" + escape(series[s].name) + "\" fill=\"none\" stroke=\"" + color +
         "\" stroke-width=\"2\" points=\"" + pts + "\"/>\n";
    const auto ly = detail::num(top + 16.0 * static_cast<double>(s));
    o += "<text x=\"" + detail::num(left + pw - 4) + "\" y=\"" + ly + "\" text-anchor=\"end\" font-family=\"sans-serif\" "
         "font-size=\"12\" fill=\"" + color + "\">" + escape(series[s].name) + "</text>\n";
  }
  o += "</svg>\n";
  return o;
}

}  // namespace wdrift::svg
