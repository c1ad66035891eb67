#include "emogap/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace emogap::svg {
namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string header(int width, int height) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) + "\" height=\"" +
         std::to_string(height) + "\" viewBox=\"0 0 " + std::to_string(width) + " " + std::to_string(height) +
         "\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

std::string text(double x, double y, std::string_view content, std::string_view extra = "") {
  return "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" " + std::string(extra) + ">" + escape_xml(content) +
         "</text>\n";
}

}  // namespace

std::string escape_xml(std::string_view in) {
  std::string out;
  for (char c : in) {
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

std::string heatmap(std::string_view title, std::span<const std::string> labels,
                    const std::vector<std::vector<long long>>& counts) {
  const int cell = 56;
  const int left = 110;
  const int top = 110;
  const int n = static_cast<int>(labels.size());
  std::string out = header(left + n * cell + 20, top + n * cell + 20);
  out += text(10, 24, title, "font-size=\"16\" font-weight=\"bold\"");
  long long max_count = 0;
  for (const auto& row : counts) {
    for (long long v : row) max_count = std::max(max_count, v);
  }
  for (int i = 0; i < n; ++i) {
    out += text(left - 6, top + i * cell + cell / 2.0 + 4, labels[i], "font-size=\"12\" text-anchor=\"end\"");
    const double x = left + i * cell + cell / 2.0;
    out += "<text font-size=\"12\" text-anchor=\"start\" transform=\"translate(" + num(x) + "," + num(top - 6) +
           ") rotate(-45)\">" + escape_xml(labels[i]) + "</text>\n";
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const long long v = counts[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      const double t = max_count > 0 ? static_cast<double>(v) / static_cast<double>(max_count) : 0.0;
      const int shade = static_cast<int>(std::lround(255 - 200 * t));
      out += "<rect x=\"" + std::to_string(left + j * cell) + "\" y=\"" + std::to_string(top + i * cell) +
             "\" width=\"" + std::to_string(cell) + "\" height=\"" + std::to_string(cell) + "\" fill=\"rgb(" +
             std::to_string(shade) + "," + std::to_string(shade) + ",255)\" stroke=\"#999\"/>\n";
      out += text(left + j * cell + cell / 2.0, top + i * cell + cell / 2.0 + 4, std::to_string(v),
                  std::string("font-size=\"11\" text-anchor=\"middle\" fill=\"") + (t > 0.6 ? "white" : "black") +
                      "\"");
    }
  }
  return out + "</svg>\n";
}

std::string line_plot(std::string_view title, std::span<const std::pair<double, double>> points,
                      std::string_view x_label, std::string_view y_label, std::string_view caption) {
  const double left = 60, top = 40, size = 360;
  std::string out = header(static_cast<int>(left + size + 30), static_cast<int>(top + size + 60));
  out += text(10, 24, title, "font-size=\"16\" font-weight=\"bold\"");
  out += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(size) + "\" height=\"" + num(size) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
  out += "<line x1=\"" + num(left) + "\" y1=\"" + num(top + size) + "\" x2=\"" + num(left + size) + "\" y2=\"" +
         num(top) + "\" stroke=\"#aaa\" stroke-dasharray=\"4 4\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double f = t / 4.0;
    out += text(left + f * size, top + size + 16, num(f), "font-size=\"10\" text-anchor=\"middle\"");
    out += text(left - 6, top + size - f * size + 4, num(f), "font-size=\"10\" text-anchor=\"end\"");
  }
  std::string path;
  for (const auto& [x, y] : points) {
    path += num(left + x * size) + "," + num(top + size - y * size) + " ";
  }
  out += "<polyline fill=\"none\" stroke=\"#c0392b\" stroke-width=\"2\" points=\"" + path + "\"/>\n";
  out += text(left + size / 2, top + size + 34, x_label, "font-size=\"12\" text-anchor=\"middle\"");
  out += "<text font-size=\"12\" text-anchor=\"middle\" transform=\"translate(18," + num(top + size / 2) +
         ") rotate(-90)\">" + escape_xml(y_label) + "</text>\n";
  out += text(left + size - 8, top + size - 12, caption, "font-size=\"13\" text-anchor=\"end\"");
  return out + "</svg>\n";
}

std::string horizontal_bars(std::string_view title, std::span<const std::pair<std::string, double>> items,
                            std::string_view notice) {
  const double left = 140, top = 50, bar = 26, width = 360;
  const double height = top + std::max<std::size_t>(items.size(), 1) * bar + 60;
  std::string out = header(static_cast<int>(left + width + 80), static_cast<int>(height));
  out += text(10, 24, title, "font-size=\"16\" font-weight=\"bold\"");
  double max_value = 0.0;
  for (const auto& [label, v] : items) max_value = std::max(max_value, std::fabs(v));
  if (max_value == 0.0) max_value = 1.0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& [label, v] = items[i];
    const double y = top + static_cast<double>(i) * bar;
    const double w = std::fabs(v) / max_value * width;
    out += text(left - 8, y + bar / 2 + 4, label, "font-size=\"12\" text-anchor=\"end\"");
    out += "<rect x=\"" + num(left) + "\" y=\"" + num(y + 3) + "\" width=\"" + num(w) + "\" height=\"" +
           num(bar - 6) + "\" fill=\"" + (v >= 0 ? "#2e86c1" : "#aaaaaa") + "\"/>\n";
    char value[32];
    std::snprintf(value, sizeof value, "%.3f", v);
    out += text(left + w + 6, y + bar / 2 + 4, value, "font-size=\"11\"");
  }
  if (!notice.empty()) {
    out += text(left, top + static_cast<double>(items.size()) * bar + 30, notice,
                "font-size=\"12\" fill=\"#b03a2e\"");
  }
  return out + "</svg>\n";
}

}  // namespace emogap::svg
