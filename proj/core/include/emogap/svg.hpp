#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace emogap::svg {

std::string escape_xml(std::string_view text);

// Square heatmap with row/column labels and the count printed in each cell.
std::string heatmap(std::string_view title, std::span<const std::string> labels,
                    const std::vector<std::vector<long long>>& counts);

// Polyline through (x, y) points in [0,1]^2 with a dashed chance diagonal.
std::string line_plot(std::string_view title, std::span<const std::pair<double, double>> points,
                      std::string_view x_label, std::string_view y_label, std::string_view caption);

// Horizontal bars, first item on top. An empty `items` renders only `notice`.
std::string horizontal_bars(std::string_view title, std::span<const std::pair<std::string, double>> items,
                            std::string_view notice);

}  // namespace emogap::svg
