// SPDX-License-Identifier: Apache-2.0
//
// Minimal SVG emitters for sweep and cost plots.
#pragma once

#include <string>
#include <vector>

namespace smoothread::svg {

struct Series {
    std::string name;
    std::vector<double> ys;
};

// Polylines over shared x values; axes are linear and start at the data minimum.
std::string line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<double>& xs, const std::vector<Series>& series);

// values[row][col]; each cell is shaded by its value within [min, max] and labelled.
std::string heatmap(const std::string& title, const std::vector<std::string>& row_labels,
                    const std::vector<std::string>& col_labels, const std::vector<std::vector<double>>& values);

}  // namespace smoothread::svg
