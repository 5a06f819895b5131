// SPDX-License-Identifier: Apache-2.0
#include "smoothread/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <sstream>

namespace smoothread::svg {

namespace {

constexpr double kWidth = 640, kHeight = 420, kLeft = 80, kRight = 150, kTop = 40, kBottom = 60;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string escape(const std::string& s) {
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

void header(std::ostringstream& out, double w, double h, const std::string& title) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << w / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(title)
        << "</text>\n";
}

}  // namespace

std::string line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<double>& xs, const std::vector<Series>& series) {
    double x0 = std::numeric_limits<double>::max(), x1 = std::numeric_limits<double>::lowest();
    double y0 = x0, y1 = x1;
    for (double x : xs) {
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
    }
    for (const auto& s : series) {
        for (double y : s.ys) {
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
        }
    }
    if (xs.empty()) x0 = 0, x1 = 1;
    if (y0 > y1) y0 = 0, y1 = 1;
    if (x1 == x0) x1 = x0 + 1;
    if (y1 == y0) y1 = y0 + 1;
    const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return kTop + ph - (y - y0) / (y1 - y0) * ph; };

    std::ostringstream out;
    header(out, kWidth, kHeight, title);
    out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + ph << "\" x2=\"" << kLeft + pw << "\" y2=\"" << kTop + ph
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kTop + ph
        << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double xv = x0 + (x1 - x0) * i / 4.0, yv = y0 + (y1 - y0) * i / 4.0;
        out << "<text x=\"" << px(xv) << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">" << num(xv)
            << "</text>\n";
        out << "<text x=\"" << kLeft - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">" << num(yv)
            << "</text>\n";
    }
    out << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 15 << "\" text-anchor=\"middle\">"
        << escape(x_label) << "</text>\n";
    out << "<text x=\"18\" y=\"" << kTop + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
        << kTop + ph / 2 << ")\">" << escape(y_label) << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const char* color = kPalette[k % std::size(kPalette)];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < std::min(xs.size(), series[k].ys.size()); ++i)
            out << px(xs[i]) << ',' << py(series[k].ys[i]) << ' ';
        out << "\"/>\n";
        for (std::size_t i = 0; i < std::min(xs.size(), series[k].ys.size()); ++i)
            out << "<circle cx=\"" << px(xs[i]) << "\" cy=\"" << py(series[k].ys[i]) << "\" r=\"3\" fill=\"" << color
                << "\"/>\n";
        out << "<text x=\"" << kLeft + pw + 12 << "\" y=\"" << kTop + 16 + 18 * static_cast<double>(k)
            << "\" fill=\"" << color << "\">" << escape(series[k].name) << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

std::string heatmap(const std::string& title, const std::vector<std::string>& row_labels,
                    const std::vector<std::string>& col_labels, const std::vector<std::vector<double>>& values) {
    double lo = std::numeric_limits<double>::max(), hi = std::numeric_limits<double>::lowest();
    for (const auto& row : values) {
        for (double v : row) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (lo > hi) lo = 0, hi = 1;
    const double cell = 70, left = 80, top = 60;
    const double w = left + cell * static_cast<double>(col_labels.size()) + 20;
    const double h = top + cell * static_cast<double>(row_labels.size()) + 20;
    std::ostringstream out;
    header(out, w, h, title);
    for (std::size_t c = 0; c < col_labels.size(); ++c)
        out << "<text x=\"" << left + cell * (static_cast<double>(c) + 0.5) << "\" y=\"" << top - 8
            << "\" text-anchor=\"middle\">" << escape(col_labels[c]) << "</text>\n";
    for (std::size_t r = 0; r < row_labels.size() && r < values.size(); ++r) {
        const double y = top + cell * static_cast<double>(r);
        out << "<text x=\"" << left - 8 << "\" y=\"" << y + cell / 2 + 4 << "\" text-anchor=\"end\">"
            << escape(row_labels[r]) << "</text>\n";
        for (std::size_t c = 0; c < col_labels.size() && c < values[r].size(); ++c) {
            const double t = hi > lo ? (values[r][c] - lo) / (hi - lo) : 0.5;
            const int shade = static_cast<int>(235 - 170 * t);
            const double x = left + cell * static_cast<double>(c);
            out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\"" << cell
                << "\" fill=\"rgb(" << shade << ',' << shade << ",255)\" stroke=\"white\"/>\n";
            out << "<text x=\"" << x + cell / 2 << "\" y=\"" << y + cell / 2 + 4 << "\" text-anchor=\"middle\">"
                << num(values[r][c]) << "</text>\n";
        }
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace smoothread::svg
