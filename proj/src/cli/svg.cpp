#include <cstdio>
#include <ostream>
#include <string>

#include "peca/cli.hpp"

namespace peca::cli {

namespace {

constexpr double width = 640.0;
constexpr double height = 480.0;
constexpr double left = 70.0;
constexpr double right = 20.0;
constexpr double top = 40.0;
constexpr double bottom = 60.0;

// Fixed two-decimal coordinates keep the output byte-stable.
std::string coord(double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.2f", v);
    return buffer;
}

double px(double level) { return left + level * (width - left - right); }
double py(double rate) { return height - bottom - rate * (height - top - bottom); }

std::string point(double level, double rate) { return coord(px(level)) + "," + coord(py(rate)); }

std::string escape(std::string_view text) {
    std::string out;
    for (char c : text) {
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

}  // namespace

void write_qtr_svg(std::ostream& out, const QtrTable& table, std::string_view title) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << coord(width) << "\" height=\"" << coord(height)
        << "\" viewBox=\"0 0 " << coord(width) << ' ' << coord(height) << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << coord(width / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"15\">"
        << escape(title) << "</text>\n";

    // Grid, ticks and axes.
    for (int i = 0; i <= 4; ++i) {
        const double v = i / 4.0;
        out << "<line x1=\"" << coord(px(v)) << "\" y1=\"" << coord(py(0)) << "\" x2=\"" << coord(px(v)) << "\" y2=\""
            << coord(py(1)) << "\" stroke=\"#e0e0e0\"/>\n";
        out << "<line x1=\"" << coord(px(0)) << "\" y1=\"" << coord(py(v)) << "\" x2=\"" << coord(px(1)) << "\" y2=\""
            << coord(py(v)) << "\" stroke=\"#e0e0e0\"/>\n";
        out << "<text x=\"" << coord(px(v)) << "\" y=\"" << coord(py(0) + 18) << "\" text-anchor=\"middle\" "
            << "font-family=\"sans-serif\" font-size=\"11\">" << coord(v) << "</text>\n";
        out << "<text x=\"" << coord(px(0) - 8) << "\" y=\"" << coord(py(v) + 4) << "\" text-anchor=\"end\" "
            << "font-family=\"sans-serif\" font-size=\"11\">" << coord(v) << "</text>\n";
    }
    out << "<rect x=\"" << coord(px(0)) << "\" y=\"" << coord(py(1)) << "\" width=\"" << coord(px(1) - px(0))
        << "\" height=\"" << coord(py(0) - py(1)) << "\" fill=\"none\" stroke=\"black\"/>\n";
    out << "<text x=\"" << coord((px(0) + px(1)) / 2) << "\" y=\"" << coord(height - 18)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">quantile level</text>\n";
    out << "<text x=\"18\" y=\"" << coord((py(0) + py(1)) / 2) << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"13\" transform=\"rotate(-90 18 " << coord((py(0) + py(1)) / 2) << ")\">trigger rate</text>\n";

    if (!table.rows.empty() && table.n_events > 0) {
        std::string band;
        for (const auto& row : table.rows) band += point(row.level, row.band_upper_rate) + ' ';
        for (auto it = table.rows.rbegin(); it != table.rows.rend(); ++it) {
            band += point(it->level, it->band_lower_rate) + ' ';
        }
        band.pop_back();
        out << "<polygon points=\"" << band << "\" fill=\"#9ecae1\" fill-opacity=\"0.4\" stroke=\"none\"/>\n";

        std::string expected, observed;
        for (const auto& row : table.rows) {
            expected += point(row.level, row.expected_rate) + ' ';
            observed += point(row.level, row.rate.value_or(0.0)) + ' ';
        }
        expected.pop_back();
        observed.pop_back();
        out << "<polyline points=\"" << expected
            << "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"2\" stroke-dasharray=\"6 4\"/>\n";
        out << "<polyline points=\"" << observed << "\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"2.5\"/>\n";
    }

    // Legend.
    const double lx = px(0) + 12, ly = py(1) + 16;
    out << "<line x1=\"" << coord(lx) << "\" y1=\"" << coord(ly) << "\" x2=\"" << coord(lx + 24) << "\" y2=\""
        << coord(ly) << "\" stroke=\"#d62728\" stroke-width=\"2.5\"/>\n";
    out << "<text x=\"" << coord(lx + 30) << "\" y=\"" << coord(ly + 4)
        << "\" font-family=\"sans-serif\" font-size=\"12\">observed</text>\n";
    out << "<line x1=\"" << coord(lx) << "\" y1=\"" << coord(ly + 18) << "\" x2=\"" << coord(lx + 24) << "\" y2=\""
        << coord(ly + 18) << "\" stroke=\"#333333\" stroke-width=\"2\" stroke-dasharray=\"6 4\"/>\n";
    out << "<text x=\"" << coord(lx + 30) << "\" y=\"" << coord(ly + 22)
        << "\" font-family=\"sans-serif\" font-size=\"12\">expected</text>\n";
    out << "<rect x=\"" << coord(lx) << "\" y=\"" << coord(ly + 30) << "\" width=\"24\" height=\"10\" fill=\"#9ecae1\" "
        << "fill-opacity=\"0.4\"/>\n";
    out << "<text x=\"" << coord(lx + 30) << "\" y=\"" << coord(ly + 40)
        << "\" font-family=\"sans-serif\" font-size=\"12\">pointwise band</text>\n";
    out << "</svg>\n";
}

}  // namespace peca::cli
