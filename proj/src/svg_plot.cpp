#include "cqnls/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cqnls {

namespace {

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

Table read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("plot: cannot open CSV " + path);
    Table t;
    std::string line;
    if (!std::getline(in, line) || line.empty())
        throw std::invalid_argument("plot: empty CSV " + path);
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) t.columns.push_back(cell);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ls(line);
        while (std::getline(ls, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
        if (row.size() == t.columns.size()) t.rows.push_back(std::move(row));
    }
    if (t.rows.empty()) throw std::invalid_argument("plot: CSV has no data rows: " + path);
    return t;
}

size_t column_index(const Table& t, const std::string& name) {
    for (size_t i = 0; i < t.columns.size(); ++i)
        if (t.columns[i] == name) return i;
    std::string avail;
    for (const auto& c : t.columns) avail += (avail.empty() ? "" : ", ") + c;
    throw std::invalid_argument("plot: unknown column '" + name + "'; available: " + avail);
}

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fmt(double v) {
    char b[64];
    std::snprintf(b, sizeof(b), "%.6g", v);
    return b;
}

}  // namespace

void plot_csv(const PlotSpec& spec) {
    const Table t = read_csv(spec.csv_path);
    const size_t xi = column_index(t, spec.x_column);
    std::vector<size_t> yis;
    for (const auto& yc : spec.y_columns) yis.push_back(column_index(t, yc));
    if (yis.empty()) throw std::invalid_argument("plot: no y columns given");

    auto tx = [&](double v) { return spec.loglog ? std::log10(std::max(v, 1e-300)) : v; };

    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& row : t.rows) {
        const double x = tx(row[xi]);
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        for (size_t yi : yis) {
            const double y = tx(row[yi]);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    }
    if (xmax <= xmin) xmax = xmin + 1.0;
    if (ymax <= ymin) ymax = ymin + 1.0;
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    const double W = 840, H = 560, ml = 80, mr = 30, mt = 40, mb = 60;
    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr); };
    auto py = [&](double y) { return H - mb - (y - ymin) / (ymax - ymin) * (H - mt - mb); };

    std::ofstream out(spec.out_path);
    if (!out) throw std::runtime_error("plot: cannot open output " + spec.out_path);
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << W
        << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!spec.title.empty())
        out << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\" "
               "font-family=\"sans-serif\">" << spec.title << "</text>\n";

    // axes + ticks
    out << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr << "\" y2=\""
        << H - mb << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << H - mb
        << "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 5; ++k) {
        const double x = xmin + k * (xmax - xmin) / 5.0;
        const double y = ymin + k * (ymax - ymin) / 5.0;
        out << "<line x1=\"" << px(x) << "\" y1=\"" << H - mb << "\" x2=\"" << px(x) << "\" y2=\""
            << H - mb + 5 << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << px(x) << "\" y=\"" << H - mb + 20
            << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">"
            << fmt(spec.loglog ? std::pow(10.0, x) : x) << "</text>\n"
            << "<line x1=\"" << ml - 5 << "\" y1=\"" << py(y) << "\" x2=\"" << ml << "\" y2=\""
            << py(y) << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << ml - 8 << "\" y=\"" << py(y) + 4
            << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">"
            << fmt(spec.loglog ? std::pow(10.0, y) : y) << "</text>\n";
    }
    out << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 18
        << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">"
        << spec.x_column << (spec.loglog ? " (log)" : "") << "</text>\n";

    for (size_t s = 0; s < yis.size(); ++s) {
        out << "<polyline fill=\"none\" stroke=\"" << kColors[s % 6]
            << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& row : t.rows)
            out << px(tx(row[xi])) << "," << py(tx(row[yis[s]])) << " ";
        out << "\"/>\n";
        out << "<text x=\"" << W - mr - 10 << "\" y=\"" << mt + 16 * (s + 1)
            << "\" text-anchor=\"end\" font-size=\"12\" font-family=\"sans-serif\" fill=\""
            << kColors[s % 6] << "\">" << spec.y_columns[s] << "</text>\n";
    }

    if (spec.ref_slope && spec.loglog) {
        // power-law reference anchored at the first point of the first series
        const double x0 = tx(t.rows.front()[xi]);
        const double y0 = tx(t.rows.front()[yis[0]]);
        out << "<line x1=\"" << px(x0) << "\" y1=\"" << py(y0) << "\" x2=\"" << px(xmax)
            << "\" y2=\"" << py(y0 + *spec.ref_slope * (xmax - x0))
            << "\" stroke=\"#555555\" stroke-dasharray=\"6,4\"/>\n"
            << "<text x=\"" << W - mr - 10 << "\" y=\"" << mt + 16 * (yis.size() + 1)
            << "\" text-anchor=\"end\" font-size=\"12\" font-family=\"sans-serif\" "
               "fill=\"#555555\">slope " << fmt(*spec.ref_slope) << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace cqnls
