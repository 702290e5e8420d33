#pragma once

#include <optional>
#include <string>
#include <vector>

namespace cqnls {

struct PlotSpec {
    std::string csv_path;
    std::string x_column;
    std::vector<std::string> y_columns;
    std::string out_path;
    bool loglog = false;
    std::optional<double> ref_slope;  // overlay a power-law reference line (log-log)
    std::string title;
};

/// Renders the named CSV columns as a standalone SVG 1.1 line plot. Throws
/// std::invalid_argument on a missing/empty CSV or unknown column (the
/// message lists the available columns).
void plot_csv(const PlotSpec& spec);

}  // namespace cqnls
