#pragma once
// CSV and SVG artifact helpers shared by the scenario runner and the CLI.
// Everything here is deterministic: the same inputs produce byte-identical
// files, which the regression suite relies on.

#include <string>
#include <vector>

namespace smib {

// Format a double with %.12g — the precision used for every numeric artifact.
std::string format_g12(double v);

// Write text to `path` atomically (temp file in the same directory + rename),
// so a crashed run never leaves a truncated artifact behind.
void atomic_write_text(const std::string& path, const std::string& text);

// A CSV artifact: leading '#' metadata lines, one header row, numeric body.
struct CsvTable {
    std::vector<std::string> comments;  // metadata lines, without the '#'
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    // Column index for a header name, or -1 when absent.
    int column(const std::string& name) const;
};

void write_csv(const std::string& path, const CsvTable& table);

// Parse a CSV written by write_csv (or hand-edited in the same shape).
// Throws invalid_parameter on ragged rows or non-numeric body cells.
CsvTable read_csv(const std::string& path);

// One curve on a line plot.
struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

// Render a fixed 800x500-viewbox SVG line plot. Each series is uniformly
// decimated to at most `max_points` samples (endpoints kept); axes carry
// ticks and the given labels. Output is deterministic.
std::string render_svg_plot(const std::string& title, const std::string& x_label,
                            const std::string& y_label,
                            const std::vector<PlotSeries>& series,
                            int max_points = 1200);

}  // namespace smib
