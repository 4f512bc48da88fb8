#include "smib/csvplot.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "smib/errors.h"

namespace smib {

std::string format_g12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void atomic_write_text(const std::string& path, const std::string& text) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open for writing: " + tmp.string());
        os << text;
        os.flush();
        if (!os) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, target);  // atomic on POSIX within one filesystem
}

int CsvTable::column(const std::string& name) const {
    for (size_t j = 0; j < header.size(); ++j)
        if (header[j] == name) return static_cast<int>(j);
    return -1;
}

void write_csv(const std::string& path, const CsvTable& table) {
    std::ostringstream os;
    for (const auto& c : table.comments) os << "# " << c << "\n";
    for (size_t j = 0; j < table.header.size(); ++j)
        os << (j ? "," : "") << table.header[j];
    os << "\n";
    for (const auto& row : table.rows) {
        for (size_t j = 0; j < row.size(); ++j)
            os << (j ? "," : "") << format_g12(row[j]);
        os << "\n";
    }
    atomic_write_text(path, os.str());
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

CsvTable read_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw invalid_parameter("cannot open CSV: " + path);
    CsvTable table;
    std::string line;
    size_t lineno = 0;
    bool have_header = false;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            size_t start = line.find_first_not_of(" \t", 1);
            table.comments.push_back(start == std::string::npos ? "" : line.substr(start));
            continue;
        }
        if (!have_header) {
            table.header = split_csv_line(line);
            have_header = true;
            continue;
        }
        auto cells = split_csv_line(line);
        if (cells.size() != table.header.size())
            throw invalid_parameter(path + ":" + std::to_string(lineno) +
                                    ": row has " + std::to_string(cells.size()) +
                                    " cells, header has " + std::to_string(table.header.size()));
        std::vector<double> row(cells.size());
        for (size_t j = 0; j < cells.size(); ++j) {
            const char* s = cells[j].c_str();
            char* end = nullptr;
            row[j] = std::strtod(s, &end);
            if (end == s || *end != '\0')
                throw invalid_parameter(path + ":" + std::to_string(lineno) +
                                        ": non-numeric cell '" + cells[j] + "'");
        }
        table.rows.push_back(std::move(row));
    }
    if (!have_header) throw invalid_parameter("CSV has no header row: " + path);
    return table;
}

namespace {

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char ch : s) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += ch;
        }
    }
    return out;
}

std::string px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// Uniform index decimation keeping both endpoints.
std::vector<size_t> decimate_indices(size_t n, int max_points) {
    std::vector<size_t> idx;
    if (n == 0) return idx;
    const size_t cap = static_cast<size_t>(std::max(max_points, 2));
    if (n <= cap) {
        idx.resize(n);
        for (size_t i = 0; i < n; ++i) idx[i] = i;
        return idx;
    }
    idx.reserve(cap);
    for (size_t i = 0; i < cap; ++i) {
        size_t k = static_cast<size_t>(std::llround(
            static_cast<double>(i) * static_cast<double>(n - 1) / static_cast<double>(cap - 1)));
        if (idx.empty() || k != idx.back()) idx.push_back(k);
    }
    return idx;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

}  // namespace

std::string render_svg_plot(const std::string& title, const std::string& x_label,
                            const std::string& y_label,
                            const std::vector<PlotSeries>& series, int max_points) {
    const double W = 800, H = 500;
    const double ml = 72, mr = 16, mt = 34, mb = 46;
    const double px0 = ml, px1 = W - mr, py0 = mt, py1 = H - mb;

    // Data range over finite samples of all series.
    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool any = false;
    for (const auto& s : series) {
        const size_t n = std::min(s.x.size(), s.y.size());
        for (size_t i = 0; i < n; ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            if (!any) {
                xmin = xmax = s.x[i];
                ymin = ymax = s.y[i];
                any = true;
            } else {
                xmin = std::min(xmin, s.x[i]);
                xmax = std::max(xmax, s.x[i]);
                ymin = std::min(ymin, s.y[i]);
                ymax = std::max(ymax, s.y[i]);
            }
        }
    }
    if (xmax <= xmin) xmax = xmin + std::max(1.0, std::abs(xmin) * 0.1);
    const double ypad = (ymax > ymin) ? 0.05 * (ymax - ymin)
                                      : std::max(1e-9, std::abs(ymin) * 0.1 + 0.1);
    ymin -= ypad;
    ymax += ypad;

    auto X = [&](double x) { return px0 + (x - xmin) / (xmax - xmin) * (px1 - px0); };
    auto Y = [&](double y) { return py1 - (y - ymin) / (ymax - ymin) * (py1 - py0); };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 500\" "
          "width=\"800\" height=\"500\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"500\" fill=\"white\"/>\n";
    os << "<text x=\"" << px((px0 + px1) / 2) << "\" y=\"20\" text-anchor=\"middle\" "
          "font-family=\"sans-serif\" font-size=\"14\">"
       << xml_escape(title) << "</text>\n";

    // Axes frame, ticks and grid.
    const int nticks = 6;
    for (int i = 0; i < nticks; ++i) {
        const double fx = xmin + (xmax - xmin) * i / (nticks - 1);
        const double gx = X(fx);
        os << "<line x1=\"" << px(gx) << "\" y1=\"" << px(py0) << "\" x2=\"" << px(gx)
           << "\" y2=\"" << px(py1) << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        os << "<text x=\"" << px(gx) << "\" y=\"" << px(py1 + 16)
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
           << tick_label(fx) << "</text>\n";
        const double fy = ymin + (ymax - ymin) * i / (nticks - 1);
        const double gy = Y(fy);
        os << "<line x1=\"" << px(px0) << "\" y1=\"" << px(gy) << "\" x2=\"" << px(px1)
           << "\" y2=\"" << px(gy) << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        os << "<text x=\"" << px(px0 - 6) << "\" y=\"" << px(gy + 4)
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
           << tick_label(fy) << "</text>\n";
    }
    os << "<rect x=\"" << px(px0) << "\" y=\"" << px(py0) << "\" width=\"" << px(px1 - px0)
       << "\" height=\"" << px(py1 - py0)
       << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
    os << "<text x=\"" << px((px0 + px1) / 2) << "\" y=\"" << px(H - 10)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
       << xml_escape(x_label) << "</text>\n";
    os << "<text x=\"16\" y=\"" << px((py0 + py1) / 2)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
          "transform=\"rotate(-90 16 "
       << px((py0 + py1) / 2) << ")\">" << xml_escape(y_label) << "</text>\n";

    // Curves.
    for (size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = kPalette[k % (sizeof(kPalette) / sizeof(kPalette[0]))];
        const size_t n = std::min(s.x.size(), s.y.size());
        auto idx = decimate_indices(n, max_points);
        std::ostringstream pts;
        size_t emitted = 0;
        for (size_t i : idx) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            if (emitted) pts << " ";
            pts << px(X(s.x[i])) << "," << px(Y(s.y[i]));
            ++emitted;
        }
        if (emitted >= 2) {
            os << "<polyline fill=\"none\" stroke=\"" << color
               << "\" stroke-width=\"1.5\" points=\"" << pts.str() << "\"/>\n";
        } else if (emitted == 1) {
            os << "<circle r=\"2\" fill=\"" << color << "\" cx=\""
               << pts.str().substr(0, pts.str().find(',')) << "\" cy=\""
               << pts.str().substr(pts.str().find(',') + 1) << "\"/>\n";
        }
        if (series.size() > 1) {
            const double ly = py0 + 14 + 16 * static_cast<double>(k);
            os << "<line x1=\"" << px(px1 - 120) << "\" y1=\"" << px(ly - 4) << "\" x2=\""
               << px(px1 - 96) << "\" y2=\"" << px(ly - 4) << "\" stroke=\"" << color
               << "\" stroke-width=\"2\"/>\n";
            os << "<text x=\"" << px(px1 - 90) << "\" y=\"" << px(ly)
               << "\" font-family=\"sans-serif\" font-size=\"11\">" << xml_escape(s.label)
               << "</text>\n";
        }
    }
    if (!any) {
        os << "<text x=\"" << px((px0 + px1) / 2) << "\" y=\"" << px((py0 + py1) / 2)
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
              "no finite samples</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace smib
