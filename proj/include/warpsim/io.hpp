#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "warpsim/errors.hpp"
#include "warpsim/record.hpp"

namespace warpsim {

/// Locale-independent formatting with 12 significant digits.
inline std::string format_g12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

/// Trajectory CSV with the fixed column order
/// t_s, mean_x_over_c_s, var_x, sx, sy, sz, norm.
inline void write_trajectory_csv(const std::filesystem::path& path,
                                 const TrajectoryRecord& rec) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "t_s,mean_x_over_c_s,var_x,sx,sy,sz,norm\n";
    for (std::size_t i = 0; i < rec.size(); ++i) {
        out << format_g12(rec.times[i]) << ',' << format_g12(rec.mean_x_over_c[i]) << ','
            << format_g12(rec.var_X[i]) << ',' << format_g12(rec.sx[i]) << ','
            << format_g12(rec.sy[i]) << ',' << format_g12(rec.sz[i]) << ','
            << format_g12(rec.norm[i]) << '\n';
    }
    if (!out) throw IoError("write failed for " + path.string());
}

/// Minimal static SVG 1.1 line plot: labeled axes plus one polyline per
/// series.  No plotting dependency; polylines are all the figures need.
class SvgPlot {
public:
    struct Series {
        std::string label;
        std::string color;
        std::vector<double> x, y;
        bool dashed = false;
    };

    SvgPlot(std::string title, std::string x_label, std::string y_label)
        : title_(std::move(title)), x_label_(std::move(x_label)),
          y_label_(std::move(y_label)) {}

    void add_series(Series s) { series_.push_back(std::move(s)); }

    void write(const std::filesystem::path& path) const {
        double x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
        bool first = true;
        for (const auto& s : series_) {
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (first) {
                    x_lo = x_hi = s.x[i];
                    y_lo = y_hi = s.y[i];
                    first = false;
                } else {
                    x_lo = std::min(x_lo, s.x[i]);
                    x_hi = std::max(x_hi, s.x[i]);
                    y_lo = std::min(y_lo, s.y[i]);
                    y_hi = std::max(y_hi, s.y[i]);
                }
            }
        }
        if (x_hi == x_lo) x_hi = x_lo + 1.0;
        if (y_hi == y_lo) y_hi = y_lo + 1.0;
        const double pad_y = 0.05 * (y_hi - y_lo);
        y_lo -= pad_y;
        y_hi += pad_y;

        const double w = 720, h = 440, ml = 72, mr = 20, mt = 36, mb = 48;
        auto px = [&](double x) { return ml + (x - x_lo) / (x_hi - x_lo) * (w - ml - mr); };
        auto py = [&](double y) { return h - mb - (y - y_lo) / (y_hi - y_lo) * (h - mt - mb); };
        auto num = [](double v) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.4g", v);
            return std::string(buf);
        };
        auto coord = [](double v) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.2f", v);
            return std::string(buf);
        };

        std::ofstream out(path);
        if (!out) throw IoError("cannot open " + path.string() + " for writing");
        out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
            << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << w
            << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n"
            << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
            << "<text x=\"" << w / 2 << "\" y=\"22\" text-anchor=\"middle\" "
               "font-family=\"sans-serif\" font-size=\"15\">" << title_ << "</text>\n";

        // axes
        out << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr
            << "\" y2=\"" << h - mb << "\" stroke=\"black\"/>\n"
            << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
            << h - mb << "\" stroke=\"black\"/>\n";
        const int n_ticks = 5;
        for (int i = 0; i <= n_ticks; ++i) {
            const double xv = x_lo + (x_hi - x_lo) * i / n_ticks;
            const double yv = y_lo + (y_hi - y_lo) * i / n_ticks;
            out << "<line x1=\"" << coord(px(xv)) << "\" y1=\"" << h - mb << "\" x2=\""
                << coord(px(xv)) << "\" y2=\"" << h - mb + 5 << "\" stroke=\"black\"/>\n"
                << "<text x=\"" << coord(px(xv)) << "\" y=\"" << h - mb + 18
                << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
                   "font-size=\"11\">" << num(xv) << "</text>\n"
                << "<line x1=\"" << ml - 5 << "\" y1=\"" << coord(py(yv)) << "\" x2=\""
                << ml << "\" y2=\"" << coord(py(yv)) << "\" stroke=\"black\"/>\n"
                << "<text x=\"" << ml - 8 << "\" y=\"" << coord(py(yv) + 4)
                << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
                << num(yv) << "</text>\n";
        }
        out << "<text x=\"" << (ml + w - mr) / 2 << "\" y=\"" << h - 12
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
            << x_label_ << "</text>\n"
            << "<text x=\"18\" y=\"" << (mt + h - mb) / 2
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
               "transform=\"rotate(-90 18 " << (mt + h - mb) / 2 << ")\">" << y_label_
            << "</text>\n";

        int legend_row = 0;
        for (const auto& s : series_) {
            out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"";
            if (s.dashed) out << " stroke-dasharray=\"6 4\"";
            out << " points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                out << coord(px(s.x[i])) << ',' << coord(py(s.y[i]));
                if (i + 1 < s.x.size()) out << ' ';
            }
            out << "\"/>\n";
            if (!s.label.empty()) {
                const double ly = mt + 14 + 16 * legend_row++;
                out << "<line x1=\"" << w - mr - 130 << "\" y1=\"" << ly - 4 << "\" x2=\""
                    << w - mr - 104 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << s.color
                    << "\" stroke-width=\"2\"/>\n"
                    << "<text x=\"" << w - mr - 98 << "\" y=\"" << ly
                    << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.label
                    << "</text>\n";
            }
        }
        out << "</svg>\n";
        if (!out) throw IoError("write failed for " + path.string());
    }

private:
    std::string title_, x_label_, y_label_;
    std::vector<Series> series_;
};

} // namespace warpsim
