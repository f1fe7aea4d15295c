#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "alpi/format.hpp"

namespace alpi::svg {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

namespace detail {

inline const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                 "#8c564b", "#17becf", "#7f7f7f", "#bcbd22", "#e377c2"};

struct Frame {
    double width = 720, height = 480;
    double left = 70, right = 20, top = 40, bottom = 50;
    double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    bool log_y = false;

    double px(double x) const { return left + (x - x0) / (x1 - x0) * (width - left - right); }
    double py(double y) const {
        double v = log_y ? std::log10(y) : y;
        double lo = log_y ? std::log10(y0) : y0;
        double hi = log_y ? std::log10(y1) : y1;
        return height - bottom - (v - lo) / (hi - lo) * (height - top - bottom);
    }
};

inline std::string text(double x, double y, const std::string& s, int size = 12,
                        const std::string& anchor = "middle") {
    return "<text x=\"" + num_to_string(x) + "\" y=\"" + num_to_string(y) +
           "\" font-family=\"sans-serif\" font-size=\"" + std::to_string(size) +
           "\" text-anchor=\"" + anchor + "\">" + s + "</text>\n";
}

inline std::string header(const Frame& f, const std::string& title, const std::string& xlabel,
                          const std::string& ylabel) {
    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                      num_to_string(f.width) + "\" height=\"" + num_to_string(f.height) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += text(f.width / 2, 22, title, 15);
    out += text((f.left + f.width - f.right) / 2, f.height - 12, xlabel);
    out += "<g transform=\"rotate(-90 16 " + num_to_string(f.height / 2) + ")\">" +
           text(16, f.height / 2, ylabel) + "</g>\n";
    out += "<rect x=\"" + num_to_string(f.left) + "\" y=\"" + num_to_string(f.top) + "\" width=\"" +
           num_to_string(f.width - f.left - f.right) + "\" height=\"" +
           num_to_string(f.height - f.top - f.bottom) +
           "\" fill=\"none\" stroke=\"#444444\"/>\n";
    return out;
}

inline std::string round_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

inline std::string axes(const Frame& f, int xticks = 6, int yticks = 6) {
    std::string out;
    for (int i = 0; i <= xticks; ++i) {
        double x = f.x0 + (f.x1 - f.x0) * i / xticks;
        out += text(f.px(x), f.height - f.bottom + 18, round_label(x), 11);
    }
    for (int i = 0; i <= yticks; ++i) {
        double y;
        if (f.log_y) {
            double lo = std::log10(f.y0), hi = std::log10(f.y1);
            y = std::pow(10.0, lo + (hi - lo) * i / yticks);
        } else {
            y = f.y0 + (f.y1 - f.y0) * i / yticks;
        }
        out += text(f.left - 8, f.py(y) + 4, round_label(y), 11, "end");
    }
    return out;
}

} // namespace detail

/// Self-contained line chart. With log_y, non-positive samples are dropped.
inline void write_line_chart(const std::string& path, const std::string& title,
                             const std::string& xlabel, const std::string& ylabel,
                             const std::vector<Series>& series, bool log_y = false) {
    if (series.empty()) throw std::invalid_argument("write_line_chart: no series");
    detail::Frame f;
    f.log_y = log_y;
    bool any = false;
    for (const Series& s : series) {
        if (s.x.size() != s.y.size())
            throw std::invalid_argument("write_line_chart: series length mismatch");
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (log_y && !(s.y[i] > 0.0)) continue;
            if (!any) {
                f.x0 = f.x1 = s.x[i];
                f.y0 = f.y1 = s.y[i];
                any = true;
            }
            f.x0 = std::min(f.x0, s.x[i]);
            f.x1 = std::max(f.x1, s.x[i]);
            f.y0 = std::min(f.y0, s.y[i]);
            f.y1 = std::max(f.y1, s.y[i]);
        }
    }
    if (!any) throw std::invalid_argument("write_line_chart: no drawable points");
    if (f.x1 == f.x0) f.x1 = f.x0 + 1;
    if (f.y1 == f.y0) f.y1 = f.y0 + (log_y ? f.y0 : 1);

    std::string out = detail::header(f, title, xlabel, ylabel) + detail::axes(f);
    for (std::size_t k = 0; k < series.size(); ++k) {
        const char* color = detail::kPalette[k % 10];
        std::string points;
        for (std::size_t i = 0; i < series[k].x.size(); ++i) {
            if (log_y && !(series[k].y[i] > 0.0)) continue;
            points += num_to_string(f.px(series[k].x[i])) + "," +
                      num_to_string(f.py(series[k].y[i])) + " ";
        }
        out += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
               "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
        out += "<rect x=\"" + num_to_string(f.width - f.right - 150) + "\" y=\"" +
               num_to_string(f.top + 8 + 16 * k) + "\" width=\"12\" height=\"3\" fill=\"" + color +
               "\"/>\n";
        out += detail::text(f.width - f.right - 132, f.top + 13 + 16 * k, series[k].label, 11,
                            "start");
    }
    std::ofstream file(path);
    if (!file) throw std::runtime_error("write_line_chart: cannot open " + path);
    file << out << "</svg>\n";
}

/// Self-contained bar chart with optional symmetric error bars.
inline void write_bar_chart(const std::string& path, const std::string& title,
                            const std::string& ylabel, const std::vector<std::string>& labels,
                            const std::vector<double>& values,
                            const std::vector<double>& errors = {}) {
    if (labels.size() != values.size())
        throw std::invalid_argument("write_bar_chart: label/value mismatch");
    if (values.empty()) throw std::invalid_argument("write_bar_chart: no bars");
    if (!errors.empty() && errors.size() != values.size())
        throw std::invalid_argument("write_bar_chart: error bar count mismatch");
    detail::Frame f;
    f.x0 = 0;
    f.x1 = static_cast<double>(values.size());
    f.y0 = 0;
    f.y1 = 0;
    for (std::size_t i = 0; i < values.size(); ++i)
        f.y1 = std::max(f.y1, values[i] + (errors.empty() ? 0.0 : errors[i]));
    if (f.y1 == 0) f.y1 = 1;

    std::string out = detail::header(f, title, "", ylabel);
    for (int i = 0; i <= 5; ++i) {
        double y = f.y1 * i / 5;
        out += detail::text(f.left - 8, f.py(y) + 4, detail::round_label(y), 11, "end");
    }
    const double band = (f.width - f.left - f.right) / values.size();
    for (std::size_t i = 0; i < values.size(); ++i) {
        double cx = f.left + band * (i + 0.5);
        double top = f.py(values[i]);
        out += "<rect x=\"" + num_to_string(cx - band * 0.35) + "\" y=\"" + num_to_string(top) +
               "\" width=\"" + num_to_string(band * 0.7) + "\" height=\"" +
               num_to_string(f.py(0) - top) + "\" fill=\"" + detail::kPalette[i % 10] + "\"/>\n";
        if (!errors.empty() && errors[i] > 0.0) {
            double lo = f.py(std::max(0.0, values[i] - errors[i]));
            double hi = f.py(values[i] + errors[i]);
            out += "<line x1=\"" + num_to_string(cx) + "\" x2=\"" + num_to_string(cx) + "\" y1=\"" +
                   num_to_string(lo) + "\" y2=\"" + num_to_string(hi) +
                   "\" stroke=\"#222222\" stroke-width=\"1.5\"/>\n";
        }
        out += detail::text(cx, f.height - f.bottom + 18, labels[i], 10);
    }
    std::ofstream file(path);
    if (!file) throw std::runtime_error("write_bar_chart: cannot open " + path);
    file << out << "</svg>\n";
}

} // namespace alpi::svg
