#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "vfn/core.hpp"
#include "vfn/field.hpp"

namespace vfn {

// Minimal self-contained SVG emitter; every plot file the project writes
// goes through this, so there is no plotting-library dependency.
class SvgWriter {
public:
    SvgWriter(double width, double height) : width_(width), height_(height) {}

    static std::string num(double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6g", v);
        return buf;
    }

    void rect(double x, double y, double w, double h, const std::string& fill) {
        body_ << "<rect x='" << num(x) << "' y='" << num(y) << "' width='"
              << num(w) << "' height='" << num(h) << "' fill='" << fill << "'/>\n";
    }

    void line(double x1, double y1, double x2, double y2,
              const std::string& stroke, double stroke_width = 1.0) {
        body_ << "<line x1='" << num(x1) << "' y1='" << num(y1) << "' x2='"
              << num(x2) << "' y2='" << num(y2) << "' stroke='" << stroke
              << "' stroke-width='" << num(stroke_width) << "'/>\n";
    }

    void polyline(const std::vector<std::pair<double, double>>& pts,
                  const std::string& stroke, double stroke_width = 1.0) {
        if (pts.size() < 2) return;
        body_ << "<polyline fill='none' stroke='" << stroke
              << "' stroke-width='" << num(stroke_width) << "' points='";
        for (const auto& [x, y] : pts) {
            body_ << num(x) << "," << num(y) << " ";
        }
        body_ << "'/>\n";
    }

    void polygon(const std::vector<std::pair<double, double>>& pts,
                 const std::string& fill, double opacity = 1.0) {
        if (pts.size() < 3) return;
        body_ << "<polygon fill='" << fill << "' fill-opacity='" << num(opacity)
              << "' stroke='none' points='";
        for (const auto& [x, y] : pts) {
            body_ << num(x) << "," << num(y) << " ";
        }
        body_ << "'/>\n";
    }

    void circle(double cx, double cy, double r, const std::string& fill,
                const std::string& stroke = "none") {
        body_ << "<circle cx='" << num(cx) << "' cy='" << num(cy) << "' r='"
              << num(r) << "' fill='" << fill << "' stroke='" << stroke
              << "'/>\n";
    }

    void text(double x, double y, const std::string& s, double size = 12.0,
              const std::string& anchor = "middle") {
        body_ << "<text x='" << num(x) << "' y='" << num(y)
              << "' font-family='sans-serif' font-size='" << num(size)
              << "' text-anchor='" << anchor << "'>" << escape(s) << "</text>\n";
    }

    void save(const std::string& path) const {
        std::ofstream file(path, std::ios::binary);
        if (!file) {
            throw Error(ErrorKind::io, "svg: cannot open '" + path + "'");
        }
        file << "<?xml version='1.0' encoding='UTF-8'?>\n"
             << "<svg xmlns='http://www.w3.org/2000/svg' width='" << num(width_)
             << "' height='" << num(height_) << "' viewBox='0 0 " << num(width_)
             << " " << num(height_) << "'>\n"
             << "<rect width='100%' height='100%' fill='white'/>\n"
             << body_.str() << "</svg>\n";
        if (!file) {
            throw Error(ErrorKind::io, "svg: write failed for '" + path + "'");
        }
    }

    double width() const { return width_; }
    double height() const { return height_; }

private:
    static std::string escape(const std::string& s) {
        std::string out;
        for (char c : s) {
            switch (c) {
                case '<': out += "&lt;"; break;
                case '>': out += "&gt;"; break;
                case '&': out += "&amp;"; break;
                case '\'': out += "&apos;"; break;
                default: out += c;
            }
        }
        return out;
    }

    double width_;
    double height_;
    std::ostringstream body_;
};

// Maps data coordinates into the pixel plot area and draws the usual frame
// with tick labels.
struct PlotFrame {
    Rect data;
    double margin_left = 52.0;
    double margin_right = 14.0;
    double margin_top = 26.0;
    double margin_bottom = 40.0;
    double plot_w = 460.0;
    double plot_h = 360.0;

    double canvas_w() const { return margin_left + plot_w + margin_right; }
    double canvas_h() const { return margin_top + plot_h + margin_bottom; }

    double px(double x) const {
        return margin_left + (x - data.x_min) / data.width() * plot_w;
    }
    double py(double y) const {
        return margin_top + (data.y_max - y) / data.height() * plot_h;
    }

    static double nice_step(double range, int target = 6) {
        double raw = range / target;
        double mag = std::pow(10.0, std::floor(std::log10(raw)));
        double r = raw / mag;
        double step = r < 1.5 ? 1.0 : r < 3.5 ? 2.0 : r < 7.5 ? 5.0 : 10.0;
        return step * mag;
    }

    void draw_frame(SvgWriter& svg, const std::string& title,
                    const std::string& x_label, const std::string& y_label) const {
        double x0 = margin_left, x1 = margin_left + plot_w;
        double y0 = margin_top, y1 = margin_top + plot_h;
        svg.line(x0, y1, x1, y1, "black");
        svg.line(x0, y0, x0, y1, "black");

        double sx = nice_step(data.width());
        for (double t = std::ceil(data.x_min / sx) * sx;
             t <= data.x_max + sx * 1e-9; t += sx) {
            double p = px(t);
            svg.line(p, y1, p, y1 + 4, "black");
            svg.text(p, y1 + 16, SvgWriter::num(t), 10);
        }
        double sy = nice_step(data.height());
        for (double t = std::ceil(data.y_min / sy) * sy;
             t <= data.y_max + sy * 1e-9; t += sy) {
            double p = py(t);
            svg.line(x0 - 4, p, x0, p, "black");
            svg.text(x0 - 7, p + 3, SvgWriter::num(t), 10, "end");
        }
        if (!title.empty()) {
            svg.text(margin_left + plot_w / 2, margin_top - 9, title, 13);
        }
        if (!x_label.empty()) {
            svg.text(margin_left + plot_w / 2, y1 + 32, x_label, 11);
        }
        if (!y_label.empty()) {
            svg.text(14, margin_top - 9, y_label, 11, "start");
        }
    }
};

// Diverging blue-grey-red map for probabilities.
inline std::string heat_color(double t) {
    if (t < 0.0) t = 0.0;
    if (t > 1.0) t = 1.0;
    auto mix = [](int a, int b, double u) {
        return static_cast<int>(std::lround(a + (b - a) * u));
    };
    int r, g, b;
    if (t < 0.5) {
        double u = t * 2.0;
        r = mix(59, 242, u);
        g = mix(76, 242, u);
        b = mix(192, 242, u);
    } else {
        double u = (t - 0.5) * 2.0;
        r = mix(242, 180, u);
        g = mix(242, 4, u);
        b = mix(242, 38, u);
    }
    char buf[16];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
    return buf;
}

inline std::string class_color(int label) {
    return label == 0 ? "#1f3c88" : "#8b1a1a";
}

}  // namespace vfn
