#pragma once

#include <cstdio>
#include <string>
#include <utility>
#include <vector>

namespace seleval::detail {

// Just enough SVG to draw the report charts. Coordinates are formatted with
// fixed precision so output is reproducible.
class SvgCanvas {
public:
    SvgCanvas(int width, int height) : width_(width), height_(height) {
        body_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
                 "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " +
                 std::to_string(width) + " " + std::to_string(height) + "\">\n";
        body_ += "<rect width=\"" + std::to_string(width) + "\" height=\"" +
                 std::to_string(height) + "\" fill=\"white\"/>\n";
    }

    static std::string num(double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.2f", v);
        return buf;
    }

    void line(double x1, double y1, double x2, double y2, const std::string& stroke,
              double stroke_width = 1.0) {
        body_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) +
                 "\" y2=\"" + num(y2) + "\" stroke=\"" + stroke + "\" stroke-width=\"" +
                 num(stroke_width) + "\"/>\n";
    }

    void rect(double x, double y, double w, double h, const std::string& fill) {
        body_ += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) +
                 "\" height=\"" + num(h) + "\" fill=\"" + fill + "\"/>\n";
    }

    void polyline(const std::vector<std::pair<double, double>>& points, const std::string& stroke) {
        body_ += "<polyline fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (i > 0) body_ += ' ';
            body_ += num(points[i].first) + "," + num(points[i].second);
        }
        body_ += "\"/>\n";
    }

    void text(double x, double y, const std::string& content, const std::string& fill = "black",
              int font_size = 11, const std::string& anchor = "start") {
        body_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" fill=\"" + fill +
                 "\" font-size=\"" + std::to_string(font_size) +
                 "\" font-family=\"sans-serif\" text-anchor=\"" + anchor + "\">" +
                 escape(content) + "</text>\n";
    }

    std::string finish() && { return std::move(body_) + "</svg>\n"; }

    int width() const { return width_; }
    int height() const { return height_; }

private:
    static std::string escape(const std::string& raw) {
        std::string out;
        out.reserve(raw.size());
        for (char c : raw) {
            switch (c) {
                case '&': out += "&amp;"; break;
                case '<': out += "&lt;"; break;
                case '>': out += "&gt;"; break;
                default: out += c;
            }
        }
        return out;
    }

    int width_;
    int height_;
    std::string body_;
};

inline const std::vector<std::string>& chart_palette() {
    static const std::vector<std::string> palette{
        "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
        "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
    };
    return palette;
}

}  // namespace seleval::detail
