#include "scalex/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace scalex::svg {

namespace {

constexpr int kWidth = 720;
constexpr int kHeight = 480;
constexpr int kMargin = 60;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string header(const std::string& title) {
    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                      std::to_string(kWidth) + "\" height=\"" + std::to_string(kHeight) +
                      "\" viewBox=\"0 0 " + std::to_string(kWidth) + " " +
                      std::to_string(kHeight) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + std::to_string(kWidth / 2) +
           "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"16\">" +
           escape(title) + "</text>\n";
    return out;
}

const char* palette(int label) {
    static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                   "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                   "#bcbd22", "#17becf"};
    return colors[label % 10];
}

}  // namespace

std::string bar_chart(std::span<const LabeledValue> rows, const std::string& title) {
    std::string out = header(title);
    if (!rows.empty()) {
        double lo = 0.0, hi = 0.0;
        for (const auto& r : rows) {
            lo = std::min(lo, r.value);
            hi = std::max(hi, r.value);
        }
        if (hi == lo) hi = lo + 1.0;
        const double plot_w = kWidth - 2.0 * kMargin;
        const double row_h =
            std::min(36.0, (kHeight - 2.0 * kMargin) / static_cast<double>(rows.size()));
        auto xpos = [&](double v) { return kMargin + (v - lo) / (hi - lo) * plot_w; };
        const double zero_x = xpos(0.0);
        out += "<line x1=\"" + fmt(zero_x) + "\" y1=\"" + std::to_string(kMargin - 10) +
               "\" x2=\"" + fmt(zero_x) + "\" y2=\"" +
               std::to_string(kHeight - kMargin + 10) +
               "\" stroke=\"#444\" stroke-width=\"1\"/>\n";
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const double y = kMargin + static_cast<double>(i) * row_h;
            const double vx = xpos(rows[i].value);
            const double bx = std::min(zero_x, vx);
            const double bw = std::max(1.0, std::abs(vx - zero_x));
            out += "<rect x=\"" + fmt(bx) + "\" y=\"" + fmt(y) + "\" width=\"" + fmt(bw) +
                   "\" height=\"" + fmt(row_h * 0.7) + "\" fill=\"" +
                   (rows[i].value >= 0 ? "#1f77b4" : "#d62728") + "\"/>\n";
            out += "<text x=\"8\" y=\"" + fmt(y + row_h * 0.5) +
                   "\" font-family=\"sans-serif\" font-size=\"11\">" +
                   escape(rows[i].label) + "</text>\n";
            out += "<text x=\"" + fmt(vx + (rows[i].value >= 0 ? 4.0 : -4.0)) + "\" y=\"" +
                   fmt(y + row_h * 0.5) + "\" font-family=\"sans-serif\" font-size=\"10\"" +
                   (rows[i].value >= 0 ? "" : " text-anchor=\"end\"") + ">" +
                   fmt(rows[i].value) + "</text>\n";
        }
    }
    out += "</svg>\n";
    return out;
}

namespace {

void bounds(double& lo, double& hi) {
    if (hi == lo) {
        lo -= 1.0;
        hi += 1.0;
    } else {
        const double pad = 0.05 * (hi - lo);
        lo -= pad;
        hi += pad;
    }
}

}  // namespace

std::string scatter(std::span<const ScatterPoint> points, const std::string& title,
                    const std::string& x_label, const std::string& y_label) {
    std::string out = header(title);
    double xlo = 0.0, xhi = 0.0, ylo = 0.0, yhi = 0.0;
    if (!points.empty()) {
        xlo = xhi = points[0].x;
        ylo = yhi = points[0].y;
        for (const auto& p : points) {
            xlo = std::min(xlo, p.x);
            xhi = std::max(xhi, p.x);
            ylo = std::min(ylo, p.y);
            yhi = std::max(yhi, p.y);
        }
    }
    bounds(xlo, xhi);
    bounds(ylo, yhi);
    auto xpos = [&](double v) {
        return kMargin + (v - xlo) / (xhi - xlo) * (kWidth - 2.0 * kMargin);
    };
    auto ypos = [&](double v) {
        return kHeight - kMargin - (v - ylo) / (yhi - ylo) * (kHeight - 2.0 * kMargin);
    };
    out += "<rect x=\"" + std::to_string(kMargin) + "\" y=\"" + std::to_string(kMargin) +
           "\" width=\"" + std::to_string(kWidth - 2 * kMargin) + "\" height=\"" +
           std::to_string(kHeight - 2 * kMargin) +
           "\" fill=\"none\" stroke=\"#888\"/>\n";
    out += "<text x=\"" + std::to_string(kWidth / 2) + "\" y=\"" +
           std::to_string(kHeight - 16) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
           escape(x_label) + "</text>\n";
    out += "<text x=\"18\" y=\"" + std::to_string(kHeight / 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
           "transform=\"rotate(-90 18 " +
           std::to_string(kHeight / 2) + ")\">" + escape(y_label) + "</text>\n";
    for (const auto& p : points) {
        out += "<circle cx=\"" + fmt(xpos(p.x)) + "\" cy=\"" + fmt(ypos(p.y)) +
               "\" r=\"4\" fill=\"#1f77b4\"/>\n";
        if (!p.label.empty()) {
            out += "<text x=\"" + fmt(xpos(p.x) + 6.0) + "\" y=\"" + fmt(ypos(p.y) - 6.0) +
                   "\" font-family=\"sans-serif\" font-size=\"10\">" + escape(p.label) +
                   "</text>\n";
        }
    }
    out += "</svg>\n";
    return out;
}

std::string atlas_plot(std::span<const AtlasPoint> points, const std::string& title) {
    std::string out = header(title);
    double xlo = 0.0, xhi = 0.0, ylo = 0.0, yhi = 0.0;
    if (!points.empty()) {
        xlo = xhi = points[0].x;
        ylo = yhi = points[0].y;
        for (const auto& p : points) {
            xlo = std::min(xlo, p.x);
            xhi = std::max(xhi, p.x);
            ylo = std::min(ylo, p.y);
            yhi = std::max(yhi, p.y);
        }
    }
    bounds(xlo, xhi);
    bounds(ylo, yhi);
    auto xpos = [&](double v) {
        return kMargin + (v - xlo) / (xhi - xlo) * (kWidth - 2.0 * kMargin);
    };
    auto ypos = [&](double v) {
        return kHeight - kMargin - (v - ylo) / (yhi - ylo) * (kHeight - 2.0 * kMargin);
    };
    std::map<int, std::pair<double, double>> centroid_sum;
    std::map<int, int> centroid_count;
    for (const auto& p : points) {
        const char* color = p.label < 0 ? "#bbbbbb" : palette(p.label);
        out += "<circle cx=\"" + fmt(xpos(p.x)) + "\" cy=\"" + fmt(ypos(p.y)) +
               "\" r=\"3\" fill=\"" + color + "\"/>\n";
        if (p.label >= 0) {
            centroid_sum[p.label].first += p.x;
            centroid_sum[p.label].second += p.y;
            centroid_count[p.label] += 1;
        }
    }
    for (const auto& [label, sum] : centroid_sum) {
        const double cx = sum.first / centroid_count[label];
        const double cy = sum.second / centroid_count[label];
        out += "<text x=\"" + fmt(xpos(cx)) + "\" y=\"" + fmt(ypos(cy)) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" "
               "font-weight=\"bold\">" +
               std::to_string(label) + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

}  // namespace scalex::svg
