#pragma once

#include <span>
#include <string>
#include <vector>

namespace scalex::svg {

// Deterministic, text-only SVG figures for report output.

struct LabeledValue {
    std::string label;
    double value = 0.0;
};

// Horizontal bar chart (one bar per label, zero axis drawn).
std::string bar_chart(std::span<const LabeledValue> rows, const std::string& title);

// Scatter plot with axis labels.
struct ScatterPoint {
    double x = 0.0;
    double y = 0.0;
    std::string label;
};
std::string scatter(std::span<const ScatterPoint> points, const std::string& title,
                    const std::string& x_label, const std::string& y_label);

// Cluster map: points colored by label (-1 gray), cluster ids annotated at
// centroids.
struct AtlasPoint {
    double x = 0.0;
    double y = 0.0;
    int label = -1;
};
std::string atlas_plot(std::span<const AtlasPoint> points, const std::string& title);

}  // namespace scalex::svg
