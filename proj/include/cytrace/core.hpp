#pragma once

#include <cstdint>
#include <cstddef>
#include <vector>

#include "cytrace/errors.hpp"

namespace cytrace {

using Label = std::uint32_t;

// Per-frame instance segmentation: one integer id per pixel, 0 = background.
// Labels need not be contiguous and an instance need not be connected.
struct LabelMap {
    int width = 0;
    int height = 0;
    std::vector<Label> labels;  // row-major, width*height entries

    LabelMap() = default;
    LabelMap(int w, int h)
        : width(w), height(h), labels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0) {}

    Label at(int x, int y) const { return labels[static_cast<std::size_t>(y) * width + x]; }
    Label& at(int x, int y) { return labels[static_cast<std::size_t>(y) * width + x]; }
    bool same_shape(const LabelMap& o) const { return width == o.width && height == o.height; }
};

// Real-valued image in [0, 1], same storage convention as LabelMap.
struct Grid {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    Grid() = default;
    Grid(int w, int h)
        : width(w), height(h), values(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0.0) {}

    double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
    double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
};

// One segmented cell in one frame. The centroid is the mean of pixel
// coordinates with x = column and y = row; bbox bounds are inclusive.
struct InstanceRecord {
    Label label = 0;
    int frame = 0;
    double cx = 0.0;
    double cy = 0.0;
    int x_min = 0;
    int y_min = 0;
    int x_max = 0;
    int y_max = 0;
    std::int64_t area = 0;
};

// Ordered image sequence; intensity, when present, parallels frames.
struct FrameSet {
    std::vector<LabelMap> frames;
    std::vector<Grid> intensity;  // empty, or one grid per frame

    int frame_count() const { return static_cast<int>(frames.size()); }
    int width() const { return frames.empty() ? 0 : frames.front().width; }
    int height() const { return frames.empty() ? 0 : frames.front().height; }
    bool has_intensity() const { return !intensity.empty(); }
};

// Pixels of one instance as sorted linear indices (y*width + x), tagged
// with the source frame shape so overlaps across frames can be checked.
struct PixelSet {
    int width = 0;
    int height = 0;
    std::vector<std::int64_t> indices;
};

// One record per distinct nonzero label, sorted by label ascending.
std::vector<InstanceRecord> extract_instances(const LabelMap& map, int frame);

PixelSet instance_pixels(const LabelMap& map, Label label);

// |a ∩ b| over coincident pixel coordinates; throws DimensionError when the
// source frames have different shapes.
std::int64_t overlap_pixels(const PixelSet& a, const PixelSet& b);

// |a ∩ b| / |a ∪ b|
double iou(const PixelSet& a, const PixelSet& b);

// Same formula as iou; named separately because SEG scoring is defined on it.
double jaccard_to_matched(const PixelSet& gt, const PixelSet& res);

}  // namespace cytrace
