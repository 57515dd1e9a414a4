#include "cytrace/core.hpp"

#include <algorithm>
#include <map>

namespace cytrace {

namespace {

struct InstanceAcc {
    std::int64_t count = 0;
    double sum_x = 0.0;
    double sum_y = 0.0;
    int x_min = 0, y_min = 0, x_max = 0, y_max = 0;
};

}  // namespace

std::vector<InstanceRecord> extract_instances(const LabelMap& map, int frame) {
    std::map<Label, InstanceAcc> acc;
    for (int y = 0; y < map.height; ++y) {
        for (int x = 0; x < map.width; ++x) {
            const Label lab = map.at(x, y);
            if (lab == 0) continue;
            auto [it, inserted] = acc.try_emplace(lab);
            InstanceAcc& a = it->second;
            if (inserted) {
                a.x_min = a.x_max = x;
                a.y_min = a.y_max = y;
            } else {
                a.x_min = std::min(a.x_min, x);
                a.x_max = std::max(a.x_max, x);
                a.y_min = std::min(a.y_min, y);
                a.y_max = std::max(a.y_max, y);
            }
            a.count += 1;
            a.sum_x += x;
            a.sum_y += y;
        }
    }

    std::vector<InstanceRecord> records;
    records.reserve(acc.size());
    for (const auto& [lab, a] : acc) {
        InstanceRecord rec;
        rec.label = lab;
        rec.frame = frame;
        rec.cx = a.sum_x / static_cast<double>(a.count);
        rec.cy = a.sum_y / static_cast<double>(a.count);
        rec.x_min = a.x_min;
        rec.y_min = a.y_min;
        rec.x_max = a.x_max;
        rec.y_max = a.y_max;
        rec.area = a.count;
        records.push_back(rec);
    }
    return records;
}

PixelSet instance_pixels(const LabelMap& map, Label label) {
    PixelSet set;
    set.width = map.width;
    set.height = map.height;
    const std::int64_t total = static_cast<std::int64_t>(map.labels.size());
    for (std::int64_t i = 0; i < total; ++i) {
        if (map.labels[static_cast<std::size_t>(i)] == label) set.indices.push_back(i);
    }
    return set;
}

std::int64_t overlap_pixels(const PixelSet& a, const PixelSet& b) {
    if (a.width != b.width || a.height != b.height) {
        throw DimensionError("overlap_pixels: incompatible frames (" + std::to_string(a.width) + "x" +
                             std::to_string(a.height) + " vs " + std::to_string(b.width) + "x" +
                             std::to_string(b.height) + ")");
    }
    std::int64_t count = 0;
    std::size_t i = 0, j = 0;
    while (i < a.indices.size() && j < b.indices.size()) {
        if (a.indices[i] < b.indices[j]) {
            ++i;
        } else if (a.indices[i] > b.indices[j]) {
            ++j;
        } else {
            ++count;
            ++i;
            ++j;
        }
    }
    return count;
}

double iou(const PixelSet& a, const PixelSet& b) {
    const std::int64_t inter = overlap_pixels(a, b);
    const std::int64_t uni =
        static_cast<std::int64_t>(a.indices.size()) + static_cast<std::int64_t>(b.indices.size()) - inter;
    if (uni == 0) return 0.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

double jaccard_to_matched(const PixelSet& gt, const PixelSet& res) { return iou(gt, res); }

}  // namespace cytrace
