#include "cytrace/features.hpp"

#include <algorithm>
#include <cmath>

namespace cytrace {

FeatureVector relative_position_encoding(const InstanceRecord& target,
                                         const std::vector<InstanceRecord>& others,
                                         const SpatialEncodingConfig& cfg) {
    if (cfg.n < 1) throw ValidationError("relative_position_encoding: n must be >= 1");
    if (cfg.image_width <= 0 || cfg.image_height <= 0) {
        throw ValidationError("relative_position_encoding: image dimensions must be positive");
    }

    struct Neighbor {
        double dist2;
        Label label;
        double dx, dy;
    };
    std::vector<Neighbor> neighbors;
    neighbors.reserve(others.size());
    for (const InstanceRecord& other : others) {
        const double dx = other.cx - target.cx;
        const double dy = other.cy - target.cy;
        neighbors.push_back({dx * dx + dy * dy, other.label, dx, dy});
    }
    std::sort(neighbors.begin(), neighbors.end(), [](const Neighbor& a, const Neighbor& b) {
        if (a.dist2 != b.dist2) return a.dist2 < b.dist2;
        return a.label < b.label;
    });

    FeatureVector out;
    out.kind = FeatureKind::spatial;
    out.values.assign(static_cast<std::size_t>(2 * cfg.n), 0.0);
    const std::size_t take = std::min<std::size_t>(neighbors.size(), static_cast<std::size_t>(cfg.n));
    for (std::size_t k = 0; k < take; ++k) {
        out.values[2 * k] = neighbors[k].dx / static_cast<double>(cfg.image_width);
        out.values[2 * k + 1] = neighbors[k].dy / static_cast<double>(cfg.image_height);
    }
    return out;
}

FeatureVector appearance_descriptor(const InstanceRecord& inst, const LabelMap& map,
                                    const Grid* intensity) {
    // second pass over the instance bbox: central moments and intensity stats
    double mu20 = 0.0, mu02 = 0.0, mu11 = 0.0;
    double int_sum = 0.0, int_sum2 = 0.0;
    for (int y = inst.y_min; y <= inst.y_max; ++y) {
        for (int x = inst.x_min; x <= inst.x_max; ++x) {
            if (map.at(x, y) != inst.label) continue;
            const double dx = x - inst.cx;
            const double dy = y - inst.cy;
            mu20 += dx * dx;
            mu02 += dy * dy;
            mu11 += dx * dy;
            if (intensity != nullptr) {
                const double v = intensity->at(x, y);
                int_sum += v;
                int_sum2 += v * v;
            }
        }
    }

    const double area = static_cast<double>(inst.area);
    const double area2 = area * area;
    const double bbox_w = static_cast<double>(inst.x_max - inst.x_min + 1);
    const double bbox_h = static_cast<double>(inst.y_max - inst.y_min + 1);

    FeatureVector out;
    out.kind = FeatureKind::visual;
    out.values.assign(kVisualDim, 0.0);
    out.values[0] = area / (static_cast<double>(map.width) * static_cast<double>(map.height));
    out.values[1] = bbox_w / bbox_h;
    out.values[2] = area / (bbox_w * bbox_h);
    out.values[3] = mu20 / area2;
    out.values[4] = mu02 / area2;
    out.values[5] = mu11 / area2;
    if (intensity != nullptr) {
        const double mean = int_sum / area;
        const double var = std::max(0.0, int_sum2 / area - mean * mean);
        out.values[6] = mean;
        out.values[7] = std::sqrt(var);
    }
    return out;
}

SequenceFeatures compute_sequence_features(const FrameSet& frames, int n) {
    SpatialEncodingConfig cfg;
    cfg.n = n;
    cfg.image_width = frames.width();
    cfg.image_height = frames.height();

    SequenceFeatures feats;
    const int count = frames.frame_count();
    feats.instances.resize(static_cast<std::size_t>(count));
    feats.visual.resize(static_cast<std::size_t>(count));
    feats.spatial.resize(static_cast<std::size_t>(count));

    for (int f = 0; f < count; ++f) {
        const LabelMap& map = frames.frames[static_cast<std::size_t>(f)];
        const Grid* grid = frames.has_intensity() ? &frames.intensity[static_cast<std::size_t>(f)] : nullptr;
        auto& inst = feats.instances[static_cast<std::size_t>(f)];
        inst = extract_instances(map, f);

        auto& vis = feats.visual[static_cast<std::size_t>(f)];
        auto& spa = feats.spatial[static_cast<std::size_t>(f)];
        vis.reserve(inst.size());
        spa.reserve(inst.size());
        std::vector<InstanceRecord> others;
        others.reserve(inst.size());
        for (std::size_t i = 0; i < inst.size(); ++i) {
            vis.push_back(appearance_descriptor(inst[i], map, grid));
            others.clear();
            for (std::size_t j = 0; j < inst.size(); ++j) {
                if (j != i) others.push_back(inst[j]);
            }
            spa.push_back(relative_position_encoding(inst[i], others, cfg));
        }
    }
    return feats;
}

}  // namespace cytrace
