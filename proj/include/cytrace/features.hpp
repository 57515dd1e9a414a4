#pragma once

#include <vector>

#include "cytrace/core.hpp"

namespace cytrace {

struct SpatialEncodingConfig {
    int n = 4;  // neighbours encoded per cell
    int image_width = 0;
    int image_height = 0;
};

enum class FeatureKind { spatial, visual };

struct FeatureVector {
    std::vector<double> values;
    FeatureKind kind = FeatureKind::spatial;
};

inline constexpr int kVisualDim = 8;

// Centroid offsets to the n nearest neighbours (ties on distance broken by
// ascending label), interleaved as (dx, dy) per neighbour in nearest-first
// order, zero-padded to length 2n. Offsets are neighbour minus target; dx is
// divided by image width, dy by image height. An isolated cell encodes to
// the all-zero vector.
FeatureVector relative_position_encoding(const InstanceRecord& target,
                                         const std::vector<InstanceRecord>& others,
                                         const SpatialEncodingConfig& cfg);

// 8-component shape/intensity summary of one instance:
//   [area/(W*H), bbox aspect (w/h), fill (area/bbox area),
//    mu20/area^2, mu02/area^2, mu11/area^2,
//    mean intensity, intensity std]
// The two intensity entries are 0 when no intensity grid is given.
FeatureVector appearance_descriptor(const InstanceRecord& inst, const LabelMap& map,
                                    const Grid* intensity = nullptr);

// Instances plus both feature kinds for every frame of a sequence, each
// frame's lists parallel and sorted by label.
struct SequenceFeatures {
    std::vector<std::vector<InstanceRecord>> instances;
    std::vector<std::vector<FeatureVector>> visual;
    std::vector<std::vector<FeatureVector>> spatial;
};

SequenceFeatures compute_sequence_features(const FrameSet& frames, int n);

}  // namespace cytrace
