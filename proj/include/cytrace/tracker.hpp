#pragma once

#include "cytrace/siamese.hpp"

namespace cytrace {

struct TrackerConfig {
    double alpha = 0.1;      // overlap threshold in the fallback branch
    int n = 4;               // neighbours for the spatial encoding
    double min_score = 0.0;  // optional gate on agreeing-argmax scores, 0 disables
};

// Which similarity scores drive the assignment. visual_only and
// spatial_only substitute one head's scores for both matrices, which makes
// the argmax agreement trivial; they exist for ablation runs.
enum class TrackMode { fusion, visual_only, spatial_only };

struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}
    double at(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }
    double& at(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
};

// Entry (i, j) = forward(head, feats_t[i], feats_prev[j]). Embeddings are
// computed once per instance, which is exactly equivalent.
Matrix score_matrix(const SiameseHead& head, const std::vector<FeatureVector>& feats_t,
                    const std::vector<FeatureVector>& feats_prev);

// IoU of instance pixel sets between two frames, rows = curr, cols = prev.
Matrix iou_matrix(const LabelMap& curr_map, const std::vector<InstanceRecord>& curr_inst,
                  const LabelMap& prev_map, const std::vector<InstanceRecord>& prev_inst);

struct MatchDecision {
    enum class Kind { continued, created, daughter };
    Kind kind = Kind::created;
    int prev_index = -1;  // column index for continued/daughter
};

// Per-target assignment: take the visual and spatial argmax over the
// previous frame (ties to the lower column); when they agree (and pass
// min_score) that cell is the candidate, otherwise fall back to the
// largest-overlap cell, discarded as a new instance when its IoU is below
// alpha. Targets sharing a candidate are a division: all become daughters.
std::vector<MatchDecision> match_frame(const Matrix& visual, const Matrix& spatial,
                                       const Matrix& overlaps, const TrackerConfig& cfg);

struct TrackingResult {
    LineageGraph graph;
    FrameSet tracked;  // input maps relabeled so pixel value = track label
};

// Frame-by-frame tracking of a whole sequence: first-frame instances open
// fresh tracks 1..k, later frames are matched with match_frame, previous
// tracks matched by nobody end.
TrackingResult track_sequence(const FrameSet& frames, const HeadPair& heads,
                              const TrackerConfig& cfg, TrackMode mode = TrackMode::fusion);

}  // namespace cytrace
