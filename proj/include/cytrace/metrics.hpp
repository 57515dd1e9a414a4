#pragma once

#include <cstdint>
#include <string>

#include "cytrace/lineage.hpp"

namespace cytrace {

// Cost weights for the graph edit operations.
struct OpWeights {
    double node_split = 5.0;      // NS
    double false_negative = 10.0; // FN
    double false_positive = 1.0;  // FP
    double edge_delete = 1.0;     // ED
    double edge_add = 1.5;        // EA
    double edge_change = 1.0;     // EC
};

struct OpCounts {
    std::int64_t node_split = 0;
    std::int64_t false_negative = 0;
    std::int64_t false_positive = 0;
    std::int64_t edge_delete = 0;
    std::int64_t edge_add = 0;
    std::int64_t edge_change = 0;
};

// Node matching for one frame. gt_to_res[i] is the index of the result
// instance covering the majority of gt instance i, or -1. res_cover[j]
// counts how many gt instances were matched to result instance j.
struct NodeMatch {
    std::vector<int> gt_to_res;
    std::vector<int> res_cover;
};

// A gt instance matches the result instance holding a strict majority of
// its pixels: |gt ∩ res| > 0.5 * |gt|. At most one such instance exists.
NodeMatch match_nodes(const LabelMap& gt_map, const std::vector<InstanceRecord>& gt_inst,
                      const LabelMap& res_map, const std::vector<InstanceRecord>& res_inst);

struct AogmResult {
    OpCounts ops;
    double cost = 0.0;
};

// Count the edit operations turning the result graph into the ground-truth
// graph and price them with w. node_ops_only skips the edge phase (the
// detection-only variant).
AogmResult aogm(const FrameSet& gt_frames, const LineageGraph& gt,
                const FrameSet& res_frames, const LineageGraph& res,
                const OpWeights& w, bool node_ops_only = false);

double det_score(const FrameSet& gt_frames, const LineageGraph& gt,
                 const FrameSet& res_frames, const LineageGraph& res, const OpWeights& w);

double tra_score(const FrameSet& gt_frames, const LineageGraph& gt,
                 const FrameSet& res_frames, const LineageGraph& res, const OpWeights& w);

// Mean Jaccard of gt instances against their majority match, 0 for
// unmatched gt instances, averaged over every gt instance in the sequence.
double seg_score(const FrameSet& gt_frames, const FrameSet& res_frames);

struct MetricReport {
    double seg = 0.0;
    double det = 0.0;
    double tra = 0.0;
    OpCounts ops;
    double aogm = 0.0;        // full edit cost of the result graph
    double aogm_empty = 0.0;  // cost of building the gt graph from nothing
};

MetricReport evaluate(const FrameSet& gt_frames, const LineageGraph& gt,
                      const FrameSet& res_frames, const LineageGraph& res, const OpWeights& w);

// One-line JSON with SEG/DET/TRA, the DET-TRA gap, and the op counts.
// Fixed key order and 6-decimal formatting keep it byte-stable.
std::string report_json(const MetricReport& report);

}  // namespace cytrace
