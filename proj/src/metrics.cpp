#include "cytrace/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <unordered_map>
#include <utility>

#include "cytrace/errors.hpp"

namespace cytrace {

namespace {

// |gt_i ∩ res_j| for every instance pair of one frame, rows = gt
std::vector<std::int64_t> joint_counts(const LabelMap& gt_map,
                                       const std::vector<InstanceRecord>& gt_inst,
                                       const LabelMap& res_map,
                                       const std::vector<InstanceRecord>& res_inst) {
    const int rows = static_cast<int>(gt_inst.size());
    const int cols = static_cast<int>(res_inst.size());
    std::vector<std::int64_t> counts(static_cast<std::size_t>(rows) * cols, 0);
    if (rows == 0 || cols == 0) return counts;

    std::unordered_map<Label, int> gt_idx, res_idx;
    for (int i = 0; i < rows; ++i) gt_idx[gt_inst[i].label] = i;
    for (int j = 0; j < cols; ++j) res_idx[res_inst[j].label] = j;

    for (std::size_t p = 0; p < gt_map.labels.size(); ++p) {
        const Label g = gt_map.labels[p];
        const Label r = res_map.labels[p];
        if (g == 0 || r == 0) continue;
        auto gi = gt_idx.find(g);
        auto rj = res_idx.find(r);
        if (gi == gt_idx.end() || rj == res_idx.end()) continue;
        ++counts[static_cast<std::size_t>(gi->second) * cols + rj->second];
    }
    return counts;
}

std::vector<InstanceRecord> node_list(const LineageGraph& g, int frame) {
    std::vector<InstanceRecord> out;
    out.reserve(g.nodes[frame].size());
    for (const auto& [label, rec] : g.nodes[frame]) {
        (void)label;
        out.push_back(rec);
    }
    return out;
}

void check_frames(const FrameSet& gt_frames, const FrameSet& res_frames) {
    if (gt_frames.frame_count() != res_frames.frame_count())
        throw DimensionError("metrics: sequences have different frame counts");
    for (std::size_t t = 0; t < gt_frames.frames.size(); ++t)
        if (!gt_frames.frames[t].same_shape(res_frames.frames[t]))
            throw DimensionError("metrics: frame shapes differ");
}

std::uint64_t node_key(int frame, Label label) {
    return (static_cast<std::uint64_t>(frame) << 32) | label;
}

}  // namespace

NodeMatch match_nodes(const LabelMap& gt_map, const std::vector<InstanceRecord>& gt_inst,
                      const LabelMap& res_map, const std::vector<InstanceRecord>& res_inst) {
    if (!gt_map.same_shape(res_map))
        throw DimensionError("match_nodes: frame shapes differ");

    const int rows = static_cast<int>(gt_inst.size());
    const int cols = static_cast<int>(res_inst.size());
    const std::vector<std::int64_t> counts = joint_counts(gt_map, gt_inst, res_map, res_inst);

    NodeMatch m;
    m.gt_to_res.assign(rows, -1);
    m.res_cover.assign(cols, 0);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            const std::int64_t inter = counts[static_cast<std::size_t>(i) * cols + j];
            if (2 * inter > gt_inst[i].area) {
                m.gt_to_res[i] = j;
                ++m.res_cover[j];
                break;  // a strict majority holder is unique
            }
        }
    }
    return m;
}

AogmResult aogm(const FrameSet& gt_frames, const LineageGraph& gt,
                const FrameSet& res_frames, const LineageGraph& res,
                const OpWeights& w, bool node_ops_only) {
    check_frames(gt_frames, res_frames);
    if (gt.frame_count() != static_cast<int>(gt_frames.frame_count()) ||
        res.frame_count() != static_cast<int>(res_frames.frame_count()))
        throw DimensionError("aogm: graph and frame counts differ");

    AogmResult out;
    OpCounts& ops = out.ops;

    // node label -> matched res label, per frame
    std::unordered_map<std::uint64_t, Label> mapped;

    for (std::size_t t = 0; t < gt_frames.frames.size(); ++t) {
        const std::vector<InstanceRecord> gt_inst = node_list(gt, static_cast<int>(t));
        const std::vector<InstanceRecord> res_inst = node_list(res, static_cast<int>(t));
        const NodeMatch m =
            match_nodes(gt_frames.frames[t], gt_inst, res_frames.frames[t], res_inst);

        for (std::size_t i = 0; i < gt_inst.size(); ++i) {
            if (m.gt_to_res[i] < 0) {
                ++ops.false_negative;
            } else {
                mapped[node_key(static_cast<int>(t), gt_inst[i].label)] =
                    res_inst[m.gt_to_res[i]].label;
            }
        }
        for (std::size_t j = 0; j < res_inst.size(); ++j) {
            if (m.res_cover[j] == 0)
                ++ops.false_positive;
            else if (m.res_cover[j] >= 2)
                ops.node_split += m.res_cover[j] - 1;
        }
    }

    if (!node_ops_only) {
        // res edges keyed by mapped endpoints; value = (is_parent, consumed)
        std::map<std::pair<std::uint64_t, std::uint64_t>, std::pair<bool, bool>> res_edges;
        for (const LineageEdge& e : lineage_edges(res)) {
            res_edges[{node_key(e.frame_a, e.label_a), node_key(e.frame_b, e.label_b)}] = {
                e.is_parent, false};
        }

        for (const LineageEdge& e : lineage_edges(gt)) {
            auto a = mapped.find(node_key(e.frame_a, e.label_a));
            auto b = mapped.find(node_key(e.frame_b, e.label_b));
            if (a == mapped.end() || b == mapped.end()) {
                ++ops.edge_add;
                continue;
            }
            auto it = res_edges.find(
                {node_key(e.frame_a, a->second), node_key(e.frame_b, b->second)});
            if (it == res_edges.end() || it->second.second) {
                ++ops.edge_add;
                continue;
            }
            it->second.second = true;
            if (it->second.first != e.is_parent) ++ops.edge_change;
        }

        for (const auto& [key, state] : res_edges) {
            (void)key;
            if (!state.second) ++ops.edge_delete;
        }
    }

    out.cost = w.node_split * ops.node_split + w.false_negative * ops.false_negative +
               w.false_positive * ops.false_positive + w.edge_delete * ops.edge_delete +
               w.edge_add * ops.edge_add + w.edge_change * ops.edge_change;
    return out;
}

double det_score(const FrameSet& gt_frames, const LineageGraph& gt,
                 const FrameSet& res_frames, const LineageGraph& res, const OpWeights& w) {
    const std::size_t gt_nodes = gt.node_count();
    if (gt_nodes == 0) throw ValidationError("det: ground truth has no instances");
    const double empty = w.false_negative * static_cast<double>(gt_nodes);
    const AogmResult r = aogm(gt_frames, gt, res_frames, res, w, true);
    return 1.0 - std::min(r.cost, empty) / empty;
}

double tra_score(const FrameSet& gt_frames, const LineageGraph& gt,
                 const FrameSet& res_frames, const LineageGraph& res, const OpWeights& w) {
    const std::size_t gt_nodes = gt.node_count();
    if (gt_nodes == 0) throw ValidationError("tra: ground truth has no instances");
    const double empty = w.false_negative * static_cast<double>(gt_nodes) +
                         w.edge_add * static_cast<double>(lineage_edges(gt).size());
    const AogmResult r = aogm(gt_frames, gt, res_frames, res, w, false);
    return 1.0 - std::min(r.cost, empty) / empty;
}

double seg_score(const FrameSet& gt_frames, const FrameSet& res_frames) {
    check_frames(gt_frames, res_frames);

    double sum = 0.0;
    std::int64_t total = 0;
    for (std::size_t t = 0; t < gt_frames.frames.size(); ++t) {
        const std::vector<InstanceRecord> gt_inst =
            extract_instances(gt_frames.frames[t], static_cast<int>(t));
        const std::vector<InstanceRecord> res_inst =
            extract_instances(res_frames.frames[t], static_cast<int>(t));
        const std::vector<std::int64_t> counts =
            joint_counts(gt_frames.frames[t], gt_inst, res_frames.frames[t], res_inst);

        const int cols = static_cast<int>(res_inst.size());
        for (std::size_t i = 0; i < gt_inst.size(); ++i) {
            ++total;
            for (int j = 0; j < cols; ++j) {
                const std::int64_t inter = counts[i * cols + j];
                if (2 * inter > gt_inst[i].area) {
                    const std::int64_t uni = gt_inst[i].area + res_inst[j].area - inter;
                    sum += static_cast<double>(inter) / static_cast<double>(uni);
                    break;
                }
            }
        }
    }
    if (total == 0) throw ValidationError("seg: ground truth has no instances");
    return sum / static_cast<double>(total);
}

MetricReport evaluate(const FrameSet& gt_frames, const LineageGraph& gt,
                      const FrameSet& res_frames, const LineageGraph& res, const OpWeights& w) {
    const std::size_t gt_nodes = gt.node_count();
    if (gt_nodes == 0) throw ValidationError("evaluate: ground truth has no instances");

    const AogmResult full = aogm(gt_frames, gt, res_frames, res, w, false);
    const double node_cost = w.node_split * full.ops.node_split +
                             w.false_negative * full.ops.false_negative +
                             w.false_positive * full.ops.false_positive;
    const double det_empty = w.false_negative * static_cast<double>(gt_nodes);
    const double tra_empty =
        det_empty + w.edge_add * static_cast<double>(lineage_edges(gt).size());

    MetricReport rep;
    rep.ops = full.ops;
    rep.aogm = full.cost;
    rep.aogm_empty = tra_empty;
    rep.det = 1.0 - std::min(node_cost, det_empty) / det_empty;
    rep.tra = 1.0 - std::min(full.cost, tra_empty) / tra_empty;
    rep.seg = seg_score(gt_frames, res_frames);
    return rep;
}

std::string report_json(const MetricReport& report) {
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "{\"SEG\":%.6f,\"DET\":%.6f,\"TRA\":%.6f,\"D_T\":%.6f,"
                  "\"ops\":{\"NS\":%lld,\"FN\":%lld,\"FP\":%lld,"
                  "\"ED\":%lld,\"EA\":%lld,\"EC\":%lld}}",
                  report.seg, report.det, report.tra, report.det - report.tra,
                  static_cast<long long>(report.ops.node_split),
                  static_cast<long long>(report.ops.false_negative),
                  static_cast<long long>(report.ops.false_positive),
                  static_cast<long long>(report.ops.edge_delete),
                  static_cast<long long>(report.ops.edge_add),
                  static_cast<long long>(report.ops.edge_change));
    return std::string(buf);
}

}  // namespace cytrace
