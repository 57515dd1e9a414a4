#include "cytrace/tracker.hpp"

#include <algorithm>
#include <cstdio>
#include <unordered_map>

#include "cytrace/errors.hpp"
#include "cytrace/features.hpp"

namespace cytrace {

namespace {

// argmax over a row, ties resolved to the lowest column index
int row_argmax(const Matrix& m, int row) {
    int best = 0;
    double best_val = m.at(row, 0);
    for (int j = 1; j < m.cols; ++j) {
        if (m.at(row, j) > best_val) {
            best_val = m.at(row, j);
            best = j;
        }
    }
    return best;
}

}  // namespace

Matrix score_matrix(const SiameseHead& head, const std::vector<FeatureVector>& feats_t,
                    const std::vector<FeatureVector>& feats_prev) {
    const int rows = static_cast<int>(feats_t.size());
    const int cols = static_cast<int>(feats_prev.size());
    std::vector<std::vector<double>> emb_t(rows, std::vector<double>(kEmbedDim));
    std::vector<std::vector<double>> emb_prev(cols, std::vector<double>(kEmbedDim));
    for (int i = 0; i < rows; ++i) embed(head, feats_t[i].values, emb_t[i].data());
    for (int j = 0; j < cols; ++j) embed(head, feats_prev[j].values, emb_prev[j].data());

    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            m.at(i, j) = score_from_embeddings(head, emb_t[i], emb_prev[j]);
    return m;
}

Matrix iou_matrix(const LabelMap& curr_map, const std::vector<InstanceRecord>& curr_inst,
                  const LabelMap& prev_map, const std::vector<InstanceRecord>& prev_inst) {
    if (!curr_map.same_shape(prev_map))
        throw DimensionError("iou_matrix: frame shapes differ");

    const int rows = static_cast<int>(curr_inst.size());
    const int cols = static_cast<int>(prev_inst.size());
    Matrix m(rows, cols);
    if (rows == 0 || cols == 0) return m;

    std::unordered_map<Label, int> curr_idx, prev_idx;
    curr_idx.reserve(curr_inst.size());
    prev_idx.reserve(prev_inst.size());
    for (int i = 0; i < rows; ++i) curr_idx[curr_inst[i].label] = i;
    for (int j = 0; j < cols; ++j) prev_idx[prev_inst[j].label] = j;

    std::vector<std::int64_t> inter(static_cast<std::size_t>(rows) * cols, 0);
    const std::size_t total = curr_map.labels.size();
    for (std::size_t p = 0; p < total; ++p) {
        const Label c = curr_map.labels[p];
        const Label q = prev_map.labels[p];
        if (c == 0 || q == 0) continue;
        auto ci = curr_idx.find(c);
        auto pi = prev_idx.find(q);
        if (ci == curr_idx.end() || pi == prev_idx.end()) continue;
        ++inter[static_cast<std::size_t>(ci->second) * cols + pi->second];
    }

    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            const std::int64_t ov = inter[static_cast<std::size_t>(i) * cols + j];
            if (ov == 0) continue;
            const std::int64_t uni = curr_inst[i].area + prev_inst[j].area - ov;
            m.at(i, j) = static_cast<double>(ov) / static_cast<double>(uni);
        }
    }
    return m;
}

std::vector<MatchDecision> match_frame(const Matrix& visual, const Matrix& spatial,
                                       const Matrix& overlaps, const TrackerConfig& cfg) {
    if (visual.rows != spatial.rows || visual.cols != spatial.cols ||
        visual.rows != overlaps.rows || visual.cols != overlaps.cols)
        throw DimensionError("match_frame: matrix shapes differ");
    if (cfg.alpha < 0.0 || cfg.alpha > 1.0)
        throw ValidationError("match_frame: alpha must be in [0, 1]");

    const int targets = visual.rows;
    const int prev = visual.cols;
    std::vector<int> candidate(targets, -1);

    for (int i = 0; i < targets; ++i) {
        if (prev == 0) continue;
        const int jv = row_argmax(visual, i);
        const int js = row_argmax(spatial, i);
        if (jv == js && visual.at(i, jv) >= cfg.min_score) {
            candidate[i] = jv;
        } else {
            const int jo = row_argmax(overlaps, i);
            if (overlaps.at(i, jo) >= cfg.alpha && overlaps.at(i, jo) > 0.0)
                candidate[i] = jo;
        }
    }

    std::vector<int> claims(prev, 0);
    for (int i = 0; i < targets; ++i)
        if (candidate[i] >= 0) ++claims[candidate[i]];

    std::vector<MatchDecision> out(targets);
    for (int i = 0; i < targets; ++i) {
        if (candidate[i] < 0) {
            out[i] = {MatchDecision::Kind::created, -1};
        } else if (claims[candidate[i]] == 1) {
            out[i] = {MatchDecision::Kind::continued, candidate[i]};
        } else {
            out[i] = {MatchDecision::Kind::daughter, candidate[i]};
        }
    }
    return out;
}

TrackingResult track_sequence(const FrameSet& frames, const HeadPair& heads,
                              const TrackerConfig& cfg, TrackMode mode) {
    if (frames.frames.empty())
        throw ValidationError("track_sequence: empty sequence");
    if (heads.visual.input_dim != kVisualDim)
        throw ValidationError("track_sequence: visual head input_dim mismatch");
    if (heads.spatial.input_dim != 2 * cfg.n)
        throw ValidationError("track_sequence: spatial head expects dimension 2n");

    const SequenceFeatures feats = compute_sequence_features(frames, cfg.n);
    const int frame_count = static_cast<int>(frames.frames.size());

    TrackingResult result;
    result.graph.nodes.resize(frame_count);
    std::vector<Track>& tracks = result.graph.tracks;
    std::unordered_map<Label, std::size_t> track_index;
    Label next_label = 1;

    auto open_track = [&](int frame, Label parent) {
        const Label lab = next_label++;
        track_index[lab] = tracks.size();
        tracks.push_back(Track{lab, frame, frame, parent});
        return lab;
    };

    // track label assigned to each instance, per frame, in instance order
    std::vector<std::vector<Label>> assigned(frame_count);
    for (const InstanceRecord& rec : feats.instances[0]) {
        const Label lab = open_track(0, 0);
        InstanceRecord node = rec;
        node.label = lab;
        result.graph.nodes[0].emplace(lab, node);
        assigned[0].push_back(lab);
    }

    for (int t = 1; t < frame_count; ++t) {
        const std::vector<InstanceRecord>& curr = feats.instances[t];
        const std::vector<InstanceRecord>& prev = feats.instances[t - 1];

        Matrix vis, spa;
        switch (mode) {
            case TrackMode::fusion:
                vis = score_matrix(heads.visual, feats.visual[t], feats.visual[t - 1]);
                spa = score_matrix(heads.spatial, feats.spatial[t], feats.spatial[t - 1]);
                break;
            case TrackMode::visual_only:
                vis = score_matrix(heads.visual, feats.visual[t], feats.visual[t - 1]);
                spa = vis;
                break;
            case TrackMode::spatial_only:
                spa = score_matrix(heads.spatial, feats.spatial[t], feats.spatial[t - 1]);
                vis = spa;
                break;
        }
        const Matrix ious = iou_matrix(frames.frames[t], curr, frames.frames[t - 1], prev);
        const std::vector<MatchDecision> decisions = match_frame(vis, spa, ious, cfg);

        const std::vector<Label>& prev_assigned = assigned[t - 1];
        std::vector<int> claims(prev.size(), 0);
        for (const MatchDecision& d : decisions)
            if (d.prev_index >= 0) ++claims[d.prev_index];
        for (std::size_t j = 0; j < claims.size(); ++j) {
            if (claims[j] >= 3) {
                std::fprintf(stderr,
                             "warning: frame %d: %d instances assigned to track %u, "
                             "keeping all as daughters\n",
                             t, claims[j], prev_assigned[j]);
            }
        }

        assigned[t].resize(curr.size(), 0);
        for (std::size_t i = 0; i < curr.size(); ++i) {
            const MatchDecision& d = decisions[i];
            Label lab = 0;
            switch (d.kind) {
                case MatchDecision::Kind::continued: {
                    lab = prev_assigned[d.prev_index];
                    tracks[track_index[lab]].end = t;
                    break;
                }
                case MatchDecision::Kind::created:
                    lab = open_track(t, 0);
                    break;
                case MatchDecision::Kind::daughter:
                    lab = open_track(t, prev_assigned[d.prev_index]);
                    break;
            }
            InstanceRecord node = curr[i];
            node.label = lab;
            result.graph.nodes[t].emplace(lab, node);
            assigned[t][i] = lab;
        }
    }

    // relabel the maps so pixel values carry track labels
    result.tracked.frames.reserve(frame_count);
    for (int t = 0; t < frame_count; ++t) {
        const LabelMap& src = frames.frames[t];
        std::unordered_map<Label, Label> remap;
        remap.reserve(feats.instances[t].size());
        for (std::size_t i = 0; i < feats.instances[t].size(); ++i)
            remap[feats.instances[t][i].label] = assigned[t][i];
        LabelMap dst;
        dst.width = src.width;
        dst.height = src.height;
        dst.labels.resize(src.labels.size());
        for (std::size_t p = 0; p < src.labels.size(); ++p)
            dst.labels[p] = src.labels[p] == 0 ? 0 : remap.at(src.labels[p]);
        result.tracked.frames.push_back(std::move(dst));
    }
    result.tracked.intensity = frames.intensity;

    validate_lineage(result.graph);
    return result;
}

}  // namespace cytrace
