#pragma once

#include <map>
#include <vector>

#include "cytrace/core.hpp"

namespace cytrace {

// One cell identity over a contiguous frame interval [begin, end].
// parent == 0 means the track starts a lineage; otherwise the parent track
// ends exactly one frame before this one begins (a division).
struct Track {
    Label label = 0;
    int begin = 0;
    int end = 0;
    Label parent = 0;
};

// Lineage DAG: per-frame detections plus division links between tracks.
struct LineageGraph {
    std::vector<Track> tracks;                           // sorted by label ascending
    std::vector<std::map<Label, InstanceRecord>> nodes;  // per frame: track label -> instance

    int frame_count() const { return static_cast<int>(nodes.size()); }
    const Track* find_track(Label label) const;
    std::size_t node_count() const;
};

// Directed edge between per-frame nodes. is_parent marks a division link;
// otherwise the edge joins the same track across consecutive frames.
struct LineageEdge {
    int frame_a = 0;
    Label label_a = 0;
    int frame_b = 0;
    Label label_b = 0;
    bool is_parent = false;
};

std::vector<LineageEdge> lineage_edges(const LineageGraph& graph);

// Throws ValidationError when any graph invariant is broken: duplicate or
// zero labels, begin > end, self/unknown parent, parent end != begin - 1,
// or node occupancy that disagrees with the track intervals.
void validate_lineage(const LineageGraph& graph);

// Builds the per-frame node table from the instance maps, checks that the
// labels present in each frame are exactly the tracks active there, and
// validates the assembled graph.
LineageGraph build_lineage(const FrameSet& frames, const std::vector<Track>& tracks);

}  // namespace cytrace
