#include "cytrace/lineage.hpp"

#include <algorithm>
#include <string>

namespace cytrace {

const Track* LineageGraph::find_track(Label label) const {
    auto it = std::lower_bound(tracks.begin(), tracks.end(), label,
                               [](const Track& t, Label l) { return t.label < l; });
    if (it == tracks.end() || it->label != label) return nullptr;
    return &*it;
}

std::size_t LineageGraph::node_count() const {
    std::size_t count = 0;
    for (const auto& frame : nodes) count += frame.size();
    return count;
}

std::vector<LineageEdge> lineage_edges(const LineageGraph& graph) {
    std::vector<LineageEdge> edges;
    for (const Track& t : graph.tracks) {
        for (int f = t.begin; f < t.end; ++f) {
            edges.push_back({f, t.label, f + 1, t.label, false});
        }
        if (t.parent != 0) {
            const Track* parent = graph.find_track(t.parent);
            if (parent != nullptr) {
                edges.push_back({parent->end, parent->label, t.begin, t.label, true});
            }
        }
    }
    return edges;
}

void validate_lineage(const LineageGraph& graph) {
    const int frames = graph.frame_count();
    Label prev_label = 0;
    for (const Track& t : graph.tracks) {
        if (t.label == 0) throw ValidationError("lineage: track label 0 is reserved for background");
        if (t.label <= prev_label) {
            throw ValidationError("lineage: track labels not strictly ascending at label " +
                                  std::to_string(t.label));
        }
        prev_label = t.label;
        if (t.begin > t.end) {
            throw ValidationError("lineage: track " + std::to_string(t.label) + " has begin > end");
        }
        if (t.begin < 0 || t.end >= frames) {
            throw ValidationError("lineage: track " + std::to_string(t.label) +
                                  " spans frames outside the sequence");
        }
        if (t.parent == t.label) {
            throw ValidationError("lineage: track " + std::to_string(t.label) + " is its own parent");
        }
        if (t.parent != 0) {
            const Track* parent = graph.find_track(t.parent);
            if (parent == nullptr) {
                throw ValidationError("lineage: track " + std::to_string(t.label) +
                                      " references unknown parent " + std::to_string(t.parent));
            }
            // parent interval strictly precedes the child's, so parent chains
            // cannot form cycles once this holds for every track
            if (parent->end != t.begin - 1) {
                throw ValidationError("lineage: track " + std::to_string(t.label) +
                                      " begins at frame " + std::to_string(t.begin) +
                                      " but parent " + std::to_string(t.parent) + " ends at frame " +
                                      std::to_string(parent->end));
            }
        }
    }

    // occupancy: each track occupies exactly [begin, end], nothing else
    std::size_t expected_nodes = 0;
    for (const Track& t : graph.tracks) {
        for (int f = t.begin; f <= t.end; ++f) {
            auto it = graph.nodes[static_cast<std::size_t>(f)].find(t.label);
            if (it == graph.nodes[static_cast<std::size_t>(f)].end()) {
                throw ValidationError("lineage: track " + std::to_string(t.label) +
                                      " missing a node at frame " + std::to_string(f));
            }
            ++expected_nodes;
        }
    }
    if (expected_nodes != graph.node_count()) {
        throw ValidationError("lineage: node table holds entries outside any track interval");
    }
    for (int f = 0; f < frames; ++f) {
        for (const auto& [label, rec] : graph.nodes[static_cast<std::size_t>(f)]) {
            const Track* t = graph.find_track(label);
            if (t == nullptr) {
                throw ValidationError("lineage: frame " + std::to_string(f) + " holds node " +
                                      std::to_string(label) + " with no track");
            }
            (void)rec;
        }
    }
}

LineageGraph build_lineage(const FrameSet& frames, const std::vector<Track>& tracks) {
    LineageGraph graph;
    graph.tracks = tracks;
    std::sort(graph.tracks.begin(), graph.tracks.end(),
              [](const Track& a, const Track& b) { return a.label < b.label; });
    graph.nodes.resize(frames.frames.size());

    for (int f = 0; f < frames.frame_count(); ++f) {
        auto instances = extract_instances(frames.frames[static_cast<std::size_t>(f)], f);
        for (const InstanceRecord& rec : instances) {
            graph.nodes[static_cast<std::size_t>(f)].emplace(rec.label, rec);
        }
    }

    // every labeled pixel region must belong to a track active in its frame
    for (int f = 0; f < frames.frame_count(); ++f) {
        for (const auto& [label, rec] : graph.nodes[static_cast<std::size_t>(f)]) {
            const Track* t = graph.find_track(label);
            if (t == nullptr) {
                throw ValidationError("lineage: frame " + std::to_string(f) + " contains label " +
                                      std::to_string(label) + " absent from the track table");
            }
            if (f < t->begin || f > t->end) {
                throw ValidationError("lineage: label " + std::to_string(label) +
                                      " appears at frame " + std::to_string(f) +
                                      " outside its track interval");
            }
            (void)rec;
        }
    }

    validate_lineage(graph);
    return graph;
}

}  // namespace cytrace
