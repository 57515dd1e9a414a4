#pragma once

#include <vector>

#include "cytrace/core.hpp"
#include "cytrace/lineage.hpp"
#include "cytrace/siamese.hpp"

namespace testutil {

struct Block {
    cytrace::Label label;
    int x0, y0, x1, y1;  // inclusive rectangle
};

inline cytrace::LabelMap block_map(int w, int h, const std::vector<Block>& blocks) {
    cytrace::LabelMap map(w, h);
    for (const Block& b : blocks)
        for (int y = b.y0; y <= b.y1; ++y)
            for (int x = b.x0; x <= b.x1; ++x) map.at(x, y) = b.label;
    return map;
}

inline cytrace::FrameSet make_frames(std::vector<cytrace::LabelMap> maps) {
    cytrace::FrameSet fs;
    fs.frames = std::move(maps);
    return fs;
}

// 10x10, 3 frames: track 1 lives in frame 0 and divides into tracks 2 and 3
// which persist through frames 1-2.
inline cytrace::FrameSet mitosis_frames() {
    return make_frames({
        block_map(10, 10, {{1, 3, 3, 5, 5}}),
        block_map(10, 10, {{2, 1, 1, 3, 3}, {3, 5, 5, 7, 7}}),
        block_map(10, 10, {{2, 1, 2, 3, 4}, {3, 5, 6, 7, 8}}),
    });
}

inline std::vector<cytrace::Track> mitosis_tracks() {
    return {{1, 0, 0, 0}, {2, 1, 2, 1}, {3, 1, 2, 1}};
}

// score = sigmoid(margin - scale * L1(x, y)): a hand-built head that ranks
// pairs by feature similarity, so tracking tests need no training. Row k
// picks out +x[k], row dim+k picks out -x[k]; relu splits the sign, and
// |a+ - b+| + |a- - b-| = |a - b| recovers the L1 distance exactly.
inline cytrace::SiameseHead l1_head(int input_dim, double scale, double margin) {
    using namespace cytrace;
    SiameseHead head;
    head.input_dim = input_dim;
    head.w1.assign(static_cast<std::size_t>(kEmbedDim) * input_dim, 0.0);
    head.b1.assign(kEmbedDim, 0.0);
    head.w2.assign(kEmbedDim, 0.0);
    head.b2 = margin;
    for (int k = 0; k < input_dim; ++k) {
        head.w1[static_cast<std::size_t>(k) * input_dim + k] = scale;
        head.w1[static_cast<std::size_t>(input_dim + k) * input_dim + k] = -scale;
        head.w2[static_cast<std::size_t>(k)] = -1.0;
        head.w2[static_cast<std::size_t>(input_dim + k)] = -1.0;
    }
    return head;
}

}  // namespace testutil
