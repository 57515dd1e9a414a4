#include "cytrace/core.hpp"

#include <algorithm>
#include <cstdint>
#include <vector>

#include "cytrace/rng.hpp"
#include "doctest.h"

using namespace cytrace;

namespace {

LabelMap random_map(int w, int h, int max_label, Rng& rng) {
    LabelMap map(w, h);
    for (Label& v : map.labels) v = static_cast<Label>(rng.below(static_cast<std::uint64_t>(max_label) + 1));
    return map;
}

}  // namespace

TEST_CASE("extract_instances: empty map yields no records") {
    LabelMap map(4, 4);
    CHECK(extract_instances(map, 0).empty());
}

TEST_CASE("extract_instances: uniform 2x2 block") {
    LabelMap map(2, 2);
    std::fill(map.labels.begin(), map.labels.end(), 7u);
    const auto recs = extract_instances(map, 3);
    REQUIRE_EQ(recs.size(), 1);
    CHECK_EQ(recs[0].label, 7);
    CHECK_EQ(recs[0].frame, 3);
    CHECK_EQ(recs[0].cx, 0.5);
    CHECK_EQ(recs[0].cy, 0.5);
    CHECK_EQ(recs[0].area, 4);
    CHECK_EQ(recs[0].x_min, 0);
    CHECK_EQ(recs[0].y_min, 0);
    CHECK_EQ(recs[0].x_max, 1);
    CHECK_EQ(recs[0].y_max, 1);
}

TEST_CASE("extract_instances: areas sum to the nonzero pixel count") {
    Rng rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        const LabelMap map = random_map(16, 16, 3, rng);
        std::int64_t nonzero = 0;
        for (Label v : map.labels)
            if (v != 0) ++nonzero;

        const auto recs = extract_instances(map, 0);
        std::int64_t total = 0;
        for (const auto& r : recs) total += r.area;
        CHECK_EQ(total, nonzero);

        for (std::size_t i = 1; i < recs.size(); ++i) CHECK_LT(recs[i - 1].label, recs[i].label);
        for (const auto& r : recs) {
            CHECK_GE(r.cx, r.x_min);
            CHECK_LE(r.cx, r.x_max);
            CHECK_GE(r.cy, r.y_min);
            CHECK_LE(r.cy, r.y_max);
        }
    }
}

TEST_CASE("extract_instances: non-contiguous labels and disconnected pixels") {
    LabelMap map(5, 5);
    map.at(0, 0) = 900;
    map.at(4, 4) = 900;  // same instance, two far corners
    map.at(2, 2) = 5;
    const auto recs = extract_instances(map, 0);
    REQUIRE_EQ(recs.size(), 2);
    CHECK_EQ(recs[0].label, 5);
    CHECK_EQ(recs[1].label, 900);
    CHECK_EQ(recs[1].area, 2);
    CHECK_EQ(recs[1].cx, 2.0);
    CHECK_EQ(recs[1].cy, 2.0);
    CHECK_EQ(recs[1].x_min, 0);
    CHECK_EQ(recs[1].x_max, 4);
}

TEST_CASE("overlap_pixels: identical, disjoint, shifted blocks") {
    LabelMap a(6, 4), b(6, 4);
    // 2x2 block at columns 0-1 vs 2x2 block at columns 1-2, same rows
    for (int y = 1; y <= 2; ++y) {
        a.at(0, y) = 1;
        a.at(1, y) = 1;
        b.at(1, y) = 2;
        b.at(2, y) = 2;
    }
    const PixelSet pa = instance_pixels(a, 1);
    const PixelSet pb = instance_pixels(b, 2);

    CHECK_EQ(overlap_pixels(pa, pa), 4);
    CHECK_EQ(overlap_pixels(pa, pb), 2);
    CHECK_EQ(overlap_pixels(pb, pa), 2);

    LabelMap c(6, 4);
    c.at(5, 0) = 3;
    const PixelSet pc = instance_pixels(c, 3);
    CHECK_EQ(overlap_pixels(pa, pc), 0);
}

TEST_CASE("overlap_pixels: shape mismatch is an error") {
    LabelMap a(4, 4), b(5, 4);
    a.at(0, 0) = 1;
    b.at(0, 0) = 1;
    const PixelSet pa = instance_pixels(a, 1);
    const PixelSet pb = instance_pixels(b, 1);
    CHECK_THROWS_AS(overlap_pixels(pa, pb), DimensionError);
    CHECK_THROWS_AS(iou(pa, pb), DimensionError);
}

TEST_CASE("iou: identity, disjoint, one-column shift") {
    LabelMap a(6, 4), b(6, 4), c(6, 4);
    for (int y = 1; y <= 2; ++y) {
        a.at(0, y) = 1;
        a.at(1, y) = 1;
        b.at(1, y) = 2;
        b.at(2, y) = 2;
    }
    c.at(5, 3) = 9;
    const PixelSet pa = instance_pixels(a, 1);
    const PixelSet pb = instance_pixels(b, 2);
    const PixelSet pc = instance_pixels(c, 9);

    CHECK_EQ(iou(pa, pa), 1.0);
    CHECK_EQ(iou(pa, pc), 0.0);
    CHECK_EQ(iou(pa, pb), doctest::Approx(2.0 / 6.0).epsilon(1e-12));
    CHECK_EQ(jaccard_to_matched(pa, pb), iou(pa, pb));
}

TEST_CASE("iou: symmetry and area-ratio bound on random instances") {
    Rng rng(33);
    for (int trial = 0; trial < 20; ++trial) {
        const LabelMap ma = random_map(12, 12, 2, rng);
        const LabelMap mb = random_map(12, 12, 2, rng);
        const auto ra = extract_instances(ma, 0);
        const auto rb = extract_instances(mb, 0);
        if (ra.empty() || rb.empty()) continue;
        for (const auto& ia : ra) {
            const PixelSet pa = instance_pixels(ma, ia.label);
            CHECK_EQ(iou(pa, pa), 1.0);
            for (const auto& ib : rb) {
                const PixelSet pb = instance_pixels(mb, ib.label);
                CHECK_EQ(overlap_pixels(pa, pb), overlap_pixels(pb, pa));
                CHECK_EQ(iou(pa, pb), iou(pb, pa));
                const double lo = static_cast<double>(std::min(ia.area, ib.area));
                const double hi = static_cast<double>(std::max(ia.area, ib.area));
                CHECK_LE(iou(pa, pb), lo / hi + 1e-12);
            }
        }
    }
}
