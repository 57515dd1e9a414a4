#include "cytrace/simulator.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"

using namespace cytrace;

namespace {

SimConfig quiet_config() {
    SimConfig cfg;
    cfg.width = 48;
    cfg.height = 48;
    cfg.frames = 5;
    cfg.initial_cells = 4;
    cfg.seed = 11;
    return cfg;
}

std::size_t live_nodes(const Simulation& sim, int t) {
    return sim.graph.nodes[static_cast<std::size_t>(t)].size();
}

}  // namespace

TEST_CASE("simulate: frozen dynamics repeat the first frame") {
    const SimConfig cfg = quiet_config();  // every rate and sigma is zero
    const Simulation sim = simulate(cfg);

    REQUIRE_EQ(sim.frames.frame_count(), cfg.frames);
    REQUIRE(sim.frames.has_intensity());
    for (int t = 1; t < cfg.frames; ++t) {
        CHECK(sim.frames.frames[t].labels == sim.frames.frames[0].labels);
        CHECK(sim.frames.intensity[t].values == sim.frames.intensity[0].values);
    }
    // every cell survives the whole sequence with no parents
    CHECK_EQ(sim.graph.tracks.size(), live_nodes(sim, 0));
    for (const Track& t : sim.graph.tracks) {
        CHECK_EQ(t.begin, 0);
        CHECK_EQ(t.end, cfg.frames - 1);
        CHECK_EQ(t.parent, 0u);
    }
}

TEST_CASE("simulate: certain division produces two daughters") {
    SimConfig cfg = quiet_config();
    cfg.frames = 2;
    cfg.initial_cells = 1;
    cfg.p_divide = 1.0;
    const Simulation sim = simulate(cfg);

    REQUIRE_EQ(sim.graph.tracks.size(), 3);
    const Track& mother = sim.graph.tracks[0];
    CHECK_EQ(mother.label, 1u);
    CHECK_EQ(mother.begin, 0);
    CHECK_EQ(mother.end, 0);
    for (std::size_t i = 1; i < 3; ++i) {
        CHECK_EQ(sim.graph.tracks[i].parent, 1u);
        CHECK_EQ(sim.graph.tracks[i].begin, 1);
        CHECK_EQ(sim.graph.tracks[i].end, 1);
    }
    CHECK_EQ(sim.events[1].divisions, 1);
    CHECK_EQ(live_nodes(sim, 1), 2);
}

TEST_CASE("simulate: deterministic for a fixed config") {
    SimConfig cfg = quiet_config();
    cfg.motion_sigma = 1.0;
    cfg.p_divide = 0.05;
    cfg.p_die = 0.02;
    cfg.arrival_rate = 0.5;
    cfg.noise_sigma = 0.03;
    cfg.seed = 404;
    const Simulation a = simulate(cfg);
    const Simulation b = simulate(cfg);

    REQUIRE_EQ(a.frames.frame_count(), b.frames.frame_count());
    for (int t = 0; t < a.frames.frame_count(); ++t) {
        CHECK(a.frames.frames[t].labels == b.frames.frames[t].labels);
        CHECK(a.frames.intensity[t].values == b.frames.intensity[t].values);
    }
    REQUIRE_EQ(a.graph.tracks.size(), b.graph.tracks.size());
    for (std::size_t i = 0; i < a.graph.tracks.size(); ++i) {
        CHECK_EQ(a.graph.tracks[i].label, b.graph.tracks[i].label);
        CHECK_EQ(a.graph.tracks[i].begin, b.graph.tracks[i].begin);
        CHECK_EQ(a.graph.tracks[i].end, b.graph.tracks[i].end);
        CHECK_EQ(a.graph.tracks[i].parent, b.graph.tracks[i].parent);
    }

    SimConfig other = cfg;
    other.seed = 405;
    const Simulation c = simulate(other);
    bool any_diff = c.graph.tracks.size() != a.graph.tracks.size();
    for (int t = 0; !any_diff && t < cfg.frames; ++t)
        any_diff = c.frames.frames[t].labels != a.frames.frames[t].labels;
    CHECK(any_diff);
}

TEST_CASE("simulate: population ledger balances every frame") {
    for (std::uint64_t seed : {7u, 8u, 9u}) {
        SimConfig cfg;
        cfg.width = 96;
        cfg.height = 96;
        cfg.frames = 25;
        cfg.initial_cells = 12;
        cfg.motion_sigma = 1.1;
        cfg.p_divide = 0.04;
        cfg.p_die = 0.03;
        cfg.arrival_rate = 0.6;
        cfg.seed = seed;
        const Simulation sim = simulate(cfg);
        REQUIRE_EQ(sim.events.size(), static_cast<std::size_t>(cfg.frames));

        CHECK_EQ(live_nodes(sim, 0),
                 static_cast<std::size_t>(cfg.initial_cells - sim.events[0].occluded));
        for (int t = 1; t < cfg.frames; ++t) {
            const FrameEvents& e = sim.events[static_cast<std::size_t>(t)];
            const std::int64_t expected =
                static_cast<std::int64_t>(live_nodes(sim, t - 1)) + e.divisions - e.deaths +
                e.arrivals - e.occluded;
            CHECK_EQ(static_cast<std::int64_t>(live_nodes(sim, t)), expected);
        }
        validate_lineage(sim.graph);
    }
}

TEST_CASE("simulate: graph nodes mirror the rendered maps") {
    SimConfig cfg = quiet_config();
    cfg.motion_sigma = 0.9;
    cfg.p_divide = 0.05;
    cfg.frames = 12;
    cfg.initial_cells = 7;
    cfg.seed = 21;
    const Simulation sim = simulate(cfg);

    for (int t = 0; t < cfg.frames; ++t) {
        const auto inst = extract_instances(sim.frames.frames[t], t);
        REQUIRE_EQ(inst.size(), live_nodes(sim, t));
        for (const InstanceRecord& rec : inst) {
            const auto& node_map = sim.graph.nodes[static_cast<std::size_t>(t)];
            const auto it = node_map.find(rec.label);
            REQUIRE(it != node_map.end());
            CHECK_EQ(it->second.area, rec.area);
            CHECK_EQ(it->second.cx, rec.cx);
            CHECK_EQ(it->second.cy, rec.cy);
        }
    }
}

TEST_CASE("simulate: intensity stays inside [0, 1]") {
    SimConfig cfg = quiet_config();
    cfg.noise_sigma = 0.08;
    cfg.motion_sigma = 0.5;
    const Simulation sim = simulate(cfg);
    for (const Grid& g : sim.frames.intensity)
        for (double v : g.values) {
            CHECK_GE(v, 0.0);
            CHECK_LE(v, 1.0);
        }
}

TEST_CASE("simulate: invalid configs rejected") {
    const SimConfig base = quiet_config();
    auto broken = [&](auto mutate) {
        SimConfig cfg = base;
        mutate(cfg);
        return cfg;
    };
    CHECK_THROWS_AS(simulate(broken([](SimConfig& c) { c.width = 0; })), ValidationError);
    CHECK_THROWS_AS(simulate(broken([](SimConfig& c) { c.height = -3; })), ValidationError);
    CHECK_THROWS_AS(simulate(broken([](SimConfig& c) { c.frames = 0; })), ValidationError);
    CHECK_THROWS_AS(simulate(broken([](SimConfig& c) { c.initial_cells = -1; })), ValidationError);
    CHECK_THROWS_AS(simulate(broken([](SimConfig& c) { c.radius_min = 0.0; })), ValidationError);
    CHECK_THROWS_AS(simulate(broken([](SimConfig& c) {
                        c.radius_min = 5.0;
                        c.radius_max = 4.0;
                    })),
                    ValidationError);
    CHECK_THROWS_AS(simulate(broken([](SimConfig& c) { c.p_divide = -0.1; })), ValidationError);
    CHECK_THROWS_AS(simulate(broken([](SimConfig& c) { c.p_die = 1.5; })), ValidationError);
    CHECK_THROWS_AS(simulate(broken([](SimConfig& c) { c.arrival_rate = -1.0; })),
                    ValidationError);
    CHECK_THROWS_AS(simulate(broken([](SimConfig& c) { c.motion_sigma = -0.5; })),
                    ValidationError);
    CHECK_THROWS_AS(simulate(broken([](SimConfig& c) { c.noise_sigma = -0.01; })),
                    ValidationError);
}

TEST_CASE("scenario library: names, order, lookup") {
    const std::vector<std::string> names = scenario_names();
    const std::vector<std::string> expected = {"static", "drifting", "brownian-dense",
                                               "mitosis-heavy", "churn"};
    CHECK_EQ(names, expected);

    const auto lib = scenario_library();
    REQUIRE_EQ(lib.size(), names.size());
    for (std::size_t i = 0; i < lib.size(); ++i) CHECK_EQ(lib[i].first, names[i]);

    const SimConfig st = scenario("static");
    CHECK_EQ(st.initial_cells, 8);
    CHECK_EQ(st.motion_sigma, 0.0);
    CHECK_EQ(st.p_divide, 0.0);
    CHECK_EQ(st.seed, 1u);

    const SimConfig drift = scenario("drifting");
    CHECK_EQ(drift.initial_cells, 20);
    CHECK_EQ(drift.drift_x, 1.1);
    CHECK_EQ(drift.drift_y, 0.6);

    const SimConfig mit = scenario("mitosis-heavy");
    CHECK_EQ(mit.p_divide, 0.045);

    CHECK_THROWS_AS(scenario("no-such-preset"), ValidationError);
}

TEST_CASE("scenario presets: every one simulates a valid populated scene") {
    for (const auto& [name, cfg] : scenario_library()) {
        CAPTURE(name);
        const Simulation sim = simulate(cfg);
        REQUIRE_EQ(sim.frames.frame_count(), cfg.frames);
        validate_lineage(sim.graph);
        CHECK_GT(sim.graph.tracks.size(), 0);
        std::size_t total = 0;
        for (int t = 0; t < cfg.frames; ++t) total += live_nodes(sim, t);
        CHECK_GT(total, 0);
        if (name == "brownian-dense")
            for (int t = 0; t < cfg.frames; ++t) CHECK_GE(live_nodes(sim, t), 10);
        if (name == "mitosis-heavy") {
            int parents = 0;
            for (const Track& tr : sim.graph.tracks)
                if (tr.parent != 0) ++parents;
            CHECK_GT(parents, 0);
        }
    }
}
