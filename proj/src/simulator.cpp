#include "cytrace/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "cytrace/errors.hpp"
#include "cytrace/rng.hpp"

namespace cytrace {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Cell {
    Label label = 0;
    double cx = 0, cy = 0;
    double rx = 1, ry = 1;
    double bright = 0.5;
};

// Brightness follows cell size, so visually similar scenarios fall out of
// a tight radius range without a separate knob.
double brightness_for(double rx, double ry) {
    return std::clamp(0.25 + 0.1 * 0.5 * (rx + ry), 0.3, 0.95);
}

// fold v into [0, hi] by reflection at both ends
double reflect_into(double v, double hi) {
    if (hi <= 0.0) return 0.0;
    const double period = 2.0 * hi;
    double x = std::fmod(v, period);
    if (x < 0.0) x += period;
    return x <= hi ? x : period - x;
}

// uniform center position keeping the ellipse inside where possible
double place_center(Rng& rng, int extent, double r) {
    const double hi = static_cast<double>(extent - 1);
    if (2.0 * r < hi) return rng.uniform(r, hi - r);
    return rng.uniform(0.0, hi);
}

void render_cell(LabelMap& map, const Cell& c) {
    const int x0 = std::max(0, static_cast<int>(std::ceil(c.cx - c.rx)));
    const int x1 = std::min(map.width - 1, static_cast<int>(std::floor(c.cx + c.rx)));
    const int y0 = std::max(0, static_cast<int>(std::ceil(c.cy - c.ry)));
    const int y1 = std::min(map.height - 1, static_cast<int>(std::floor(c.cy + c.ry)));
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            const double dx = (x - c.cx) / c.rx;
            const double dy = (y - c.cy) / c.ry;
            if (dx * dx + dy * dy <= 1.0) map.at(x, y) = c.label;
        }
    }
}

void render_intensity(Grid& img, const std::vector<Cell>& cells, double noise_sigma, Rng& rng) {
    std::fill(img.values.begin(), img.values.end(), 0.0);
    for (const Cell& c : cells) {
        const double sx = c.rx / 1.5;
        const double sy = c.ry / 1.5;
        const int x0 = std::max(0, static_cast<int>(std::floor(c.cx - 3.0 * sx)));
        const int x1 = std::min(img.width - 1, static_cast<int>(std::ceil(c.cx + 3.0 * sx)));
        const int y0 = std::max(0, static_cast<int>(std::floor(c.cy - 3.0 * sy)));
        const int y1 = std::min(img.height - 1, static_cast<int>(std::ceil(c.cy + 3.0 * sy)));
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                const double dx = (x - c.cx) / sx;
                const double dy = (y - c.cy) / sy;
                img.at(x, y) += c.bright * std::exp(-0.5 * (dx * dx + dy * dy));
            }
        }
    }
    if (noise_sigma > 0.0)
        for (double& v : img.values) v += noise_sigma * rng.normal();
    for (double& v : img.values) v = std::clamp(v, 0.0, 1.0);
}

void check_config(const SimConfig& cfg) {
    if (cfg.width < 1 || cfg.height < 1)
        throw ValidationError("simulate: zero-area image");
    if (cfg.frames < 1)
        throw ValidationError("simulate: frames must be >= 1");
    if (cfg.initial_cells < 0)
        throw ValidationError("simulate: initial_cells must be >= 0");
    if (!(cfg.radius_min > 0.0) || cfg.radius_min > cfg.radius_max)
        throw ValidationError("simulate: invalid radius_range");
    if (cfg.p_divide < 0.0 || cfg.p_divide > 1.0 || cfg.p_die < 0.0 || cfg.p_die > 1.0)
        throw ValidationError("simulate: probabilities must be in [0, 1]");
    if (cfg.motion_sigma < 0.0 || cfg.noise_sigma < 0.0 || cfg.arrival_rate < 0.0)
        throw ValidationError("simulate: negative rate");
}

}  // namespace

Simulation simulate(const SimConfig& cfg) {
    check_config(cfg);
    Rng rng(cfg.seed);

    Simulation sim;
    sim.events.resize(cfg.frames);
    sim.graph.nodes.resize(cfg.frames);

    std::vector<Cell> alive;                        // ascending label
    std::vector<std::optional<Track>> all_tracks;   // index = label - 1
    Label next_label = 1;

    auto spawn = [&](int frame, double cx, double cy, double rx, double ry, Label parent) {
        Cell c;
        c.label = next_label++;
        c.cx = cx;
        c.cy = cy;
        c.rx = rx;
        c.ry = ry;
        c.bright = brightness_for(rx, ry);
        all_tracks.push_back(Track{c.label, frame, frame, parent});
        return c;
    };

    auto spawn_random = [&](int frame) {
        const double rx = rng.uniform(cfg.radius_min, cfg.radius_max);
        const double ry = rng.uniform(cfg.radius_min, cfg.radius_max);
        const double cx = place_center(rng, cfg.width, rx);
        const double cy = place_center(rng, cfg.height, ry);
        return spawn(frame, cx, cy, rx, ry, 0);
    };

    for (int i = 0; i < cfg.initial_cells; ++i) alive.push_back(spawn_random(0));

    for (int t = 0; t < cfg.frames; ++t) {
        if (t > 0) {
            std::vector<Cell> survivors, born;
            survivors.reserve(alive.size());
            for (Cell& c : alive) {
                const double u_die = rng.uniform();
                const double u_div = rng.uniform();
                if (u_die < cfg.p_die) {
                    ++sim.events[t].deaths;
                    continue;
                }
                if (u_div < cfg.p_divide) {
                    ++sim.events[t].divisions;
                    const double theta = rng.uniform(0.0, 2.0 * kPi);
                    const double off = 0.9 * std::max(c.rx, c.ry);
                    const double ux = std::cos(theta), uy = std::sin(theta);
                    for (int d = 0; d < 2; ++d) {
                        const double s = d == 0 ? 1.0 : -1.0;
                        const double rx = c.rx * rng.uniform(0.75, 0.95);
                        const double ry = c.ry * rng.uniform(0.75, 0.95);
                        const double cx = reflect_into(c.cx + s * off * ux, cfg.width - 1.0);
                        const double cy = reflect_into(c.cy + s * off * uy, cfg.height - 1.0);
                        born.push_back(spawn(t, cx, cy, rx, ry, c.label));
                    }
                    continue;
                }
                c.cx = reflect_into(c.cx + cfg.drift_x + cfg.motion_sigma * rng.normal(),
                                    cfg.width - 1.0);
                c.cy = reflect_into(c.cy + cfg.drift_y + cfg.motion_sigma * rng.normal(),
                                    cfg.height - 1.0);
                survivors.push_back(c);
            }
            if (cfg.arrival_rate > 0.0) {
                const int trials = static_cast<int>(std::ceil(cfg.arrival_rate));
                const double p = cfg.arrival_rate / trials;
                for (int k = 0; k < trials; ++k) {
                    if (rng.uniform() < p) {
                        born.push_back(spawn_random(t));
                        ++sim.events[t].arrivals;
                    }
                }
            }
            alive = std::move(survivors);
            alive.insert(alive.end(), born.begin(), born.end());
        }

        LabelMap map;
        map.width = cfg.width;
        map.height = cfg.height;
        map.labels.assign(static_cast<std::size_t>(cfg.width) * cfg.height, 0);
        for (const Cell& c : alive) render_cell(map, c);

        // overdrawn cells keep no pixels: drop them, truncating their track
        std::vector<std::int64_t> px(next_label, 0);
        for (Label v : map.labels)
            if (v != 0) ++px[v];
        std::vector<Cell> kept;
        kept.reserve(alive.size());
        for (const Cell& c : alive) {
            if (px[c.label] == 0) {
                ++sim.events[t].occluded;
                if (all_tracks[c.label - 1]->begin == t)
                    all_tracks[c.label - 1].reset();
                continue;
            }
            all_tracks[c.label - 1]->end = t;
            kept.push_back(c);
        }
        alive = std::move(kept);

        for (const InstanceRecord& rec : extract_instances(map, t))
            sim.graph.nodes[t].emplace(rec.label, rec);

        Grid img;
        img.width = cfg.width;
        img.height = cfg.height;
        img.values.resize(map.labels.size());
        render_intensity(img, alive, cfg.noise_sigma, rng);

        sim.frames.frames.push_back(std::move(map));
        sim.frames.intensity.push_back(std::move(img));
    }

    for (const std::optional<Track>& tr : all_tracks) {
        if (!tr) continue;
        // a dropped daughter may orphan its sibling's parent link target;
        // parents are only recorded if their own track survived
        sim.graph.tracks.push_back(*tr);
    }
    for (Track& tr : sim.graph.tracks) {
        if (tr.parent != 0 && !sim.graph.find_track(tr.parent)) tr.parent = 0;
    }

    validate_lineage(sim.graph);
    return sim;
}

std::vector<std::pair<std::string, SimConfig>> scenario_library() {
    std::vector<std::pair<std::string, SimConfig>> lib;

    SimConfig s;  // static: frozen scene
    s.initial_cells = 8;
    s.radius_min = 4.0;
    s.radius_max = 7.0;
    s.seed = 1;
    lib.emplace_back("static", s);

    SimConfig d;  // pure drift, the end-to-end tracking benchmark
    d.initial_cells = 20;
    d.radius_min = 4.0;
    d.radius_max = 6.0;
    d.drift_x = 1.1;
    d.drift_y = 0.6;
    d.noise_sigma = 0.02;
    d.seed = 2;
    lib.emplace_back("drifting", d);

    SimConfig b;  // many near-identical cells in Brownian motion
    b.initial_cells = 16;
    b.radius_min = 3.9;
    b.radius_max = 4.4;
    b.motion_sigma = 1.3;
    b.noise_sigma = 0.03;
    b.seed = 3;
    lib.emplace_back("brownian-dense", b);

    SimConfig m;  // frequent divisions
    m.initial_cells = 6;
    m.radius_min = 4.0;
    m.radius_max = 6.0;
    m.motion_sigma = 0.7;
    m.p_divide = 0.045;
    m.noise_sigma = 0.02;
    m.seed = 4;
    lib.emplace_back("mitosis-heavy", m);

    SimConfig c;  // arrivals and deaths
    c.initial_cells = 10;
    c.radius_min = 4.0;
    c.radius_max = 6.5;
    c.motion_sigma = 0.9;
    c.p_die = 0.03;
    c.arrival_rate = 0.4;
    c.noise_sigma = 0.02;
    c.seed = 5;
    lib.emplace_back("churn", c);

    return lib;
}

std::vector<std::string> scenario_names() {
    std::vector<std::string> names;
    for (const auto& [name, cfg] : scenario_library()) {
        (void)cfg;
        names.push_back(name);
    }
    return names;
}

SimConfig scenario(const std::string& name) {
    for (const auto& [preset, cfg] : scenario_library())
        if (preset == name) return cfg;
    throw ValidationError("unknown preset: " + name);
}

}  // namespace cytrace
