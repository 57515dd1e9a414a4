#pragma once

#include <string>
#include <utility>

#include "cytrace/lineage.hpp"

namespace cytrace {

struct SimConfig {
    int width = 128;
    int height = 128;
    int frames = 30;
    int initial_cells = 10;
    double radius_min = 4.0;   // ellipse semi-axis range, pixels
    double radius_max = 6.0;
    double motion_sigma = 0.0; // Brownian step std, pixels per frame
    double drift_x = 0.0;
    double drift_y = 0.0;
    double p_divide = 0.0;     // per cell per frame
    double p_die = 0.0;        // per cell per frame
    double arrival_rate = 0.0; // expected new cells per frame
    double noise_sigma = 0.0;  // intensity noise std
    std::uint64_t seed = 0;
};

// Per-frame event tally, for consistency checks against the graph.
// occluded counts cells removed because overdrawing left them no pixels.
struct FrameEvents {
    int divisions = 0;
    int deaths = 0;
    int arrivals = 0;
    int occluded = 0;
};

struct Simulation {
    FrameSet frames;
    LineageGraph graph;
    std::vector<FrameEvents> events;  // one entry per frame
};

// Generate a synthetic sequence: elliptical cells doing drift + Brownian
// motion with divisions, deaths and arrivals, rendered into label maps
// (higher labels overwrite on overlap, centers reflect at the borders) and
// a Gaussian-blob intensity channel. Deterministic for a fixed config.
Simulation simulate(const SimConfig& cfg);

// Built-in scenario presets, in a fixed order:
// static, drifting, brownian-dense, mitosis-heavy, churn.
std::vector<std::string> scenario_names();
SimConfig scenario(const std::string& name);
std::vector<std::pair<std::string, SimConfig>> scenario_library();

}  // namespace cytrace
