#pragma once

#include <filesystem>

#include "cytrace/lineage.hpp"
#include "cytrace/metrics.hpp"
#include "cytrace/siamese.hpp"
#include "cytrace/simulator.hpp"

namespace cytrace {

// 16-bit binary PGM, big-endian samples, pixel value = label (0 background).
void write_labelmap(const std::filesystem::path& path, const LabelMap& map);
LabelMap read_labelmap(const std::filesystem::path& path);

// Intensity channel in the same 16-bit PGM container, values mapped
// linearly between 0.0 and 1.0.
void write_intensity(const std::filesystem::path& path, const Grid& img);
Grid read_intensity(const std::filesystem::path& path);

// Plain-text track table, one "L B E P" line per track, sorted by label.
void write_tracktable(const std::filesystem::path& path, const std::vector<Track>& tracks);
std::vector<Track> read_tracktable(const std::filesystem::path& path);

// Trained head pair plus training and encoding configuration, as a single
// JSON document with exact double round-tripping.
void write_model(const std::filesystem::path& path, const TrackModel& model);
TrackModel read_model(const std::filesystem::path& path);

struct SequenceData {
    FrameSet frames;
    std::vector<Track> tracks;
    bool has_tracks = false;
};

// Sequence directory layout: mask000.pgm.., optional img000.pgm.., and an
// optional tracks.txt. Frame numbers are consecutive from 000.
void write_sequence(const std::filesystem::path& dir, const FrameSet& frames,
                    const LineageGraph* graph = nullptr);
SequenceData read_sequence(const std::filesystem::path& dir);

// {"NS":5,"FN":10,"FP":1,"ED":1,"EA":1.5,"EC":1}; missing keys keep defaults.
OpWeights read_opweights(const std::filesystem::path& path);

// Simulation config as JSON; radius_range and drift are two-element arrays.
SimConfig read_simconfig(const std::filesystem::path& path);

}  // namespace cytrace
