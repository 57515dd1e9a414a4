#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cytrace/features.hpp"
#include "cytrace/lineage.hpp"
#include "cytrace/rng.hpp"

namespace cytrace {

inline constexpr int kEmbedDim = 256;

// Pair-similarity head: a shared dense layer maps each input to a 256-D
// embedding (relu), the embeddings' elementwise absolute difference goes
// through a second dense layer, and a sigmoid yields a score in (0, 1).
// The absolute difference makes the score symmetric in its two inputs.
struct SiameseHead {
    int input_dim = 0;
    std::vector<double> w1;  // kEmbedDim x input_dim, row-major
    std::vector<double> b1;  // kEmbedDim
    std::vector<double> w2;  // kEmbedDim
    double b2 = 0.0;

    // Uniform init in [-1/sqrt(fan_in), 1/sqrt(fan_in)], zero biases.
    static SiameseHead initialized(int input_dim, Rng& rng);
};

struct HeadGradients {
    std::vector<double> w1;
    std::vector<double> b1;
    std::vector<double> w2;
    double b2 = 0.0;
};

struct TrainConfig {
    double learning_rate = 0.0025;
    double momentum = 0.9;
    int epochs = 40;
    std::uint64_t seed = 0;
    int negatives_per_positive = 3;
};

struct PairExample {
    std::vector<double> feat_a;
    std::vector<double> feat_b;
    int label = 0;  // 1: same cell, 0: different
};

// relu(W1 x + b1); out must hold kEmbedDim values.
void embed(const SiameseHead& head, std::span<const double> x, double* out);

double score_from_embeddings(const SiameseHead& head, std::span<const double> ea,
                             std::span<const double> eb);

double forward(const SiameseHead& head, std::span<const double> a, std::span<const double> b);

// Cross entropy of a score against a {0,1} label; the score is clamped to
// [1e-7, 1 - 1e-7] before the logs.
double bce_loss(double score, int label);

double tracking_loss(double visual_loss, double spatial_loss);

// Exact partials of bce_loss(forward(a, b), label) for every weight, with
// subgradient 0 at the relu and |.| kinks.
HeadGradients gradients(const SiameseHead& head, const PairExample& pair);

struct PairSets {
    std::vector<PairExample> visual;
    std::vector<PairExample> spatial;
};

// Labeled cross-frame pairs from ground truth: every same-label pair across
// adjacent frames is a positive; differing-label pairs are negatives,
// sampled without replacement up to negatives_per_positive per positive per
// frame pair with the generator seeded from cfg.seed. Daughter/parent pairs
// are excluded from the negatives. The visual and spatial lists are built
// from the same index pairs and stay parallel.
PairSets build_pairs(const SequenceFeatures& feats, const LineageGraph& graph,
                     const TrainConfig& cfg);

struct HeadPair {
    SiameseHead visual;
    SiameseHead spatial;
};

// Per-example SGD with momentum (v <- momentum*v - lr*grad, w <- w + v),
// one pass per epoch over each head's pairs in seeded shuffled order.
// Returns one entry per epoch: the tracking loss of the two epoch means.
std::vector<double> train(HeadPair& heads, const PairSets& pairs, const TrainConfig& cfg);

// Trained heads plus the configs needed to reuse them on other sequences.
// encoding.image_width/height record the training image size; inference
// always normalizes by the tracked sequence's own dimensions.
struct TrackModel {
    HeadPair heads;
    TrainConfig train_config;
    SpatialEncodingConfig encoding;
};

struct TrainingSequence {
    const FrameSet* frames = nullptr;
    const LineageGraph* graph = nullptr;
};

// Full training pipeline over one or more ground-truth sequences. Pair
// sampling for sequence i is seeded with cfg.seed + i.
TrackModel train_model(const std::vector<TrainingSequence>& sequences, const TrainConfig& cfg,
                       int n = 4, std::vector<double>* loss_history = nullptr);

TrackModel train_model(const FrameSet& frames, const LineageGraph& graph, const TrainConfig& cfg,
                       int n = 4, std::vector<double>* loss_history = nullptr);

}  // namespace cytrace
