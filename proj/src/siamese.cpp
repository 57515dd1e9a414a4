#include "cytrace/siamese.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cytrace {

namespace {

constexpr double kScoreEps = 1e-7;

void check_dim(const SiameseHead& head, std::size_t got, const char* what) {
    if (got != static_cast<std::size_t>(head.input_dim)) {
        throw DimensionError(std::string("siamese: ") + what + " has length " + std::to_string(got) +
                             ", head expects " + std::to_string(head.input_dim));
    }
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// forward pass with intermediates kept for backprop
struct ForwardState {
    std::vector<double> za, zb;  // pre-activations
    std::vector<double> ea, eb;  // embeddings
    std::vector<double> diff;    // |ea - eb|
    double logit = 0.0;
    double score = 0.0;
};

void run_forward(const SiameseHead& head, std::span<const double> a, std::span<const double> b,
                 ForwardState& st) {
    check_dim(head, a.size(), "first input");
    check_dim(head, b.size(), "second input");
    st.za.resize(kEmbedDim);
    st.zb.resize(kEmbedDim);
    st.ea.resize(kEmbedDim);
    st.eb.resize(kEmbedDim);
    st.diff.resize(kEmbedDim);

    const int dim = head.input_dim;
    double logit = head.b2;
    for (int k = 0; k < kEmbedDim; ++k) {
        const double* row = head.w1.data() + static_cast<std::size_t>(k) * dim;
        double sa = head.b1[static_cast<std::size_t>(k)];
        double sb = sa;
        for (int j = 0; j < dim; ++j) {
            sa += row[j] * a[static_cast<std::size_t>(j)];
            sb += row[j] * b[static_cast<std::size_t>(j)];
        }
        st.za[static_cast<std::size_t>(k)] = sa;
        st.zb[static_cast<std::size_t>(k)] = sb;
        const double ea = sa > 0.0 ? sa : 0.0;
        const double eb = sb > 0.0 ? sb : 0.0;
        st.ea[static_cast<std::size_t>(k)] = ea;
        st.eb[static_cast<std::size_t>(k)] = eb;
        const double d = std::abs(ea - eb);
        st.diff[static_cast<std::size_t>(k)] = d;
        logit += head.w2[static_cast<std::size_t>(k)] * d;
    }
    st.logit = logit;
    st.score = sigmoid(logit);
}

}  // namespace

SiameseHead SiameseHead::initialized(int input_dim, Rng& rng) {
    if (input_dim < 1) throw ValidationError("siamese: input_dim must be positive");
    SiameseHead head;
    head.input_dim = input_dim;
    head.w1.resize(static_cast<std::size_t>(kEmbedDim) * input_dim);
    head.b1.assign(kEmbedDim, 0.0);
    head.w2.resize(kEmbedDim);
    head.b2 = 0.0;
    const double bound1 = 1.0 / std::sqrt(static_cast<double>(input_dim));
    for (double& w : head.w1) w = rng.uniform(-bound1, bound1);
    const double bound2 = 1.0 / std::sqrt(static_cast<double>(kEmbedDim));
    for (double& w : head.w2) w = rng.uniform(-bound2, bound2);
    return head;
}

void embed(const SiameseHead& head, std::span<const double> x, double* out) {
    check_dim(head, x.size(), "input");
    const int dim = head.input_dim;
    for (int k = 0; k < kEmbedDim; ++k) {
        const double* row = head.w1.data() + static_cast<std::size_t>(k) * dim;
        double s = head.b1[static_cast<std::size_t>(k)];
        for (int j = 0; j < dim; ++j) s += row[j] * x[static_cast<std::size_t>(j)];
        out[k] = s > 0.0 ? s : 0.0;
    }
}

double score_from_embeddings(const SiameseHead& head, std::span<const double> ea,
                             std::span<const double> eb) {
    double logit = head.b2;
    for (int k = 0; k < kEmbedDim; ++k) {
        logit += head.w2[static_cast<std::size_t>(k)] *
                 std::abs(ea[static_cast<std::size_t>(k)] - eb[static_cast<std::size_t>(k)]);
    }
    return sigmoid(logit);
}

double forward(const SiameseHead& head, std::span<const double> a, std::span<const double> b) {
    check_dim(head, a.size(), "first input");
    check_dim(head, b.size(), "second input");
    std::vector<double> ea(kEmbedDim), eb(kEmbedDim);
    embed(head, a, ea.data());
    embed(head, b, eb.data());
    return score_from_embeddings(head, ea, eb);
}

double bce_loss(double score, int label) {
    const double p = std::clamp(score, kScoreEps, 1.0 - kScoreEps);
    return label == 1 ? -std::log(p) : -std::log(1.0 - p);
}

double tracking_loss(double visual_loss, double spatial_loss) {
    return (visual_loss + spatial_loss) / 2.0;
}

namespace {

// score plus exact gradients in one pass
double forward_backward(const SiameseHead& head, const PairExample& pair, HeadGradients& grad) {
    ForwardState st;
    run_forward(head, pair.feat_a, pair.feat_b, st);

    const int dim = head.input_dim;
    grad.w1.assign(static_cast<std::size_t>(kEmbedDim) * dim, 0.0);
    grad.b1.assign(kEmbedDim, 0.0);
    grad.w2.assign(kEmbedDim, 0.0);

    // d bce(clamp(p), y) / d logit; zero on the clamp plateau
    double dl_dlogit = 0.0;
    if (st.score > kScoreEps && st.score < 1.0 - kScoreEps) {
        dl_dlogit = st.score - static_cast<double>(pair.label);
    }
    grad.b2 = dl_dlogit;

    for (int k = 0; k < kEmbedDim; ++k) {
        const std::size_t ks = static_cast<std::size_t>(k);
        grad.w2[ks] = dl_dlogit * st.diff[ks];
        const double dl_dd = dl_dlogit * head.w2[ks];
        double sign = 0.0;
        if (st.ea[ks] > st.eb[ks]) sign = 1.0;
        else if (st.ea[ks] < st.eb[ks]) sign = -1.0;
        const double dl_dza = (st.za[ks] > 0.0) ? dl_dd * sign : 0.0;
        const double dl_dzb = (st.zb[ks] > 0.0) ? -dl_dd * sign : 0.0;
        grad.b1[ks] = dl_dza + dl_dzb;
        double* wrow = grad.w1.data() + ks * dim;
        for (int j = 0; j < dim; ++j) {
            wrow[j] = dl_dza * pair.feat_a[static_cast<std::size_t>(j)] +
                      dl_dzb * pair.feat_b[static_cast<std::size_t>(j)];
        }
    }
    return st.score;
}

}  // namespace

HeadGradients gradients(const SiameseHead& head, const PairExample& pair) {
    HeadGradients grad;
    forward_backward(head, pair, grad);
    return grad;
}

PairSets build_pairs(const SequenceFeatures& feats, const LineageGraph& graph,
                     const TrainConfig& cfg) {
    PairSets out;
    const std::size_t frame_count = feats.instances.size();
    if (frame_count < 2) return out;

    Rng rng(cfg.seed);
    for (std::size_t t = 1; t < frame_count; ++t) {
        const auto& prev = feats.instances[t - 1];
        const auto& curr = feats.instances[t];
        if (prev.empty() || curr.empty()) continue;

        std::vector<std::pair<std::size_t, std::size_t>> positives;
        std::vector<std::pair<std::size_t, std::size_t>> candidates;
        for (std::size_t i = 0; i < curr.size(); ++i) {
            const Track* track = graph.find_track(curr[i].label);
            const Label parent = track != nullptr ? track->parent : 0;
            for (std::size_t j = 0; j < prev.size(); ++j) {
                if (curr[i].label == prev[j].label) {
                    positives.emplace_back(i, j);
                } else if (prev[j].label != parent) {
                    candidates.emplace_back(i, j);
                }
            }
        }

        const std::size_t cap = positives.size() * static_cast<std::size_t>(cfg.negatives_per_positive);
        rng.shuffle(candidates);
        const std::size_t n_neg = std::min(candidates.size(), cap);

        auto append = [&](std::size_t i, std::size_t j, int label) {
            out.visual.push_back({feats.visual[t][i].values, feats.visual[t - 1][j].values, label});
            out.spatial.push_back({feats.spatial[t][i].values, feats.spatial[t - 1][j].values, label});
        };
        for (const auto& [i, j] : positives) append(i, j, 1);
        for (std::size_t k = 0; k < n_neg; ++k) append(candidates[k].first, candidates[k].second, 0);
    }
    return out;
}

namespace {

struct Velocity {
    std::vector<double> w1, b1, w2;
    double b2 = 0.0;
};

double run_epoch(SiameseHead& head, const std::vector<PairExample>& pairs,
                 const std::vector<std::size_t>& order, Velocity& vel, const TrainConfig& cfg) {
    HeadGradients grad;
    double loss_sum = 0.0;
    for (std::size_t idx : order) {
        const PairExample& pair = pairs[idx];
        const double score = forward_backward(head, pair, grad);
        loss_sum += bce_loss(score, pair.label);

        const double lr = cfg.learning_rate;
        const double mu = cfg.momentum;
        for (std::size_t i = 0; i < head.w1.size(); ++i) {
            vel.w1[i] = mu * vel.w1[i] - lr * grad.w1[i];
            head.w1[i] += vel.w1[i];
        }
        for (std::size_t i = 0; i < head.b1.size(); ++i) {
            vel.b1[i] = mu * vel.b1[i] - lr * grad.b1[i];
            head.b1[i] += vel.b1[i];
        }
        for (std::size_t i = 0; i < head.w2.size(); ++i) {
            vel.w2[i] = mu * vel.w2[i] - lr * grad.w2[i];
            head.w2[i] += vel.w2[i];
        }
        vel.b2 = mu * vel.b2 - lr * grad.b2;
        head.b2 += vel.b2;
    }
    return loss_sum / static_cast<double>(order.size());
}

}  // namespace

std::vector<double> train(HeadPair& heads, const PairSets& pairs, const TrainConfig& cfg) {
    if (pairs.visual.empty() || pairs.spatial.empty()) {
        throw ValidationError("train: empty pair set");
    }
    if (cfg.learning_rate < 0.0) throw ValidationError("train: negative learning rate");
    if (cfg.momentum < 0.0 || cfg.momentum >= 1.0) {
        throw ValidationError("train: momentum must lie in [0, 1)");
    }
    if (cfg.epochs < 1) throw ValidationError("train: epochs must be positive");

    Rng rng(cfg.seed);
    Velocity vel_v{std::vector<double>(heads.visual.w1.size(), 0.0),
                   std::vector<double>(heads.visual.b1.size(), 0.0),
                   std::vector<double>(heads.visual.w2.size(), 0.0), 0.0};
    Velocity vel_s{std::vector<double>(heads.spatial.w1.size(), 0.0),
                   std::vector<double>(heads.spatial.b1.size(), 0.0),
                   std::vector<double>(heads.spatial.w2.size(), 0.0), 0.0};

    std::vector<std::size_t> order_v(pairs.visual.size());
    std::vector<std::size_t> order_s(pairs.spatial.size());
    for (std::size_t i = 0; i < order_v.size(); ++i) order_v[i] = i;
    for (std::size_t i = 0; i < order_s.size(); ++i) order_s[i] = i;

    std::vector<double> history;
    history.reserve(static_cast<std::size_t>(cfg.epochs));
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order_v);
        rng.shuffle(order_s);
        const double mean_v = run_epoch(heads.visual, pairs.visual, order_v, vel_v, cfg);
        const double mean_s = run_epoch(heads.spatial, pairs.spatial, order_s, vel_s, cfg);
        history.push_back(tracking_loss(mean_v, mean_s));
    }
    return history;
}

TrackModel train_model(const std::vector<TrainingSequence>& sequences, const TrainConfig& cfg,
                       int n, std::vector<double>* loss_history) {
    if (sequences.empty()) throw ValidationError("train_model: no sequences");

    PairSets all;
    for (std::size_t i = 0; i < sequences.size(); ++i) {
        const TrainingSequence& seq = sequences[i];
        SequenceFeatures feats = compute_sequence_features(*seq.frames, n);
        TrainConfig seq_cfg = cfg;
        seq_cfg.seed = cfg.seed + i;
        PairSets ps = build_pairs(feats, *seq.graph, seq_cfg);
        all.visual.insert(all.visual.end(), std::make_move_iterator(ps.visual.begin()),
                          std::make_move_iterator(ps.visual.end()));
        all.spatial.insert(all.spatial.end(), std::make_move_iterator(ps.spatial.begin()),
                           std::make_move_iterator(ps.spatial.end()));
    }

    Rng rng(cfg.seed);
    TrackModel model;
    model.heads.visual = SiameseHead::initialized(kVisualDim, rng);
    model.heads.spatial = SiameseHead::initialized(2 * n, rng);
    model.train_config = cfg;
    model.encoding.n = n;
    model.encoding.image_width = sequences.front().frames->width();
    model.encoding.image_height = sequences.front().frames->height();

    std::vector<double> history = train(model.heads, all, cfg);
    if (loss_history != nullptr) *loss_history = std::move(history);
    return model;
}

TrackModel train_model(const FrameSet& frames, const LineageGraph& graph, const TrainConfig& cfg,
                       int n, std::vector<double>* loss_history) {
    return train_model(std::vector<TrainingSequence>{{&frames, &graph}}, cfg, n, loss_history);
}

}  // namespace cytrace
