#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cytrace/errors.hpp"
#include "cytrace/features.hpp"
#include "cytrace/io.hpp"
#include "cytrace/metrics.hpp"
#include "cytrace/simulator.hpp"
#include "cytrace/tracker.hpp"

namespace py = pybind11;
using namespace cytrace;

namespace {

py::array_t<std::uint32_t> masks_array(const FrameSet& frames) {
    const auto t = static_cast<py::ssize_t>(frames.frame_count());
    const py::ssize_t h = frames.height();
    const py::ssize_t w = frames.width();
    py::array_t<std::uint32_t> arr({t, h, w});
    auto view = arr.mutable_unchecked<3>();
    for (py::ssize_t f = 0; f < t; ++f)
        for (py::ssize_t y = 0; y < h; ++y)
            for (py::ssize_t x = 0; x < w; ++x)
                view(f, y, x) = frames.frames[f].at(static_cast<int>(x), static_cast<int>(y));
    return arr;
}

py::array_t<double> intensity_array(const FrameSet& frames) {
    const auto t = static_cast<py::ssize_t>(frames.intensity.size());
    const py::ssize_t h = frames.height();
    const py::ssize_t w = frames.width();
    py::array_t<double> arr({t, h, w});
    auto view = arr.mutable_unchecked<3>();
    for (py::ssize_t f = 0; f < t; ++f)
        for (py::ssize_t y = 0; y < h; ++y)
            for (py::ssize_t x = 0; x < w; ++x)
                view(f, y, x) = frames.intensity[f].at(static_cast<int>(x), static_cast<int>(y));
    return arr;
}

py::list tracks_list(const std::vector<Track>& tracks) {
    py::list out;
    for (const Track& t : tracks)
        out.append(py::make_tuple(t.label, t.begin, t.end, t.parent));
    return out;
}

py::dict report_dict(const MetricReport& r) {
    py::dict ops;
    ops["NS"] = r.ops.node_split;
    ops["FN"] = r.ops.false_negative;
    ops["FP"] = r.ops.false_positive;
    ops["ED"] = r.ops.edge_delete;
    ops["EA"] = r.ops.edge_add;
    ops["EC"] = r.ops.edge_change;
    py::dict out;
    out["SEG"] = r.seg;
    out["DET"] = r.det;
    out["TRA"] = r.tra;
    out["D_T"] = r.det - r.tra;
    out["ops"] = ops;
    return out;
}

LineageGraph graph_of(const SequenceData& seq, const std::string& what) {
    if (!seq.has_tracks) throw ValidationError(what + ": missing tracks.txt");
    return build_lineage(seq.frames, seq.tracks);
}

}  // namespace

PYBIND11_MODULE(_cytrace, m) {
    m.doc() = "cell tracking toolkit: simulation, similarity training, tracking, metrics";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);

    m.def("scenario_names", &scenario_names, "List the built-in simulation presets.");

    m.def(
        "simulate",
        [](const std::string& preset, std::optional<std::uint64_t> seed,
           std::optional<std::string> out) {
            SimConfig cfg = scenario(preset);
            if (seed) cfg.seed = *seed;
            const Simulation sim = simulate(cfg);
            if (out) write_sequence(*out, sim.frames, &sim.graph);
            py::dict d;
            d["masks"] = masks_array(sim.frames);
            d["intensity"] = intensity_array(sim.frames);
            d["tracks"] = tracks_list(sim.graph.tracks);
            return d;
        },
        py::arg("preset"), py::arg("seed") = std::nullopt, py::arg("out") = std::nullopt,
        "Run a preset simulation; optionally write the sequence directory. Returns\n"
        "masks (T,H,W) uint32, intensity (T,H,W) float64, and (label, begin, end,\n"
        "parent) track tuples.");

    m.def(
        "train",
        [](const std::string& data, const std::string& out, int epochs, double lr,
           double momentum, int neg_per_pos, std::uint64_t seed) {
            const SequenceData seq = read_sequence(data);
            const LineageGraph graph = graph_of(seq, "train");
            TrainConfig cfg;
            cfg.epochs = epochs;
            cfg.learning_rate = lr;
            cfg.momentum = momentum;
            cfg.negatives_per_positive = neg_per_pos;
            cfg.seed = seed;
            std::vector<double> history;
            const TrackModel model =
                train_model({TrainingSequence{&seq.frames, &graph}}, cfg, 4, &history);
            write_model(out, model);
            return history;
        },
        py::arg("data"), py::arg("out"), py::arg("epochs") = 40, py::arg("lr") = 0.0025,
        py::arg("momentum") = 0.9, py::arg("neg_per_pos") = 3, py::arg("seed") = 0,
        "Train the similarity heads on one sequence directory and write the model\n"
        "JSON. Returns the per-epoch loss history.");

    m.def(
        "track",
        [](const std::string& data, const std::string& model_path, const std::string& out,
           double alpha, double min_score, const std::string& mode) {
            const TrackModel model = read_model(model_path);
            const SequenceData seq = read_sequence(data);
            TrackerConfig cfg;
            cfg.alpha = alpha;
            cfg.min_score = min_score;
            cfg.n = model.encoding.n;
            TrackMode tm = TrackMode::fusion;
            if (mode == "visual_only") tm = TrackMode::visual_only;
            else if (mode == "spatial_only") tm = TrackMode::spatial_only;
            else if (mode != "fusion")
                throw ValidationError("track: unknown mode " + mode);
            const TrackingResult r = track_sequence(seq.frames, model.heads, cfg, tm);
            write_sequence(out, r.tracked, &r.graph);
            return tracks_list(r.graph.tracks);
        },
        py::arg("data"), py::arg("model"), py::arg("out"), py::arg("alpha") = 0.1,
        py::arg("min_score") = 0.0, py::arg("mode") = "fusion",
        "Track a sequence directory with a trained model and write the result\n"
        "directory. Returns the (label, begin, end, parent) track tuples.");

    m.def(
        "evaluate",
        [](const std::string& gt, const std::string& res) {
            const SequenceData g = read_sequence(gt);
            const SequenceData r = read_sequence(res);
            const LineageGraph gg = graph_of(g, "gt");
            const LineageGraph rg = graph_of(r, "res");
            return report_dict(evaluate(g.frames, gg, r.frames, rg, OpWeights{}));
        },
        py::arg("gt"), py::arg("res"),
        "Score a result sequence directory against a ground-truth directory.");

    m.def(
        "encode_positions",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> centroids, int n,
           int width, int height) {
            if (centroids.ndim() != 2 || centroids.shape(1) != 2)
                throw ValidationError("encode_positions: centroids must be (N, 2)");
            const py::ssize_t count = centroids.shape(0);
            auto view = centroids.unchecked<2>();

            std::vector<InstanceRecord> cells(count);
            for (py::ssize_t i = 0; i < count; ++i) {
                cells[i].label = static_cast<Label>(i + 1);
                cells[i].cx = view(i, 0);
                cells[i].cy = view(i, 1);
            }
            SpatialEncodingConfig cfg;
            cfg.n = n;
            cfg.image_width = width;
            cfg.image_height = height;

            py::array_t<double> out({count, static_cast<py::ssize_t>(2 * n)});
            auto w = out.mutable_unchecked<2>();
            for (py::ssize_t i = 0; i < count; ++i) {
                std::vector<InstanceRecord> others;
                others.reserve(count - 1);
                for (py::ssize_t j = 0; j < count; ++j)
                    if (j != i) others.push_back(cells[j]);
                const FeatureVector enc = relative_position_encoding(cells[i], others, cfg);
                for (int k = 0; k < 2 * n; ++k) w(i, k) = enc.values[k];
            }
            return out;
        },
        py::arg("centroids"), py::arg("n") = 4, py::arg("width") = 128,
        py::arg("height") = 128,
        "Relative-position encodings, one row of length 2n per centroid.");

    m.def(
        "pair_score",
        [](const std::string& model_path, const std::vector<double>& a,
           const std::vector<double>& b, const std::string& kind) {
            const TrackModel model = read_model(model_path);
            if (kind == "visual") return forward(model.heads.visual, a, b);
            if (kind == "spatial") return forward(model.heads.spatial, a, b);
            throw ValidationError("pair_score: kind must be visual or spatial");
        },
        py::arg("model"), py::arg("a"), py::arg("b"), py::arg("kind") = "visual",
        "Similarity score of one feature pair under a trained model head.");
}
