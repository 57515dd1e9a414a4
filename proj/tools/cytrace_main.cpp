#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cytrace/errors.hpp"
#include "cytrace/io.hpp"
#include "cytrace/metrics.hpp"
#include "cytrace/simulator.hpp"
#include "cytrace/tracker.hpp"

namespace fs = std::filesystem;
using namespace cytrace;

namespace {

// flag combinations CLI11 cannot express; mapped to exit code 2
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

LineageGraph graph_from(const SequenceData& seq, const std::string& what) {
    if (!seq.has_tracks)
        throw ValidationError(what + ": missing tracks.txt");
    return build_lineage(seq.frames, seq.tracks);
}

// a dataset dir is either one sequence folder or a root of sequence folders
std::vector<fs::path> sequence_dirs(const fs::path& root) {
    if (fs::exists(root / "mask000.pgm")) return {root};
    std::vector<fs::path> dirs;
    if (fs::is_directory(root)) {
        for (const auto& entry : fs::directory_iterator(root)) {
            if (entry.is_directory() && fs::exists(entry.path() / "mask000.pgm"))
                dirs.push_back(entry.path());
        }
    }
    std::sort(dirs.begin(), dirs.end());
    if (dirs.empty())
        throw ValidationError("no sequence (mask000.pgm) under " + root.string());
    return dirs;
}

int run_simulate(const std::string& preset, const std::string& config_file,
                 const std::string& out_dir, bool seed_given, std::uint64_t seed) {
    if (preset.empty() == config_file.empty())
        throw UsageError("simulate: exactly one of --preset or --config is required");
    SimConfig cfg = preset.empty() ? read_simconfig(config_file) : scenario(preset);
    if (seed_given) cfg.seed = seed;

    const Simulation sim = simulate(cfg);
    write_sequence(out_dir, sim.frames, &sim.graph);
    std::cout << "wrote " << sim.frames.frame_count() << " frames, "
              << sim.graph.tracks.size() << " tracks to " << out_dir << "\n";
    return 0;
}

int run_train(const std::string& data_dir, const std::string& out_path, const TrainConfig& tc) {
    std::vector<SequenceData> data;
    for (const fs::path& dir : sequence_dirs(data_dir)) data.push_back(read_sequence(dir));

    std::vector<LineageGraph> graphs;
    graphs.reserve(data.size());
    for (std::size_t i = 0; i < data.size(); ++i)
        graphs.push_back(graph_from(data[i], "train: sequence " + std::to_string(i)));

    std::vector<TrainingSequence> seqs;
    for (std::size_t i = 0; i < data.size(); ++i)
        seqs.push_back(TrainingSequence{&data[i].frames, &graphs[i]});

    std::vector<double> history;
    const TrackModel model = train_model(seqs, tc, 4, &history);
    write_model(out_path, model);
    std::cout << "trained on " << seqs.size() << " sequence(s), " << tc.epochs
              << " epochs, final loss " << history.back() << ", model at " << out_path << "\n";
    return 0;
}

int run_track(const std::string& data_dir, const std::string& model_path,
              const std::string& out_dir, double alpha, bool n_given, int n,
              double min_score) {
    const TrackModel model = read_model(model_path);
    const SequenceData seq = read_sequence(data_dir);

    TrackerConfig cfg;
    cfg.alpha = alpha;
    cfg.min_score = min_score;
    cfg.n = n_given ? n : model.encoding.n;

    const TrackingResult result = track_sequence(seq.frames, model.heads, cfg);
    write_sequence(out_dir, result.tracked, &result.graph);
    std::cout << "tracked " << seq.frames.frame_count() << " frames into "
              << result.graph.tracks.size() << " tracks at " << out_dir << "\n";
    return 0;
}

int run_evaluate(const std::string& gt_dir, const std::string& res_dir,
                 const std::string& weights_file) {
    const SequenceData gt = read_sequence(gt_dir);
    const SequenceData res = read_sequence(res_dir);
    const LineageGraph gt_graph = graph_from(gt, "gt");
    const LineageGraph res_graph = graph_from(res, "res");
    const OpWeights w = weights_file.empty() ? OpWeights{} : read_opweights(weights_file);

    const MetricReport report = evaluate(gt.frames, gt_graph, res.frames, res_graph, w);
    std::cout << report_json(report) << "\n";
    return 0;
}

int run_ablate(const std::string& data_dir, const std::string& model_path) {
    const TrackModel model = read_model(model_path);
    const SequenceData gt = read_sequence(data_dir);
    const LineageGraph gt_graph = graph_from(gt, "ablate: data");

    TrackerConfig cfg;
    cfg.n = model.encoding.n;

    const std::pair<const char*, TrackMode> modes[] = {
        {"fusion", TrackMode::fusion},
        {"visual_only", TrackMode::visual_only},
        {"spatial_only", TrackMode::spatial_only},
    };
    std::string out = "{";
    for (const auto& [name, mode] : modes) {
        const TrackingResult r = track_sequence(gt.frames, model.heads, cfg, mode);
        const MetricReport rep =
            evaluate(gt.frames, gt_graph, r.tracked, r.graph, OpWeights{});
        if (out.size() > 1) out += ",";
        out += "\"" + std::string(name) + "\":" + report_json(rep);
    }
    out += "}";
    std::cout << out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cell tracking and lineage evaluation toolkit"};
    app.require_subcommand(1);

    std::string preset, config_file, out_dir, data_dir, model_path, gt_dir, res_dir,
        weights_file;
    std::uint64_t seed = 0;
    TrainConfig tc;
    double alpha = 0.1, min_score = 0.0;
    int n = 4;

    auto* sim = app.add_subcommand("simulate", "generate a synthetic sequence");
    sim->add_option("--preset", preset, "scenario preset name");
    sim->add_option("--config", config_file, "simulation config JSON file");
    sim->add_option("--out", out_dir, "output sequence directory")->required();
    auto* sim_seed = sim->add_option("--seed", seed, "override the config seed");

    auto* train = app.add_subcommand("train", "train the similarity heads");
    train->add_option("--data", data_dir, "sequence directory or root of sequence folders")
        ->required();
    train->add_option("--out", model_path, "output model JSON path")->required();
    train->add_option("--epochs", tc.epochs, "training epochs")->capture_default_str();
    train->add_option("--lr", tc.learning_rate, "learning rate")->capture_default_str();
    train->add_option("--momentum", tc.momentum, "momentum coefficient")
        ->capture_default_str();
    train->add_option("--neg-per-pos", tc.negatives_per_positive,
                      "negative pairs sampled per positive pair")
        ->capture_default_str();
    train->add_option("--seed", tc.seed, "training seed")->capture_default_str();

    auto* track = app.add_subcommand("track", "track a sequence with a trained model");
    track->add_option("--data", data_dir, "input sequence directory")->required();
    track->add_option("--model", model_path, "model JSON path")->required();
    track->add_option("--out", out_dir, "output sequence directory")->required();
    track->add_option("--alpha", alpha, "overlap threshold for the fallback branch")
        ->capture_default_str();
    auto* track_n = track->add_option("--n", n, "spatial encoding neighbours "
                                                "(default: from the model)");
    track->add_option("--min-score", min_score, "minimum agreeing similarity score")
        ->capture_default_str();

    auto* eval = app.add_subcommand("evaluate", "score a result against ground truth");
    eval->add_option("--gt", gt_dir, "ground-truth sequence directory")->required();
    eval->add_option("--res", res_dir, "result sequence directory")->required();
    eval->add_option("--weights", weights_file, "operation weights JSON file");

    auto* ablate = app.add_subcommand("ablate", "compare fusion with single-head tracking");
    ablate->add_option("--data", data_dir, "ground-truth sequence directory")->required();
    ablate->add_option("--model", model_path, "model JSON path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (sim->parsed())
            return run_simulate(preset, config_file, out_dir, sim_seed->count() > 0, seed);
        if (train->parsed()) return run_train(data_dir, model_path, tc);
        if (track->parsed())
            return run_track(data_dir, model_path, out_dir, alpha, track_n->count() > 0, n,
                             min_score);
        if (eval->parsed()) return run_evaluate(gt_dir, res_dir, weights_file);
        if (ablate->parsed()) return run_ablate(data_dir, model_path);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
