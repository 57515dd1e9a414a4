#include "cytrace/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "cytrace/errors.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace cytrace {

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write " + path.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw ValidationError("write failed: " + path.string());
}

bool pgm_ws(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

struct PgmFile {
    int width = 0;
    int height = 0;
    std::vector<std::uint16_t> samples;
};

PgmFile parse_pgm(const std::string& buf, const std::string& name) {
    if (buf.size() < 2 || buf[0] != 'P' || buf[1] != '5')
        throw ParseError(name + ": bad magic, expected P5");
    std::size_t pos = 2;

    auto parse_int = [&](const char* field) -> long {
        bool ws = false;
        while (pos < buf.size() && pgm_ws(buf[pos])) {
            ++pos;
            ws = true;
        }
        if (!ws) throw ParseError(name + ": missing separator before " + field);
        if (pos >= buf.size() || !std::isdigit(static_cast<unsigned char>(buf[pos])))
            throw ParseError(name + ": invalid " + std::string(field));
        long v = 0;
        while (pos < buf.size() && std::isdigit(static_cast<unsigned char>(buf[pos]))) {
            v = v * 10 + (buf[pos] - '0');
            if (v > 1000000000L)
                throw ParseError(name + ": " + std::string(field) + " out of range");
            ++pos;
        }
        return v;
    };

    const long width = parse_int("width");
    const long height = parse_int("height");
    const long maxval = parse_int("maxval");
    if (width < 1) throw ParseError(name + ": width must be positive");
    if (height < 1) throw ParseError(name + ": height must be positive");
    if (maxval != 65535)
        throw ParseError(name + ": unsupported maxval " + std::to_string(maxval) +
                         ", expected 65535");
    if (pos >= buf.size() || !pgm_ws(buf[pos]))
        throw ParseError(name + ": missing separator after maxval");
    ++pos;

    const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    if (buf.size() - pos < 2 * count) throw ParseError(name + ": truncated payload");
    if (buf.size() - pos > 2 * count) throw ParseError(name + ": trailing data after payload");

    PgmFile out;
    out.width = static_cast<int>(width);
    out.height = static_cast<int>(height);
    out.samples.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        const auto hi = static_cast<unsigned char>(buf[pos + 2 * i]);
        const auto lo = static_cast<unsigned char>(buf[pos + 2 * i + 1]);
        out.samples[i] = static_cast<std::uint16_t>((hi << 8) | lo);
    }
    return out;
}

std::string assemble_pgm(int width, int height, const std::vector<std::uint16_t>& samples) {
    std::string out = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n65535\n";
    out.reserve(out.size() + 2 * samples.size());
    for (std::uint16_t s : samples) {
        out.push_back(static_cast<char>(s >> 8));
        out.push_back(static_cast<char>(s & 0xff));
    }
    return out;
}

std::string frame_name(const char* stem, int t) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%03d.pgm", stem, t);
    return buf;
}

void check_finite(const std::vector<double>& v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x)) throw ValidationError(std::string("model: non-finite ") + what);
}

json head_to_json(const SiameseHead& h) {
    check_finite(h.w1, "W1");
    check_finite(h.b1, "b1");
    check_finite(h.w2, "W2");
    if (!std::isfinite(h.b2)) throw ValidationError("model: non-finite b2");

    json rows = json::array();
    for (int r = 0; r < kEmbedDim; ++r) {
        json row = json::array();
        for (int c = 0; c < h.input_dim; ++c)
            row.push_back(h.w1[static_cast<std::size_t>(r) * h.input_dim + c]);
        rows.push_back(std::move(row));
    }
    json hj;
    hj["input_dim"] = h.input_dim;
    hj["W1"] = std::move(rows);
    hj["b1"] = h.b1;
    hj["W2"] = h.w2;
    hj["b2"] = h.b2;
    return hj;
}

double num(const json& j, const std::string& ctx) {
    if (!j.is_number()) throw ValidationError(ctx + " must be a number");
    return j.get<double>();
}

const json& field(const json& j, const char* key, const std::string& ctx) {
    auto it = j.find(key);
    if (it == j.end()) throw ValidationError(ctx + ": missing field " + key);
    return *it;
}

SiameseHead head_from_json(const json& hj, const std::string& ctx) {
    if (!hj.is_object()) throw ValidationError(ctx + " must be an object");
    SiameseHead h;
    const json& dim = field(hj, "input_dim", ctx);
    if (!dim.is_number_integer() || dim.get<long>() < 1)
        throw ValidationError(ctx + ": input_dim must be a positive integer");
    h.input_dim = dim.get<int>();

    const json& w1 = field(hj, "W1", ctx);
    if (!w1.is_array() || w1.size() != static_cast<std::size_t>(kEmbedDim))
        throw ValidationError(ctx + ": W1 must have " + std::to_string(kEmbedDim) + " rows");
    h.w1.reserve(static_cast<std::size_t>(kEmbedDim) * h.input_dim);
    for (const json& row : w1) {
        if (!row.is_array() || row.size() != static_cast<std::size_t>(h.input_dim))
            throw ValidationError(ctx + ": W1 row length != input_dim");
        for (const json& v : row) h.w1.push_back(num(v, ctx + ": W1 entry"));
    }

    const json& b1 = field(hj, "b1", ctx);
    if (!b1.is_array() || b1.size() != static_cast<std::size_t>(kEmbedDim))
        throw ValidationError(ctx + ": b1 must have " + std::to_string(kEmbedDim) + " entries");
    for (const json& v : b1) h.b1.push_back(num(v, ctx + ": b1 entry"));

    const json& w2 = field(hj, "W2", ctx);
    if (!w2.is_array() || w2.size() != static_cast<std::size_t>(kEmbedDim))
        throw ValidationError(ctx + ": W2 must have " + std::to_string(kEmbedDim) + " entries");
    for (const json& v : w2) h.w2.push_back(num(v, ctx + ": W2 entry"));

    h.b2 = num(field(hj, "b2", ctx), ctx + ": b2");
    check_finite(h.w1, "W1");
    check_finite(h.b1, "b1");
    check_finite(h.w2, "W2");
    if (!std::isfinite(h.b2)) throw ValidationError("model: non-finite b2");
    return h;
}

}  // namespace

void write_labelmap(const fs::path& path, const LabelMap& map) {
    if (map.width < 1 || map.height < 1)
        throw ValidationError("labelmap: empty image");
    if (map.labels.size() != static_cast<std::size_t>(map.width) * map.height)
        throw ValidationError("labelmap: pixel count mismatch");
    std::vector<std::uint16_t> samples(map.labels.size());
    for (std::size_t i = 0; i < map.labels.size(); ++i) {
        if (map.labels[i] > 65535)
            throw ValidationError("labelmap: label " + std::to_string(map.labels[i]) +
                                  " exceeds 65535");
        samples[i] = static_cast<std::uint16_t>(map.labels[i]);
    }
    write_file(path, assemble_pgm(map.width, map.height, samples));
}

LabelMap read_labelmap(const fs::path& path) {
    const PgmFile pgm = parse_pgm(read_file(path), path.string());
    LabelMap map;
    map.width = pgm.width;
    map.height = pgm.height;
    map.labels.assign(pgm.samples.begin(), pgm.samples.end());
    return map;
}

void write_intensity(const fs::path& path, const Grid& img) {
    if (img.width < 1 || img.height < 1)
        throw ValidationError("intensity: empty image");
    if (img.values.size() != static_cast<std::size_t>(img.width) * img.height)
        throw ValidationError("intensity: pixel count mismatch");
    std::vector<std::uint16_t> samples(img.values.size());
    for (std::size_t i = 0; i < img.values.size(); ++i) {
        const double v = std::clamp(img.values[i], 0.0, 1.0);
        samples[i] = static_cast<std::uint16_t>(std::lround(v * 65535.0));
    }
    write_file(path, assemble_pgm(img.width, img.height, samples));
}

Grid read_intensity(const fs::path& path) {
    const PgmFile pgm = parse_pgm(read_file(path), path.string());
    Grid img;
    img.width = pgm.width;
    img.height = pgm.height;
    img.values.resize(pgm.samples.size());
    for (std::size_t i = 0; i < pgm.samples.size(); ++i)
        img.values[i] = pgm.samples[i] / 65535.0;
    return img;
}

void write_tracktable(const fs::path& path, const std::vector<Track>& tracks) {
    std::vector<Track> sorted = tracks;
    std::sort(sorted.begin(), sorted.end(),
              [](const Track& a, const Track& b) { return a.label < b.label; });
    std::string out;
    for (const Track& t : sorted) {
        out += std::to_string(t.label) + " " + std::to_string(t.begin) + " " +
               std::to_string(t.end) + " " + std::to_string(t.parent) + "\n";
    }
    write_file(path, out);
}

std::vector<Track> read_tracktable(const fs::path& path) {
    const std::string buf = read_file(path);
    const std::string name = path.string();

    std::vector<Track> tracks;
    std::set<Label> labels;
    std::size_t start = 0;
    int lineno = 0;
    while (start < buf.size()) {
        ++lineno;
        std::size_t end = buf.find('\n', start);
        if (end == std::string::npos) end = buf.size();
        const std::string line = buf.substr(start, end - start);
        start = end + 1;
        const std::string where = name + " line " + std::to_string(lineno);
        if (line.empty()) throw ParseError(where + ": blank line");

        std::istringstream iss(line);
        long long l = 0, b = 0, e = 0, p = 0;
        if (!(iss >> l >> b >> e >> p))
            throw ParseError(where + ": expected 'L B E P'");
        std::string extra;
        if (iss >> extra) throw ParseError(where + ": trailing tokens");

        if (l < 1 || l > 0xFFFFFFFFLL)
            throw ValidationError(where + ": label out of range");
        if (p < 0 || p > 0xFFFFFFFFLL)
            throw ValidationError(where + ": parent out of range");
        if (b < 0 || e < 0) throw ValidationError(where + ": negative frame index");
        if (b > e) throw ValidationError(where + ": begin > end");

        Track t;
        t.label = static_cast<Label>(l);
        t.begin = static_cast<int>(b);
        t.end = static_cast<int>(e);
        t.parent = static_cast<Label>(p);
        if (!labels.insert(t.label).second)
            throw ValidationError(where + ": duplicate label " + std::to_string(l));
        if (!tracks.empty() && tracks.back().label > t.label)
            throw ValidationError(where + ": labels not ascending");
        if (t.parent == t.label)
            throw ValidationError(where + ": track is its own parent");
        tracks.push_back(t);
    }

    for (const Track& t : tracks) {
        if (t.parent != 0 && labels.find(t.parent) == labels.end())
            throw ValidationError(name + ": track " + std::to_string(t.label) +
                                  " references unknown parent " + std::to_string(t.parent));
    }
    return tracks;
}

void write_model(const fs::path& path, const TrackModel& model) {
    json j;
    j["version"] = 1;
    j["visual"] = head_to_json(model.heads.visual);
    j["spatial"] = head_to_json(model.heads.spatial);
    j["train_config"] = {{"learning_rate", model.train_config.learning_rate},
                         {"momentum", model.train_config.momentum},
                         {"epochs", model.train_config.epochs},
                         {"seed", model.train_config.seed},
                         {"negatives_per_positive", model.train_config.negatives_per_positive}};
    j["encoding_config"] = {{"n", model.encoding.n},
                            {"image_width", model.encoding.image_width},
                            {"image_height", model.encoding.image_height}};
    write_file(path, j.dump());
}

TrackModel read_model(const fs::path& path) {
    const std::string buf = read_file(path);
    json j;
    try {
        j = json::parse(buf);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    if (!j.is_object()) throw ValidationError("model: top level must be an object");

    const json& ver = field(j, "version", "model");
    if (!ver.is_number_integer() || ver.get<long>() != 1)
        throw ValidationError("model: unsupported version");

    TrackModel m;
    m.heads.visual = head_from_json(field(j, "visual", "model"), "model: visual");
    m.heads.spatial = head_from_json(field(j, "spatial", "model"), "model: spatial");

    const json& tc = field(j, "train_config", "model");
    if (!tc.is_object()) throw ValidationError("model: train_config must be an object");
    m.train_config.learning_rate = num(field(tc, "learning_rate", "model: train_config"),
                                       "model: learning_rate");
    m.train_config.momentum = num(field(tc, "momentum", "model: train_config"),
                                  "model: momentum");
    m.train_config.epochs = static_cast<int>(num(field(tc, "epochs", "model: train_config"),
                                                 "model: epochs"));
    m.train_config.seed = field(tc, "seed", "model: train_config").get<std::uint64_t>();
    m.train_config.negatives_per_positive = static_cast<int>(
        num(field(tc, "negatives_per_positive", "model: train_config"), "model: neg per pos"));

    const json& ec = field(j, "encoding_config", "model");
    if (!ec.is_object()) throw ValidationError("model: encoding_config must be an object");
    const json& n = field(ec, "n", "model: encoding_config");
    if (!n.is_number_integer() || n.get<long>() < 1)
        throw ValidationError("model: encoding n must be a positive integer");
    m.encoding.n = n.get<int>();
    m.encoding.image_width = static_cast<int>(
        num(field(ec, "image_width", "model: encoding_config"), "model: image_width"));
    m.encoding.image_height = static_cast<int>(
        num(field(ec, "image_height", "model: encoding_config"), "model: image_height"));

    if (m.heads.spatial.input_dim != 2 * m.encoding.n)
        throw ValidationError("model: spatial input_dim != 2n");
    return m;
}

void write_sequence(const fs::path& dir, const FrameSet& frames, const LineageGraph* graph) {
    if (frames.frames.empty()) throw ValidationError("sequence: no frames");
    if (frames.frames.size() > 1000)
        throw ValidationError("sequence: more than 1000 frames unsupported");
    if (frames.has_intensity() && frames.intensity.size() != frames.frames.size())
        throw ValidationError("sequence: intensity frame count mismatch");
    fs::create_directories(dir);

    for (std::size_t t = 0; t < frames.frames.size(); ++t)
        write_labelmap(dir / frame_name("mask", static_cast<int>(t)), frames.frames[t]);
    if (frames.has_intensity())
        for (std::size_t t = 0; t < frames.intensity.size(); ++t)
            write_intensity(dir / frame_name("img", static_cast<int>(t)), frames.intensity[t]);
    if (graph) write_tracktable(dir / "tracks.txt", graph->tracks);
}

SequenceData read_sequence(const fs::path& dir) {
    if (!fs::is_directory(dir))
        throw ValidationError("sequence: not a directory: " + dir.string());

    SequenceData out;
    for (int t = 0; t < 1000; ++t) {
        const fs::path p = dir / frame_name("mask", t);
        if (!fs::exists(p)) break;
        out.frames.frames.push_back(read_labelmap(p));
    }
    if (out.frames.frames.empty())
        throw ValidationError("sequence: no mask000.pgm in " + dir.string());
    for (const LabelMap& m : out.frames.frames)
        if (!m.same_shape(out.frames.frames.front()))
            throw ValidationError("sequence: frame dimensions differ");

    if (fs::exists(dir / frame_name("img", 0))) {
        for (std::size_t t = 0; t < out.frames.frames.size(); ++t) {
            const fs::path p = dir / frame_name("img", static_cast<int>(t));
            if (!fs::exists(p))
                throw ValidationError("sequence: missing " + p.string());
            Grid g = read_intensity(p);
            if (g.width != out.frames.frames[t].width ||
                g.height != out.frames.frames[t].height)
                throw ValidationError("sequence: intensity dimensions differ");
            out.frames.intensity.push_back(std::move(g));
        }
    }

    if (fs::exists(dir / "tracks.txt")) {
        out.tracks = read_tracktable(dir / "tracks.txt");
        out.has_tracks = true;
    }
    return out;
}

OpWeights read_opweights(const fs::path& path) {
    const std::string buf = read_file(path);
    json j;
    try {
        j = json::parse(buf);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    if (!j.is_object()) throw ValidationError("weights: top level must be an object");

    OpWeights w;
    for (const auto& [key, value] : j.items()) {
        const double v = num(value, "weights: " + key);
        if (v < 0.0) throw ValidationError("weights: " + key + " must be >= 0");
        if (key == "NS") w.node_split = v;
        else if (key == "FN") w.false_negative = v;
        else if (key == "FP") w.false_positive = v;
        else if (key == "ED") w.edge_delete = v;
        else if (key == "EA") w.edge_add = v;
        else if (key == "EC") w.edge_change = v;
        else throw ValidationError("weights: unknown key " + key);
    }
    return w;
}

SimConfig read_simconfig(const fs::path& path) {
    const std::string buf = read_file(path);
    json j;
    try {
        j = json::parse(buf);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    if (!j.is_object()) throw ValidationError("simconfig: top level must be an object");

    SimConfig cfg;
    for (const auto& [key, value] : j.items()) {
        const std::string ctx = "simconfig: " + key;
        if (key == "width") cfg.width = static_cast<int>(num(value, ctx));
        else if (key == "height") cfg.height = static_cast<int>(num(value, ctx));
        else if (key == "frames") cfg.frames = static_cast<int>(num(value, ctx));
        else if (key == "initial_cells") cfg.initial_cells = static_cast<int>(num(value, ctx));
        else if (key == "radius_range") {
            if (!value.is_array() || value.size() != 2)
                throw ValidationError(ctx + " must be [min, max]");
            cfg.radius_min = num(value[0], ctx);
            cfg.radius_max = num(value[1], ctx);
        } else if (key == "motion_sigma") cfg.motion_sigma = num(value, ctx);
        else if (key == "drift") {
            if (!value.is_array() || value.size() != 2)
                throw ValidationError(ctx + " must be [dx, dy]");
            cfg.drift_x = num(value[0], ctx);
            cfg.drift_y = num(value[1], ctx);
        } else if (key == "p_divide") cfg.p_divide = num(value, ctx);
        else if (key == "p_die") cfg.p_die = num(value, ctx);
        else if (key == "arrival_rate") cfg.arrival_rate = num(value, ctx);
        else if (key == "noise_sigma") cfg.noise_sigma = num(value, ctx);
        else if (key == "seed") {
            if (!value.is_number_integer())
                throw ValidationError(ctx + " must be an integer");
            cfg.seed = value.get<std::uint64_t>();
        } else throw ValidationError("simconfig: unknown key " + key);
    }
    return cfg;
}

}  // namespace cytrace
