#include "celleval/io.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace celleval {

namespace {

using nlohmann::json;

namespace fs = std::filesystem;

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot open " + path + " for writing");
    return out;
}

// 6-significant-digit rounding for report values: format and reparse, so the
// JSON writer emits the shortest representation of the rounded number.
double sig6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return std::strtod(buf, nullptr);
}

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

[[noreturn]] void fail_at(const std::string& name, std::size_t line, const std::string& what) {
    throw InputError(name + ":" + std::to_string(line) + ": " + what);
}

int parse_int_field(const std::string& field, const std::string& name, std::size_t line,
                    const char* label) {
    int value = 0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
        fail_at(name, line, std::string(label) + " '" + field + "' is not an integer");
    }
    return value;
}

CellClass cell_class_from_id(int id, const std::string& context) {
    if (id == 1) return CellClass::BC;
    if (id == 2) return CellClass::TC;
    throw InputError(context + ": class " + std::to_string(id) + " is not 1 (BC) or 2 (TC)");
}

json parse_json_stream(std::istream& in, const std::string& name) {
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw InputError(name + ": " + e.what());
    }
}

const json& require_field(const json& j, const char* key, const std::string& context) {
    const auto it = j.find(key);
    if (it == j.end()) throw InputError(context + ": missing field '" + key + "'");
    return *it;
}

std::string require_string(const json& j, const char* key, const std::string& context) {
    const json& f = require_field(j, key, context);
    if (!f.is_string()) throw InputError(context + ": field '" + key + "' must be a string");
    return f.get<std::string>();
}

double require_number(const json& j, const char* key, const std::string& context) {
    const json& f = require_field(j, key, context);
    if (!f.is_number()) throw InputError(context + ": field '" + key + "' must be a number");
    return f.get<double>();
}

int require_int(const json& j, const char* key, const std::string& context) {
    const json& f = require_field(j, key, context);
    if (!f.is_number_integer()) {
        throw InputError(context + ": field '" + key + "' must be an integer");
    }
    return f.get<int>();
}

// --- PGM plumbing ---------------------------------------------------------

// Reads one header token, skipping whitespace and '#' comments.
std::string pgm_token(std::istream& in, const std::string& name) {
    int c = in.get();
    while (c != EOF && (std::isspace(c) || c == '#')) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        }
        c = in.get();
    }
    if (c == EOF) throw InputError(name + ": truncated PGM header");
    std::string token;
    while (c != EOF && !std::isspace(c)) {
        token.push_back(static_cast<char>(c));
        c = in.get();
    }
    return token;
}

long pgm_header_value(std::istream& in, const std::string& name, const char* label) {
    const std::string token = pgm_token(in, name);
    long value = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size() || value <= 0) {
        throw InputError(name + ": PGM " + label + " '" + token + "' is not a positive integer");
    }
    return value;
}

struct PgmHeader {
    int width;
    int height;
    long maxval;
};

PgmHeader parse_pgm_header(std::istream& in, const std::string& name) {
    const std::string magic = pgm_token(in, name);
    if (magic != "P5") throw InputError(name + ": not a binary PGM (magic '" + magic + "')");
    const long width = pgm_header_value(in, name, "width");
    const long height = pgm_header_value(in, name, "height");
    const long maxval = pgm_header_value(in, name, "maxval");
    // The single whitespace byte separating the header from the raster was
    // consumed as the maxval token's delimiter.
    return PgmHeader{static_cast<int>(width), static_cast<int>(height), maxval};
}

std::vector<std::uint8_t> pgm_raster(std::istream& in, const std::string& name,
                                     std::size_t bytes) {
    std::vector<std::uint8_t> data(bytes);
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(bytes));
    if (static_cast<std::size_t>(in.gcount()) != bytes) {
        throw InputError(name + ": PGM raster truncated (" + std::to_string(in.gcount()) +
                         " of " + std::to_string(bytes) + " bytes)");
    }
    return data;
}

void write_pgm_header(std::ostream& out, int width, int height, long maxval) {
    out << "P5\n" << width << " " << height << "\n" << maxval << "\n";
}

// --- report fragments -----------------------------------------------------

json counts_obj(const MatchCounts& c) {
    return json{{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}};
}

json metrics_obj(const ClassMetrics& m) {
    return json{{"precision", sig6(m.precision)}, {"recall", sig6(m.recall)}, {"f1", sig6(m.f1)}};
}

json report_obj(const EvalReport& r) {
    return json{
        {"counts", {{"bc", counts_obj(r.counts.bc)}, {"tc", counts_obj(r.counts.tc)}}},
        {"metrics", {{"bc", metrics_obj(r.metrics.bc)}, {"tc", metrics_obj(r.metrics.tc)}}},
        {"mean_f1", sig6(r.mean_f1)},
    };
}

json matrix_obj(const std::vector<std::vector<double>>& m) {
    json rows = json::array();
    for (const auto& row : m) {
        json r = json::array();
        for (double v : row) r.push_back(sig6(v));
        rows.push_back(std::move(r));
    }
    return rows;
}

const char* kind_name(Violation::Kind k) {
    switch (k) {
        case Violation::Kind::DuplicatePairId: return "duplicate-pair-id";
        case Violation::Kind::SplitLeakage: return "split-leakage";
        case Violation::Kind::RatioDeviation: return "ratio-deviation";
        default: return "geometry";
    }
}

} // namespace

// --- cells ------------------------------------------------------------------

std::vector<GroundTruthCell> parse_cells_csv(std::istream& in, const std::string& name) {
    std::vector<GroundTruthCell> cells;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        std::array<std::string, 3> fields;
        std::size_t field = 0;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= line.size(); ++i) {
            if (i == line.size() || line[i] == ',') {
                if (field >= fields.size()) fail_at(name, line_no, "expected 3 fields (x,y,class)");
                fields[field++] = line.substr(start, i - start);
                start = i + 1;
            }
        }
        if (field != 3) fail_at(name, line_no, "expected 3 fields (x,y,class)");

        GroundTruthCell cell;
        cell.x = parse_int_field(fields[0], name, line_no, "x");
        cell.y = parse_int_field(fields[1], name, line_no, "y");
        const int cls = parse_int_field(fields[2], name, line_no, "class");
        try {
            cell.cls = cell_class_from_id(cls, "row");
            validate_cell(cell);
        } catch (const Error& e) {
            fail_at(name, line_no, e.what());
        }
        cells.push_back(cell);
    }
    return cells;
}

std::vector<GroundTruthCell> load_cells_csv(const std::string& path) {
    auto in = open_input(path);
    return parse_cells_csv(in, path);
}

void save_cells_csv(const std::string& path, const std::vector<GroundTruthCell>& cells) {
    auto out = open_output(path);
    for (const auto& c : cells) {
        out << c.x << ',' << c.y << ',' << static_cast<int>(c.cls) << '\n';
    }
}

// --- predictions --------------------------------------------------------------

ImagePredictions parse_predictions_json(std::istream& in, const std::string& name) {
    const json j = parse_json_stream(in, name);
    if (!j.is_object()) throw InputError(name + ": top level must be an object");
    const json& points = require_field(j, "points", name);
    if (!points.is_array()) throw InputError(name + ": 'points' must be an array");

    ImagePredictions preds;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const std::string context = name + ": points[" + std::to_string(i) + "]";
        const json& p = points[i];
        if (!p.is_object()) throw InputError(context + ": must be an object");
        const std::string image_id = require_string(p, "image_id", context);
        PredictedCell cell;
        cell.x = require_number(p, "x", context);
        cell.y = require_number(p, "y", context);
        cell.cls = cell_class_from_id(require_int(p, "class", context), context);
        cell.confidence = require_number(p, "confidence", context);
        try {
            validate_cell(cell);
        } catch (const Error& e) {
            throw InputError(context + ": " + e.what());
        }
        preds[image_id].push_back(cell);
    }
    return preds;
}

ImagePredictions load_predictions_json(const std::string& path) {
    auto in = open_input(path);
    return parse_predictions_json(in, path);
}

std::string predictions_json_string(const ImagePredictions& preds) {
    json points = json::array();
    for (const auto& [image_id, cells] : preds) {
        for (const auto& c : cells) {
            points.push_back(json{
                {"image_id", image_id},
                {"x", c.x},
                {"y", c.y},
                {"class", static_cast<int>(c.cls)},
                {"confidence", c.confidence},
            });
        }
    }
    return dump(json{{"points", std::move(points)}});
}

void save_predictions_json(const std::string& path, const ImagePredictions& preds) {
    auto out = open_output(path);
    out << predictions_json_string(preds);
}

// --- rasters -------------------------------------------------------------------

TissueGrid parse_tissue_pgm(std::istream& in, const std::string& name) {
    const PgmHeader h = parse_pgm_header(in, name);
    if (h.maxval != 255) {
        throw InputError(name + ": tissue raster must have maxval 255, got " +
                         std::to_string(h.maxval));
    }
    const auto raw =
        pgm_raster(in, name, static_cast<std::size_t>(h.width) * static_cast<std::size_t>(h.height));
    TissueGrid grid;
    grid.width = h.width;
    grid.height = h.height;
    grid.mpp = kTissueMpp;
    grid.labels.resize(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const std::uint8_t v = raw[i];
        if (v != 1 && v != 2 && v != 255) {
            throw InputError(name + ": pixel (" + std::to_string(i % h.width) + ", " +
                             std::to_string(i / h.width) + ") has label " + std::to_string(v) +
                             ", expected 1 (BG), 2 (CA), or 255 (UNK)");
        }
        grid.labels[i] = static_cast<TissueClass>(v);
    }
    return grid;
}

TissueGrid load_tissue_pgm(const std::string& path) {
    auto in = open_input(path);
    return parse_tissue_pgm(in, path);
}

void save_tissue_pgm(const std::string& path, const TissueGrid& grid) {
    validate_grid(grid);
    auto out = open_output(path);
    write_pgm_header(out, grid.width, grid.height, 255);
    out.write(reinterpret_cast<const char*>(grid.labels.data()),
              static_cast<std::streamsize>(grid.labels.size()));
}

TissueProbGrid parse_prob_pgm(std::istream& in, const std::string& name) {
    const PgmHeader h = parse_pgm_header(in, name);
    if (h.maxval != 65535) {
        throw InputError(name + ": probability raster must have maxval 65535, got " +
                         std::to_string(h.maxval));
    }
    const std::size_t samples =
        static_cast<std::size_t>(h.width) * static_cast<std::size_t>(h.height);
    const auto raw = pgm_raster(in, name, samples * 2);
    TissueProbGrid grid;
    grid.width = h.width;
    grid.height = h.height;
    grid.mpp = kTissueMpp;
    grid.p_ca.resize(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        const unsigned value =
            (static_cast<unsigned>(raw[2 * i]) << 8) | static_cast<unsigned>(raw[2 * i + 1]);
        grid.p_ca[i] = static_cast<double>(value) / 65535.0;
    }
    return grid;
}

TissueProbGrid load_prob_pgm(const std::string& path) {
    auto in = open_input(path);
    return parse_prob_pgm(in, path);
}

void save_prob_pgm(const std::string& path, const TissueProbGrid& grid) {
    validate_grid(grid);
    auto out = open_output(path);
    write_pgm_header(out, grid.width, grid.height, 65535);
    std::vector<std::uint8_t> raw(grid.p_ca.size() * 2);
    for (std::size_t i = 0; i < grid.p_ca.size(); ++i) {
        const long v = std::lround(grid.p_ca[i] * 65535.0);
        const unsigned clamped = static_cast<unsigned>(std::clamp(v, 0L, 65535L));
        raw[2 * i] = static_cast<std::uint8_t>(clamped >> 8);
        raw[2 * i + 1] = static_cast<std::uint8_t>(clamped & 0xFF);
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
}

TissueProbGrid parse_prob_csv(std::istream& in, const std::string& name) {
    TissueProbGrid grid;
    grid.mpp = kTissueMpp;
    grid.width = 0;
    grid.height = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        int cols = 0;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= line.size(); ++i) {
            if (i == line.size() || line[i] == ',') {
                const std::string field = line.substr(start, i - start);
                char* end = nullptr;
                const double v = std::strtod(field.c_str(), &end);
                if (end != field.c_str() + field.size() || field.empty()) {
                    fail_at(name, line_no, "value '" + field + "' is not a number");
                }
                grid.p_ca.push_back(v);
                ++cols;
                start = i + 1;
            }
        }
        if (grid.width == 0) {
            grid.width = cols;
        } else if (cols != grid.width) {
            fail_at(name, line_no,
                    "row has " + std::to_string(cols) + " values, expected " +
                        std::to_string(grid.width));
        }
        ++grid.height;
    }
    try {
        validate_grid(grid);
    } catch (const Error& e) {
        throw InputError(name + ": " + e.what());
    }
    return grid;
}

TissueProbGrid load_prob_csv(const std::string& path) {
    auto in = open_input(path);
    return parse_prob_csv(in, path);
}

void save_prob_csv(const std::string& path, const TissueProbGrid& grid) {
    validate_grid(grid);
    auto out = open_output(path);
    char buf[64];
    for (int y = 0; y < grid.height; ++y) {
        for (int x = 0; x < grid.width; ++x) {
            std::snprintf(buf, sizeof(buf), "%.17g", grid.at(x, y));
            if (x) out << ',';
            out << buf;
        }
        out << '\n';
    }
}

LabelMap load_label_pgm(const std::string& path) {
    auto in = open_input(path);
    const PgmHeader h = parse_pgm_header(in, path);
    if (h.maxval != 255) {
        throw InputError(path + ": label raster must have maxval 255, got " +
                         std::to_string(h.maxval));
    }
    const auto raw =
        pgm_raster(in, path, static_cast<std::size_t>(h.width) * static_cast<std::size_t>(h.height));
    LabelMap map(h.width, h.height);
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] > 2) {
            throw InputError(path + ": pixel (" + std::to_string(i % h.width) + ", " +
                             std::to_string(i / h.width) + ") has label " +
                             std::to_string(raw[i]) + ", expected 0, 1, or 2");
        }
        map.labels[i] = raw[i];
    }
    return map;
}

void save_label_pgm(const std::string& path, const LabelMap& map) {
    auto out = open_output(path);
    write_pgm_header(out, map.width, map.height, 255);
    out.write(reinterpret_cast<const char*>(map.labels.data()),
              static_cast<std::streamsize>(map.labels.size()));
}

Heatmap load_heatmap_pgm(const std::string& path) {
    const TissueProbGrid grid = load_prob_pgm(path);
    Heatmap map(grid.width, grid.height);
    map.values = grid.p_ca;
    return map;
}

void save_heatmap_pgm(const std::string& path, const Heatmap& map) {
    TissueProbGrid grid;
    grid.width = map.width;
    grid.height = map.height;
    grid.p_ca = map.values;
    save_prob_pgm(path, grid);
}

std::vector<ScoredCell> load_scored_cells_json(const std::string& path) {
    auto in = open_input(path);
    const json j = parse_json_stream(in, path);
    if (!j.is_object()) throw InputError(path + ": top level must be an object");
    const json& arr = require_field(j, "cells", path);
    if (!arr.is_array()) throw InputError(path + ": 'cells' must be an array");

    std::vector<ScoredCell> cells;
    cells.reserve(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string context = path + ": cells[" + std::to_string(i) + "]";
        const json& c = arr[i];
        if (!c.is_object()) throw InputError(context + ": must be an object");
        ScoredCell cell;
        cell.x = require_number(c, "x", context);
        cell.y = require_number(c, "y", context);
        cell.p_tc = require_number(c, "p_tc", context);
        cell.p_bc = require_number(c, "p_bc", context);
        try {
            validate_scored_cell(cell);
        } catch (const Error& e) {
            throw InputError(context + ": " + e.what());
        }
        cells.push_back(cell);
    }
    return cells;
}

std::string scored_cells_json_string(const std::vector<ScoredCell>& cells) {
    json arr = json::array();
    for (const auto& c : cells) {
        arr.push_back(json{{"x", c.x}, {"y", c.y}, {"p_tc", c.p_tc}, {"p_bc", c.p_bc}});
    }
    return dump(json{{"cells", std::move(arr)}});
}

void save_scored_cells_json(const std::string& path, const std::vector<ScoredCell>& cells) {
    auto out = open_output(path);
    out << scored_cells_json_string(cells);
}

// --- metadata -----------------------------------------------------------------

namespace {

PatchPairMeta meta_from_json(const json& j, const std::string& context) {
    if (!j.is_object()) throw InputError(context + ": must be an object");
    PatchPairMeta m;
    m.pair_id = require_string(j, "pair_id", context);
    m.wsi_id = require_string(j, "wsi_id", context);
    m.organ = require_string(j, "organ", context);
    const std::string split = require_string(j, "split", context);
    const auto parsed = parse_split(split);
    if (!parsed) {
        throw InputError(context + ": split '" + split + "' is not train, val, or test");
    }
    m.split = *parsed;
    m.cell_offset_x = require_int(j, "cell_offset_x", context);
    m.cell_offset_y = require_int(j, "cell_offset_y", context);
    m.cell_mpp = require_number(j, "cell_mpp", context);
    m.tissue_mpp = require_number(j, "tissue_mpp", context);
    return m;
}

json meta_to_json(const PatchPairMeta& m) {
    return json{
        {"pair_id", m.pair_id},
        {"wsi_id", m.wsi_id},
        {"organ", m.organ},
        {"split", to_string(m.split)},
        {"cell_offset_x", m.cell_offset_x},
        {"cell_offset_y", m.cell_offset_y},
        {"cell_mpp", m.cell_mpp},
        {"tissue_mpp", m.tissue_mpp},
    };
}

} // namespace

PatchPairMeta load_pair_meta_json(const std::string& path) {
    auto in = open_input(path);
    return meta_from_json(parse_json_stream(in, path), path);
}

void save_pair_meta_json(const std::string& path, const PatchPairMeta& meta) {
    auto out = open_output(path);
    out << dump(meta_to_json(meta));
}

DatasetManifest parse_manifest_json(std::istream& in, const std::string& name) {
    const json j = parse_json_stream(in, name);
    if (!j.is_array()) throw InputError(name + ": manifest must be a JSON array");
    DatasetManifest manifest;
    manifest.pairs.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        manifest.pairs.push_back(meta_from_json(j[i], name + ": pairs[" + std::to_string(i) + "]"));
    }
    return manifest;
}

DatasetManifest load_manifest_json(const std::string& path) {
    auto in = open_input(path);
    return parse_manifest_json(in, path);
}

void save_manifest_json(const std::string& path, const DatasetManifest& manifest) {
    json arr = json::array();
    for (const auto& m : manifest.pairs) arr.push_back(meta_to_json(m));
    auto out = open_output(path);
    out << dump(arr);
}

// --- split directories ----------------------------------------------------------

SplitData load_split(const std::string& dir) {
    SplitData data;
    data.manifest = load_manifest_json(dir + "/manifest.json");

    std::set<std::string> seen;
    for (const auto& meta : data.manifest.pairs) {
        validate_meta(meta);
        if (!seen.insert(meta.pair_id).second) {
            throw InputError("duplicate pair_id '" + meta.pair_id + "' in " + dir +
                             "/manifest.json");
        }
        const std::string prefix = "pair '" + meta.pair_id + "': ";
        try {
            data.cells[meta.pair_id] = load_cells_csv(dir + "/annotations/" + meta.pair_id + ".csv");

            TissueGrid grid = load_tissue_pgm(dir + "/tissue/" + meta.pair_id + ".pgm");
            if (grid.width != kTissueGridSize || grid.height != kTissueGridSize) {
                throw InputError("tissue raster is " + std::to_string(grid.width) + "x" +
                                 std::to_string(grid.height) + ", expected " +
                                 std::to_string(kTissueGridSize) + "x" +
                                 std::to_string(kTissueGridSize));
            }
            grid.mpp = meta.tissue_mpp;
            data.grids[meta.pair_id] = std::move(grid);

            const std::string prob_path = dir + "/tissue_prob/" + meta.pair_id + ".pgm";
            if (fs::exists(prob_path)) {
                TissueProbGrid prob = load_prob_pgm(prob_path);
                if (prob.width != kTissueGridSize || prob.height != kTissueGridSize) {
                    throw InputError("probability raster is " + std::to_string(prob.width) + "x" +
                                     std::to_string(prob.height) + ", expected " +
                                     std::to_string(kTissueGridSize) + "x" +
                                     std::to_string(kTissueGridSize));
                }
                prob.mpp = meta.tissue_mpp;
                data.probs[meta.pair_id] = std::move(prob);
            }
        } catch (const Error& e) {
            throw InputError(prefix + e.what());
        }
        data.metas[meta.pair_id] = meta;
    }
    return data;
}

void save_split(const std::string& dir, const SplitData& data) {
    fs::create_directories(dir + "/annotations");
    fs::create_directories(dir + "/tissue");
    if (!data.probs.empty()) fs::create_directories(dir + "/tissue_prob");

    save_manifest_json(dir + "/manifest.json", data.manifest);
    for (const auto& meta : data.manifest.pairs) {
        const auto cells = data.cells.find(meta.pair_id);
        save_cells_csv(dir + "/annotations/" + meta.pair_id + ".csv",
                       cells == data.cells.end() ? std::vector<GroundTruthCell>{} : cells->second);
        const auto grid = data.grids.find(meta.pair_id);
        if (grid == data.grids.end()) {
            throw InputError("no tissue grid for pair '" + meta.pair_id + "'");
        }
        save_tissue_pgm(dir + "/tissue/" + meta.pair_id + ".pgm", grid->second);
        const auto prob = data.probs.find(meta.pair_id);
        if (prob != data.probs.end()) {
            save_prob_pgm(dir + "/tissue_prob/" + meta.pair_id + ".pgm", prob->second);
        }
    }
}

PerImageAnnotations to_annotations(const SplitData& data) {
    PerImageAnnotations out;
    out.cells = data.cells;
    out.grids = data.grids;
    out.metas = data.metas;
    return out;
}

// --- reports ---------------------------------------------------------------------

std::string report_json(const EvalReport& report) { return dump(report_obj(report)); }

std::string grouped_report_json(const std::map<std::string, EvalReport>& groups,
                                const EvalReport& overall) {
    json g = json::object();
    for (const auto& [name, r] : groups) g[name] = report_obj(r);
    return dump(json{{"groups", std::move(g)}, {"overall", report_obj(overall)}});
}

std::string ci_json(const ConfidenceInterval& ci, Statistic stat, int iterations, double level,
                    std::uint64_t seed) {
    return dump(json{
        {"statistic", to_string(stat)},
        {"point", sig6(ci.point)},
        {"lo", sig6(ci.lo)},
        {"hi", sig6(ci.hi)},
        {"iterations", iterations},
        {"level", sig6(level)},
        {"seed", seed},
    });
}

std::string rank_json(const RankMatrix& m) {
    return dump(json{{"teams", m.teams}, {"probability", matrix_obj(m.probability)}});
}

std::string pairwise_json(const PairwiseMatrix& m) {
    return dump(json{{"teams", m.teams}, {"probability", matrix_obj(m.probability)}});
}

std::string cooccur_json(const CooccurrenceTable& table) {
    json counts = json::object();
    for (CellClass c : {CellClass::BC, CellClass::TC}) {
        counts[to_string(c)] = json{
            {"bg", table.of(c, TissueClass::BG)},
            {"ca", table.of(c, TissueClass::CA)},
            {"unk", table.of(c, TissueClass::UNK)},
        };
    }
    json rates = json::object();
    for (CellClass c : {CellClass::BC, CellClass::TC}) {
        for (TissueClass t : {TissueClass::BG, TissueClass::CA}) {
            const std::string key =
                std::string("p_") + to_string(c) + "_given_" + to_string(t);
            const auto rate = table.rate(c, t);
            rates[key] = rate ? json(sig6(*rate)) : json(nullptr);
        }
    }
    return dump(json{
        {"counts", std::move(counts)},
        {"rates", std::move(rates)},
        {"total_excluding_unk", table.total_excluding_unk()},
    });
}

std::string subgroup_report_json(const EvalReport& report, TissueClass region,
                                 SubgroupSemantics semantics) {
    json j = report_obj(report);
    j["region"] = to_string(region);
    j["semantics"] = semantics == SubgroupSemantics::FilterFirst ? "filter" : "attribute";
    return dump(j);
}

std::string validation_json(const ValidationReport& report, const ManifestCounts& counts) {
    json violations = json::array();
    for (const auto& v : report.violations) {
        violations.push_back(json{
            {"kind", kind_name(v.kind)},
            {"subject", v.subject},
            {"message", v.message},
        });
    }
    json per_organ = json::object();
    for (const auto& [organ, c] : counts.per_organ) {
        per_organ[organ] = json{{"train", c[0]}, {"val", c[1]}, {"test", c[2]}};
    }
    return dump(json{
        {"pair_count", report.pair_count},
        {"totals",
         {{"train", counts.totals[0]}, {"val", counts.totals[1]}, {"test", counts.totals[2]}}},
        {"per_organ", std::move(per_organ)},
        {"violations", std::move(violations)},
    });
}

std::string report_csv(const EvalReport& report) {
    std::ostringstream out;
    out << "class,tp,fp,fn,precision,recall,f1\n";
    for (CellClass c : {CellClass::BC, CellClass::TC}) {
        const auto& cnt = report.counts.of(c);
        const auto& m = report.metrics.of(c);
        out << to_string(c) << ',' << cnt.tp << ',' << cnt.fp << ',' << cnt.fn << ','
            << fmt6(m.precision) << ',' << fmt6(m.recall) << ',' << fmt6(m.f1) << '\n';
    }
    out << "mean,,,,,," << fmt6(report.mean_f1) << '\n';
    return out.str();
}

std::string ci_csv(const ConfidenceInterval& ci, Statistic stat) {
    std::ostringstream out;
    out << "statistic,point,lo,hi\n";
    out << to_string(stat) << ',' << fmt6(ci.point) << ',' << fmt6(ci.lo) << ',' << fmt6(ci.hi)
        << '\n';
    return out.str();
}

std::string rank_csv(const RankMatrix& m) {
    std::ostringstream out;
    out << "team";
    for (std::size_t r = 0; r < m.teams.size(); ++r) out << ",rank" << (r + 1);
    out << '\n';
    for (std::size_t t = 0; t < m.teams.size(); ++t) {
        out << m.teams[t];
        for (std::size_t r = 0; r < m.probability.size(); ++r) {
            out << ',' << fmt6(m.probability[r][t]);
        }
        out << '\n';
    }
    return out.str();
}

std::string pairwise_csv(const PairwiseMatrix& m) {
    std::ostringstream out;
    out << "team";
    for (const auto& t : m.teams) out << ',' << t;
    out << '\n';
    for (std::size_t i = 0; i < m.teams.size(); ++i) {
        out << m.teams[i];
        for (std::size_t j = 0; j < m.teams.size(); ++j) out << ',' << fmt6(m.probability[i][j]);
        out << '\n';
    }
    return out.str();
}

} // namespace celleval
