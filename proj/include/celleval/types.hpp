#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "celleval/error.hpp"

namespace celleval {

// Frame constants. Cell patches are 1024x1024 at 0.2 MPP; each sits inside a
// 4096x4096 native-resolution tissue region that is shipped as a 1024x1024
// grid at 0.8 MPP (4x downsample).
inline constexpr int kCellPatchSize = 1024;
inline constexpr int kTissueNativeSize = 4096;
inline constexpr int kTissueGridSize = 1024;
inline constexpr double kCellMpp = 0.2;
inline constexpr double kTissueMpp = 0.8;
inline constexpr double kDownsampleFactor = 4.0;

// On-disk class ids (see io module): cells 1=BC, 2=TC; tissue 1=BG, 2=CA, 255=UNK.
enum class CellClass : std::uint8_t { BC = 1, TC = 2 };
enum class TissueClass : std::uint8_t { BG = 1, CA = 2, UNK = 255 };

inline const char* to_string(CellClass c) { return c == CellClass::BC ? "bc" : "tc"; }
inline const char* to_string(TissueClass t) {
    switch (t) {
        case TissueClass::BG: return "bg";
        case TissueClass::CA: return "ca";
        default: return "unk";
    }
}

// Holder for anything kept once per cell class.
template <typename T>
struct PerClass {
    T bc{};
    T tc{};

    T& of(CellClass c) { return c == CellClass::BC ? bc : tc; }
    const T& of(CellClass c) const { return c == CellClass::BC ? bc : tc; }

    bool operator==(const PerClass&) const = default;
};

// Annotated cell: integer click point in the cell frame.
struct GroundTruthCell {
    int x = 0;
    int y = 0;
    CellClass cls = CellClass::BC;

    bool operator==(const GroundTruthCell&) const = default;
};

// Model detection: sub-pixel position plus confidence in [0,1].
struct PredictedCell {
    double x = 0.0;
    double y = 0.0;
    CellClass cls = CellClass::BC;
    double confidence = 0.0;

    bool operator==(const PredictedCell&) const = default;
};

// Pixel-wise tissue labels, row-major, tissue frame (0.8 MPP).
struct TissueGrid {
    int width = kTissueGridSize;
    int height = kTissueGridSize;
    double mpp = kTissueMpp;
    std::vector<TissueClass> labels;

    TissueClass at(int col, int row) const { return labels[static_cast<std::size_t>(row) * width + col]; }
    TissueClass& at(int col, int row) { return labels[static_cast<std::size_t>(row) * width + col]; }

    bool operator==(const TissueGrid&) const = default;
};

// Cancer-probability raster, values in [0,1], row-major.
struct TissueProbGrid {
    int width = kTissueGridSize;
    int height = kTissueGridSize;
    double mpp = kTissueMpp;
    std::vector<double> p_ca;

    double at(int col, int row) const { return p_ca[static_cast<std::size_t>(row) * width + col]; }
    double& at(int col, int row) { return p_ca[static_cast<std::size_t>(row) * width + col]; }

    bool operator==(const TissueProbGrid&) const = default;
};

enum class Split : std::uint8_t { Train, Val, Test };

const char* to_string(Split s);
std::optional<Split> parse_split(const std::string& s);

// Geometric coupling between one cell patch and its enclosing tissue patch.
// Offsets are in the tissue patch's full-resolution (0.2 MPP, 4096^2) frame.
struct PatchPairMeta {
    std::string pair_id;
    std::string wsi_id;
    std::string organ;
    Split split = Split::Train;
    int cell_offset_x = 0;
    int cell_offset_y = 0;
    double cell_mpp = kCellMpp;
    double tissue_mpp = kTissueMpp;

    bool operator==(const PatchPairMeta&) const = default;
};

// TP/FP/FN tallies for one class.
struct MatchCounts {
    long long tp = 0;
    long long fp = 0;
    long long fn = 0;

    MatchCounts& operator+=(const MatchCounts& o) {
        tp += o.tp;
        fp += o.fp;
        fn += o.fn;
        return *this;
    }
    friend MatchCounts operator+(MatchCounts a, const MatchCounts& b) { return a += b; }
    bool operator==(const MatchCounts&) const = default;
};

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;

    bool operator==(const ClassMetrics&) const = default;
};

struct DatasetManifest {
    std::vector<PatchPairMeta> pairs;

    bool operator==(const DatasetManifest&) const = default;
};

// Validation helpers. Loading a dataset enforces these (throws); the manifest
// validator collects them as report entries instead.
void validate_cell(const GroundTruthCell& c);
void validate_cell(const PredictedCell& c);
void validate_grid(const TissueGrid& g);
void validate_grid(const TissueProbGrid& g);
void validate_meta(const PatchPairMeta& m);

// Human-readable invariant failures for one pair, empty when valid.
std::vector<std::string> check_meta(const PatchPairMeta& m);

struct Violation {
    enum class Kind { DuplicatePairId, SplitLeakage, RatioDeviation, Geometry };
    Kind kind;
    std::string subject; // pair_id, wsi_id, or organ, depending on kind
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    long long pair_count = 0;

    long long count(Violation::Kind k) const;
};

// Splits must partition WSIs; per-organ split sizes should track 6:2:2 within
// `ratio_tolerance` pairs; every pair's geometry invariants must hold.
// Problems are report entries, never exceptions.
ValidationReport validate_manifest(const DatasetManifest& manifest, double ratio_tolerance = 1.0);

// Per-split / per-organ pair counts.
struct ManifestCounts {
    std::vector<std::pair<std::string, std::array<long long, 3>>> per_organ; // organ -> {train,val,test}
    std::array<long long, 3> totals{0, 0, 0};
};

ManifestCounts manifest_counts(const DatasetManifest& manifest);

} // namespace celleval
