#pragma once

#include <cstdint>
#include <vector>

#include "celleval/types.hpp"

namespace celleval {

// Dense per-pixel class raster: 0 = background, 1 = BC, 2 = TC.
struct LabelMap {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> labels;

    LabelMap() = default;
    LabelMap(int w, int h) : width(w), height(h), labels(static_cast<std::size_t>(w) * h, 0) {}

    std::uint8_t at(int x, int y) const {
        return labels[static_cast<std::size_t>(y) * width + x];
    }
    std::uint8_t& at(int x, int y) {
        return labels[static_cast<std::size_t>(y) * width + x];
    }
};

// Single-class probability raster, values in [0,1].
struct Heatmap {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    Heatmap() = default;
    Heatmap(int w, int h) : width(w), height(h), values(static_cast<std::size_t>(w) * h, 0.0) {}

    double at(int x, int y) const {
        return values[static_cast<std::size_t>(y) * width + x];
    }
    double& at(int x, int y) {
        return values[static_cast<std::size_t>(y) * width + x];
    }
};

inline constexpr double kDefaultDiskRadiusUm = 1.4;   // 7 px at 0.2 MPP
inline constexpr double kDefaultGaussianSigmaUm = 1.14; // 5.7 px at 0.2 MPP
inline constexpr double kGaussianSupportSigmas = 3.5;  // hard truncation radius

// Rasterize point annotations as filled disks. A pixel takes the class of
// the nearest center within radius (ties: the center with smaller (y,x)).
LabelMap points_to_disks(const std::vector<GroundTruthCell>& cells,
                         double radius_um = kDefaultDiskRadiusUm,
                         double mpp = kCellMpp,
                         int size = kCellPatchSize);

// Rasterize point annotations as per-class Gaussian heatmaps: amplitude 1 at
// the center, max-combined across same-class cells, zero beyond 3.5 sigma.
PerClass<Heatmap> points_to_gaussians(const std::vector<GroundTruthCell>& cells,
                                      double sigma_um = kDefaultGaussianSigmaUm,
                                      double mpp = kCellMpp,
                                      int size = kCellPatchSize);

// Non-maximum suppression over one class map. Candidates are 8-neighborhood
// local maxima with value >= threshold; they are accepted in descending
// value order (ties: smaller (y,x)), dropping any candidate within
// min_distance_px of an already accepted peak. Confidence = peak value.
std::vector<PredictedCell> peaks_from_heatmap(const Heatmap& h,
                                              CellClass cls,
                                              double min_distance_px,
                                              double threshold);

// Per-class NMS over both maps; BC peaks precede TC peaks in the output.
std::vector<PredictedCell> peaks_from_heatmaps(const PerClass<Heatmap>& maps,
                                               double min_distance_px,
                                               double threshold);

} // namespace celleval
