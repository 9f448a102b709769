#pragma once

#include "celleval/types.hpp"

namespace celleval {

struct TissueIndex {
    int col = 0;
    int row = 0;

    bool operator==(const TissueIndex&) const = default;
};

// Maps a cell-frame point to the tissue grid cell containing it:
// floor((coord + offset) / 4). Throws BoundsError (naming the axis) when the
// point is outside the cell patch.
TissueIndex cell_to_tissue_index(double x, double y, const PatchPairMeta& meta);

// Tissue label under a cell-frame point. Grid dimensions must match the
// standard tissue grid size.
TissueClass tissue_class_at(double x, double y, const TissueGrid& grid, const PatchPairMeta& meta);

// Cancer probability under a cell-frame point (nearest, same indexing as
// tissue_class_at).
double tissue_prob_at(double x, double y, const TissueProbGrid& grid, const PatchPairMeta& meta);

enum class Interp { Nearest, Bilinear };

// Resamples the full tissue probability grid to the cell frame: output pixel
// (x, y) reads the source at ((x + offset_x)/4, (y + offset_y)/4). Nearest
// picks the containing source pixel (same indexing as tissue_class_at);
// bilinear interpolates between source pixel centers with edge clamping.
// The result is 1024x1024 at 0.2 MPP.
TissueProbGrid aligned_tissue_crop(const TissueProbGrid& src, const PatchPairMeta& meta, Interp mode);

// Label-grid counterpart; labels are categorical so only nearest applies.
TissueGrid aligned_label_crop(const TissueGrid& src, const PatchPairMeta& meta);

} // namespace celleval
