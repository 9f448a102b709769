#include "celleval/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

namespace celleval {

namespace {

void require_in_extent(double v, const char* axis) {
    if (!(v >= 0.0 && v < kCellPatchSize)) {
        throw BoundsError(std::string("cell-frame ") + axis + " coordinate " + std::to_string(v) +
                          " outside [0, " + std::to_string(kCellPatchSize) + ")");
    }
}

void require_tissue_grid_shape(int width, int height) {
    if (width != kTissueGridSize || height != kTissueGridSize) {
        throw InputError("tissue grid is " + std::to_string(width) + "x" + std::to_string(height) +
                         ", expected " + std::to_string(kTissueGridSize) + "x" +
                         std::to_string(kTissueGridSize));
    }
}

} // namespace

TissueIndex cell_to_tissue_index(double x, double y, const PatchPairMeta& meta) {
    require_in_extent(x, "x");
    require_in_extent(y, "y");
    const double factor = meta.tissue_mpp / meta.cell_mpp;
    return TissueIndex{
        static_cast<int>(std::floor((x + meta.cell_offset_x) / factor)),
        static_cast<int>(std::floor((y + meta.cell_offset_y) / factor)),
    };
}

TissueClass tissue_class_at(double x, double y, const TissueGrid& grid, const PatchPairMeta& meta) {
    require_tissue_grid_shape(grid.width, grid.height);
    const TissueIndex idx = cell_to_tissue_index(x, y, meta);
    return grid.at(idx.col, idx.row);
}

double tissue_prob_at(double x, double y, const TissueProbGrid& grid, const PatchPairMeta& meta) {
    require_tissue_grid_shape(grid.width, grid.height);
    const TissueIndex idx = cell_to_tissue_index(x, y, meta);
    return grid.at(idx.col, idx.row);
}

TissueProbGrid aligned_tissue_crop(const TissueProbGrid& src, const PatchPairMeta& meta, Interp mode) {
    require_tissue_grid_shape(src.width, src.height);
    const double factor = meta.tissue_mpp / meta.cell_mpp;

    TissueProbGrid out;
    out.width = kCellPatchSize;
    out.height = kCellPatchSize;
    out.mpp = meta.cell_mpp;
    out.p_ca.resize(static_cast<std::size_t>(kCellPatchSize) * kCellPatchSize);

    if (mode == Interp::Nearest) {
        for (int y = 0; y < kCellPatchSize; ++y) {
            const int row = static_cast<int>(std::floor((y + meta.cell_offset_y) / factor));
            for (int x = 0; x < kCellPatchSize; ++x) {
                const int col = static_cast<int>(std::floor((x + meta.cell_offset_x) / factor));
                out.at(x, y) = src.at(col, row);
            }
        }
        return out;
    }

    // Bilinear between source pixel centers: source pixel i covers
    // [i*factor, (i+1)*factor) in the offset cell frame, center at i + 0.5
    // in source coordinates.
    const auto sample_axis = [&](double v) {
        double u = v / factor - 0.5;
        u = std::clamp(u, 0.0, static_cast<double>(kTissueGridSize - 1));
        const int i0 = static_cast<int>(std::floor(u));
        const int i1 = std::min(i0 + 1, kTissueGridSize - 1);
        return std::tuple<int, int, double>(i0, i1, u - i0);
    };
    for (int y = 0; y < kCellPatchSize; ++y) {
        const auto [r0, r1, fy] = sample_axis(y + meta.cell_offset_y);
        for (int x = 0; x < kCellPatchSize; ++x) {
            const auto [c0, c1, fx] = sample_axis(x + meta.cell_offset_x);
            const double top = src.at(c0, r0) * (1.0 - fx) + src.at(c1, r0) * fx;
            const double bottom = src.at(c0, r1) * (1.0 - fx) + src.at(c1, r1) * fx;
            out.at(x, y) = top * (1.0 - fy) + bottom * fy;
        }
    }
    return out;
}

TissueGrid aligned_label_crop(const TissueGrid& src, const PatchPairMeta& meta) {
    require_tissue_grid_shape(src.width, src.height);
    const double factor = meta.tissue_mpp / meta.cell_mpp;

    TissueGrid out;
    out.width = kCellPatchSize;
    out.height = kCellPatchSize;
    out.mpp = meta.cell_mpp;
    out.labels.resize(static_cast<std::size_t>(kCellPatchSize) * kCellPatchSize);
    for (int y = 0; y < kCellPatchSize; ++y) {
        const int row = static_cast<int>(std::floor((y + meta.cell_offset_y) / factor));
        for (int x = 0; x < kCellPatchSize; ++x) {
            const int col = static_cast<int>(std::floor((x + meta.cell_offset_x) / factor));
            out.at(x, y) = src.at(col, row);
        }
    }
    return out;
}

} // namespace celleval
