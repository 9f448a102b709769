#pragma once

#include <cstdint>
#include <vector>

#include "celleval/matching.hpp"
#include "celleval/types.hpp"

namespace celleval {

// Disc-union tissue layout: CA blobs on a BG field, optionally ringed by an
// UNK border band.
struct TissueSynthParams {
    int size = kTissueGridSize;
    int n_blobs = 8;
    double radius_min_px = 40.0;
    double radius_max_px = 200.0;
    int unk_border_px = 0;
};

TissueGrid gen_tissue(std::uint64_t seed, const TissueSynthParams& params = {});

// Cell placement over a tissue grid. Density counts cells per megapixel of
// the cell patch; classes are sampled from the per-region probabilities.
struct CellSynthParams {
    double density_per_mpx = 300.0;
    double p_tc_given_ca = 0.885;
    double p_bc_given_bg = 0.917;
    double min_sep_px = 0.0;
    int max_attempts_per_cell = 1000;
};

// Rejection-sampled integer positions in the cell frame; candidates over UNK
// or within min_sep_px of an accepted cell are re-drawn. Throws ParamError
// when a cell cannot be placed within the attempt budget (density infeasible
// for the separation constraint).
std::vector<GroundTruthCell> gen_cells(const TissueGrid& grid,
                                       const PatchPairMeta& meta,
                                       const CellSynthParams& params,
                                       std::uint64_t seed);

// Prediction noise model. Each ground truth is independently dropped, else
// jittered (per-axis Gaussian, clamped to 3 sigma and to the patch) and
// class-flipped; spurious detections are added per class at distance
// > radius_px from every ground truth of that class.
struct PerturbParams {
    double drop_rate = 0.0;
    double jitter_sigma_px = 0.0;
    double spurious_rate = 0.0;
    double class_flip_rate = 0.0;
};

struct PerturbResult {
    std::vector<PredictedCell> predictions;
    // Counts the evaluator must produce. Exact (zero tolerance) whenever
    // `exact` is set: jitter displacement is capped below radius_px
    // (3*sigma*sqrt(2) < radius) and all ground-truth pairs are separated by
    // more than 2*radius_px, so every kept prediction can only match its own
    // source cell.
    PerClass<MatchCounts> expected;
    bool exact = false;
};

PerturbResult perturb_to_predictions(const std::vector<GroundTruthCell>& gts,
                                     const PerturbParams& params,
                                     std::uint64_t seed,
                                     double radius_px = kDefaultRadiusPx,
                                     int patch_size = kCellPatchSize);

} // namespace celleval
