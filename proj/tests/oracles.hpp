#pragma once

#include <cstdint>
#include <vector>

#include "celleval/matching.hpp"
#include "celleval/statistics.hpp"
#include "celleval/types.hpp"

// Independent reference implementations used to cross-check the library.
// Deliberately naive: linear scans, no acceleration structures, and (for the
// resampler) the standard library's own RNG machinery.
namespace oracle {

// Greedy confidence-ordered matcher, written as a direct linear-scan
// transcription of the procedure: walk predictions in descending confidence
// (ties by ascending (y, x), then input index), give each its nearest
// remaining ground truth of the same class (ties by ascending (y, x), then
// index), count a hit iff the distance is within radius, and remove claimed
// ground truths. O(preds * gts).
celleval::MatchResult match_reference(const std::vector<celleval::PredictedCell>& preds,
                                      const std::vector<celleval::GroundTruthCell>& gts,
                                      double radius_px);

// Percentile bootstrap built on std::mt19937_64 and its integer
// distribution; shares nothing with the library's counter RNG or its
// scheduling. Suitable only for distribution-level comparisons.
celleval::ConfidenceInterval bootstrap_reference(
    const std::vector<celleval::PerClass<celleval::MatchCounts>>& per_image,
    celleval::Statistic stat,
    int n_iter,
    double level,
    std::uint64_t seed);

} // namespace oracle
