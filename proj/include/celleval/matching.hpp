#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "celleval/types.hpp"

namespace celleval {

// 3 um at 0.2 MPP resolves to 15 px. Small snap clears the quotient of
// division noise so stated physical radii land on exact pixel values.
double radius_px_from_um(double radius_um, double mpp);

inline constexpr double kDefaultRadiusUm = 3.0;
inline constexpr double kDefaultRadiusPx = 15.0;

struct MatchResult {
    MatchCounts counts;
    // (prediction index, ground-truth index) pairs into the input vectors.
    std::vector<std::pair<std::size_t, std::size_t>> matches;
};

// Greedy matching for one cell class: predictions are visited in descending
// confidence order; each claims its nearest remaining ground-truth cell if
// that cell lies within radius_px (distance equal to the radius is a hit),
// which is then removed from the pool. Unclaimed predictions are FP,
// unclaimed ground truths FN.
//
// Ties are deterministic: equal confidences order by (y, x) ascending then
// input index; equidistant ground truths resolve to the smallest (y, x),
// then index. Internally accelerated with a uniform bucket grid (bucket edge
// = radius) and lazy deletion; results are identical to a linear scan.
MatchResult match_class(const std::vector<PredictedCell>& preds,
                        const std::vector<GroundTruthCell>& gts,
                        double radius_px = kDefaultRadiusPx);

// Partitions mixed-class inputs and matches each class independently; a
// prediction never matches a ground truth of the other class.
PerClass<MatchCounts> match_all(const std::vector<PredictedCell>& preds,
                                const std::vector<GroundTruthCell>& gts,
                                double radius_px = kDefaultRadiusPx);

} // namespace celleval
