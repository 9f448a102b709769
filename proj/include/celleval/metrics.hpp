#pragma once

#include <map>
#include <string>
#include <vector>

#include "celleval/matching.hpp"
#include "celleval/types.hpp"

namespace celleval {

// Precision, recall, and their harmonic mean. Degenerate denominators
// (no predictions, no ground truths, or P + R = 0) resolve to 0.
ClassMetrics class_metrics(const MatchCounts& counts);

struct EvalReport {
    PerClass<MatchCounts> counts;
    PerClass<ClassMetrics> metrics;
    double mean_f1 = 0.0;

    bool operator==(const EvalReport&) const = default;
};

EvalReport report_from_counts(const PerClass<MatchCounts>& pooled);

using ImagePredictions = std::map<std::string, std::vector<PredictedCell>>;
using ImageGroundTruth = std::map<std::string, std::vector<GroundTruthCell>>;
using ImageCounts = std::map<std::string, PerClass<MatchCounts>>;

// Per-image matching across a split. Every ground-truth image is evaluated;
// an image absent from the predictions contributes zero predictions (its
// ground truths all become FN). A prediction image id that is not in the
// ground truth is an input error listing the offending ids.
ImageCounts per_image_counts(const ImagePredictions& preds,
                             const ImageGroundTruth& gts,
                             double radius_px = kDefaultRadiusPx,
                             int jobs = 1);

// Pools TP/FP/FN over the split per class, then derives the metrics and
// mF1 = (F1_BC + F1_TC) / 2.
EvalReport evaluate_split(const ImagePredictions& preds,
                          const ImageGroundTruth& gts,
                          double radius_px = kDefaultRadiusPx,
                          int jobs = 1);

// Split-level report per group (e.g. organ). group_of maps image_id to a
// group name; every ground-truth image must be mapped.
std::map<std::string, EvalReport> evaluate_grouped(const ImagePredictions& preds,
                                                   const ImageGroundTruth& gts,
                                                   const std::map<std::string, std::string>& group_of,
                                                   double radius_px = kDefaultRadiusPx,
                                                   int jobs = 1);

} // namespace celleval
