#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "celleval/matching.hpp"
#include "celleval/metrics.hpp"
#include "celleval/types.hpp"

namespace celleval {

// Tissue region under each cell, in input order. Cells over UNK are tagged
// UNK; downstream consumers exclude them.
std::vector<TissueClass> assign_regions(const std::vector<GroundTruthCell>& cells,
                                        const TissueGrid& grid,
                                        const PatchPairMeta& meta);
std::vector<TissueClass> assign_regions(const std::vector<PredictedCell>& cells,
                                        const TissueGrid& grid,
                                        const PatchPairMeta& meta);

struct CooccurrenceTable {
    // counts[cell class][tissue class in {BG, CA, UNK}].
    PerClass<std::array<long long, 3>> counts{};

    long long of(CellClass c, TissueClass t) const;
    long long& of(CellClass c, TissueClass t);

    // P(cell class | tissue class) over annotated cells, UNK excluded.
    // Absent when the tissue class holds no cells.
    std::optional<double> rate(CellClass c, TissueClass t) const;
    long long total_excluding_unk() const;
};

struct PerImageAnnotations {
    std::map<std::string, std::vector<GroundTruthCell>> cells;
    std::map<std::string, TissueGrid> grids;
    std::map<std::string, PatchPairMeta> metas;
};

// Cell/tissue co-occurrence over annotated cells.
CooccurrenceTable cooccurrence_table(const PerImageAnnotations& data);

// Cross-region pairs: filter both sets to the region before matching (a
// pred/GT pair in different regions counts FP + FN), or match globally and
// attribute TPs to the ground truth's region afterwards.
enum class SubgroupSemantics { FilterFirst, MatchThenAttribute };

// Region-conditioned evaluation: predictions and ground truths are both
// restricted to cells located in `region` (UNK always excluded), matched,
// and pooled across images.
EvalReport subgroup_evaluate(const ImagePredictions& preds,
                             const PerImageAnnotations& data,
                             TissueClass region,
                             double radius_px = kDefaultRadiusPx,
                             SubgroupSemantics semantics = SubgroupSemantics::FilterFirst);

} // namespace celleval
