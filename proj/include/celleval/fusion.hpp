#pragma once

#include <vector>

#include "celleval/types.hpp"

namespace celleval {

// A detected cell with raw class scores, before the class decision.
struct ScoredCell {
    double x = 0.0;
    double y = 0.0;
    double p_tc = 0.0;
    double p_bc = 0.0;
};

// Scores must each lie in [0,1] and sum into (0, 1+1e-9]. Throws InputError.
void validate_scored_cell(const ScoredCell& cell);

// Same cell with scores scaled to sum to exactly 1.
ScoredCell normalized(const ScoredCell& cell);

// Class decision without tissue input: argmax of the normalized scores
// (ties go to BC), confidence = the winning score.
PredictedCell argmax_cell(const ScoredCell& cell);

// Forces each cell's class from the tissue label under it: CA regions emit
// TC, BG regions emit BC, UNK regions leave the argmax decision untouched.
// Positions are preserved; confidence is the (normalized) probability of the
// emitted class, floored at 0.5 for forced decisions so they never rank
// below unforced ones.
std::vector<PredictedCell> extreme_fusion(const std::vector<ScoredCell>& cells,
                                          const TissueGrid& tissue,
                                          const PatchPairMeta& meta);

// Probability-grid variant: p_ca >= threshold reads as CA, else BG.
std::vector<PredictedCell> extreme_fusion(const std::vector<ScoredCell>& cells,
                                          const TissueProbGrid& tissue,
                                          const PatchPairMeta& meta,
                                          double threshold = 0.5);

// Blends cell and tissue class distributions by the cell's own decision
// margin w = |p_tc - p_bc|: out_c = w*p_c + (1-w)*t_c with t_tc = p_ca and
// t_bc = 1 - p_ca at the cell's location, renormalized. Confident cells
// (w=1) pass through unchanged; undecided ones (w=0) take the tissue's view.
std::vector<ScoredCell> adaptive_fusion(const std::vector<ScoredCell>& cells,
                                        const TissueProbGrid& tissue,
                                        const PatchPairMeta& meta);

// One-directional revision: a cell whose argmax class is TC sitting on
// confident background (1 - p_ca >= tau) is flipped to BC. Everything else
// is the plain argmax decision. Confidence = max normalized score, flipped
// or not.
std::vector<PredictedCell> background_revision(const std::vector<ScoredCell>& cells,
                                               const TissueProbGrid& tissue,
                                               const PatchPairMeta& meta,
                                               double tau = 0.5);

} // namespace celleval
