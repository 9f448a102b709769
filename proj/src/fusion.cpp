#include "celleval/fusion.hpp"

#include <algorithm>
#include <string>

#include "celleval/error.hpp"
#include "celleval/geometry.hpp"

namespace celleval {

namespace {

constexpr double kSumSlack = 1e-9;

std::string describe(const ScoredCell& cell) {
    return "cell at (" + std::to_string(cell.x) + ", " + std::to_string(cell.y) + ")";
}

PredictedCell forced(const ScoredCell& cell, CellClass cls) {
    const ScoredCell n = normalized(cell);
    const double p = cls == CellClass::TC ? n.p_tc : n.p_bc;
    return PredictedCell{cell.x, cell.y, cls, std::max(0.5, p)};
}

} // namespace

void validate_scored_cell(const ScoredCell& cell) {
    if (!(cell.p_tc >= 0.0 && cell.p_tc <= 1.0)) {
        throw InputError(describe(cell) + " has p_tc " + std::to_string(cell.p_tc) +
                         " outside [0, 1]");
    }
    if (!(cell.p_bc >= 0.0 && cell.p_bc <= 1.0)) {
        throw InputError(describe(cell) + " has p_bc " + std::to_string(cell.p_bc) +
                         " outside [0, 1]");
    }
    const double sum = cell.p_tc + cell.p_bc;
    if (!(sum > 0.0 && sum <= 1.0 + kSumSlack)) {
        throw InputError(describe(cell) + " has score sum " + std::to_string(sum) +
                         " outside (0, 1]");
    }
}

ScoredCell normalized(const ScoredCell& cell) {
    validate_scored_cell(cell);
    const double sum = cell.p_tc + cell.p_bc;
    return ScoredCell{cell.x, cell.y, cell.p_tc / sum, cell.p_bc / sum};
}

PredictedCell argmax_cell(const ScoredCell& cell) {
    const ScoredCell n = normalized(cell);
    // Ties resolve to BC.
    const CellClass cls = n.p_tc > n.p_bc ? CellClass::TC : CellClass::BC;
    return PredictedCell{cell.x, cell.y, cls, std::max(n.p_tc, n.p_bc)};
}

std::vector<PredictedCell> extreme_fusion(const std::vector<ScoredCell>& cells,
                                          const TissueGrid& tissue,
                                          const PatchPairMeta& meta) {
    std::vector<PredictedCell> out;
    out.reserve(cells.size());
    for (const auto& cell : cells) {
        switch (tissue_class_at(cell.x, cell.y, tissue, meta)) {
            case TissueClass::CA: out.push_back(forced(cell, CellClass::TC)); break;
            case TissueClass::BG: out.push_back(forced(cell, CellClass::BC)); break;
            default: out.push_back(argmax_cell(cell)); break;
        }
    }
    return out;
}

std::vector<PredictedCell> extreme_fusion(const std::vector<ScoredCell>& cells,
                                          const TissueProbGrid& tissue,
                                          const PatchPairMeta& meta,
                                          double threshold) {
    if (!(threshold >= 0.0 && threshold <= 1.0)) {
        throw ParamError("threshold must be in [0, 1]");
    }
    std::vector<PredictedCell> out;
    out.reserve(cells.size());
    for (const auto& cell : cells) {
        const bool cancer = tissue_prob_at(cell.x, cell.y, tissue, meta) >= threshold;
        out.push_back(forced(cell, cancer ? CellClass::TC : CellClass::BC));
    }
    return out;
}

std::vector<ScoredCell> adaptive_fusion(const std::vector<ScoredCell>& cells,
                                        const TissueProbGrid& tissue,
                                        const PatchPairMeta& meta) {
    std::vector<ScoredCell> out;
    out.reserve(cells.size());
    for (const auto& cell : cells) {
        const ScoredCell n = normalized(cell);
        const double t_tc = tissue_prob_at(cell.x, cell.y, tissue, meta);
        const double t_bc = 1.0 - t_tc;
        const double w = std::abs(n.p_tc - n.p_bc);
        double out_tc = w * n.p_tc + (1.0 - w) * t_tc;
        double out_bc = w * n.p_bc + (1.0 - w) * t_bc;
        const double sum = out_tc + out_bc;
        if (sum > 0.0) {
            out_tc /= sum;
            out_bc /= sum;
        } else {
            out_tc = out_bc = 0.5;
        }
        out.push_back(ScoredCell{cell.x, cell.y, out_tc, out_bc});
    }
    return out;
}

std::vector<PredictedCell> background_revision(const std::vector<ScoredCell>& cells,
                                               const TissueProbGrid& tissue,
                                               const PatchPairMeta& meta,
                                               double tau) {
    if (!(tau >= 0.0 && tau <= 1.0)) {
        throw ParamError("tau must be in [0, 1]");
    }
    std::vector<PredictedCell> out;
    out.reserve(cells.size());
    for (const auto& cell : cells) {
        PredictedCell decided = argmax_cell(cell);
        if (decided.cls == CellClass::TC) {
            const double p_bg = 1.0 - tissue_prob_at(cell.x, cell.y, tissue, meta);
            if (p_bg >= tau) decided.cls = CellClass::BC;
        }
        out.push_back(decided);
    }
    return out;
}

} // namespace celleval
