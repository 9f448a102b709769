#include "celleval/subgroup.hpp"

#include "celleval/geometry.hpp"

namespace celleval {

namespace {

std::size_t tissue_slot(TissueClass t) {
    switch (t) {
        case TissueClass::BG: return 0;
        case TissueClass::CA: return 1;
        default: return 2;
    }
}

const PatchPairMeta& meta_for(const PerImageAnnotations& data, const std::string& id) {
    const auto it = data.metas.find(id);
    if (it == data.metas.end()) throw InputError("no pair metadata for image '" + id + "'");
    return it->second;
}

const TissueGrid& grid_for(const PerImageAnnotations& data, const std::string& id) {
    const auto it = data.grids.find(id);
    if (it == data.grids.end()) throw InputError("no tissue grid for image '" + id + "'");
    return it->second;
}

} // namespace

std::vector<TissueClass> assign_regions(const std::vector<GroundTruthCell>& cells,
                                        const TissueGrid& grid,
                                        const PatchPairMeta& meta) {
    std::vector<TissueClass> out;
    out.reserve(cells.size());
    for (const auto& c : cells) out.push_back(tissue_class_at(c.x, c.y, grid, meta));
    return out;
}

std::vector<TissueClass> assign_regions(const std::vector<PredictedCell>& cells,
                                        const TissueGrid& grid,
                                        const PatchPairMeta& meta) {
    std::vector<TissueClass> out;
    out.reserve(cells.size());
    for (const auto& c : cells) out.push_back(tissue_class_at(c.x, c.y, grid, meta));
    return out;
}

long long CooccurrenceTable::of(CellClass c, TissueClass t) const {
    return counts.of(c)[tissue_slot(t)];
}

long long& CooccurrenceTable::of(CellClass c, TissueClass t) {
    return counts.of(c)[tissue_slot(t)];
}

std::optional<double> CooccurrenceTable::rate(CellClass c, TissueClass t) const {
    if (t == TissueClass::UNK) return std::nullopt;
    const long long denom = of(CellClass::BC, t) + of(CellClass::TC, t);
    if (denom == 0) return std::nullopt;
    return static_cast<double>(of(c, t)) / static_cast<double>(denom);
}

long long CooccurrenceTable::total_excluding_unk() const {
    long long total = 0;
    for (CellClass c : {CellClass::BC, CellClass::TC}) {
        for (TissueClass t : {TissueClass::BG, TissueClass::CA}) total += of(c, t);
    }
    return total;
}

CooccurrenceTable cooccurrence_table(const PerImageAnnotations& data) {
    CooccurrenceTable table;
    for (const auto& [id, cells] : data.cells) {
        const auto regions = assign_regions(cells, grid_for(data, id), meta_for(data, id));
        for (std::size_t i = 0; i < cells.size(); ++i) {
            ++table.of(cells[i].cls, regions[i]);
        }
    }
    return table;
}

EvalReport subgroup_evaluate(const ImagePredictions& preds,
                             const PerImageAnnotations& data,
                             TissueClass region,
                             double radius_px,
                             SubgroupSemantics semantics) {
    if (region == TissueClass::UNK) {
        throw ParamError("subgroup region must be BG or CA");
    }
    std::string unknown;
    for (const auto& [id, cells] : preds) {
        (void)cells;
        if (!data.cells.count(id)) unknown += unknown.empty() ? id : ", " + id;
    }
    if (!unknown.empty()) throw InputError("predictions reference unknown image ids: " + unknown);
    static const std::vector<PredictedCell> kNoPredictions;

    PerClass<MatchCounts> pooled;
    for (const auto& [id, gts] : data.cells) {
        const auto& grid = grid_for(data, id);
        const auto& meta = meta_for(data, id);
        const auto pit = preds.find(id);
        const auto& image_preds = pit == preds.end() ? kNoPredictions : pit->second;

        const auto gt_regions = assign_regions(gts, grid, meta);
        const auto pred_regions = assign_regions(image_preds, grid, meta);

        if (semantics == SubgroupSemantics::FilterFirst) {
            std::vector<GroundTruthCell> g;
            std::vector<PredictedCell> p;
            for (std::size_t i = 0; i < gts.size(); ++i) {
                if (gt_regions[i] == region) g.push_back(gts[i]);
            }
            for (std::size_t i = 0; i < image_preds.size(); ++i) {
                if (pred_regions[i] == region) p.push_back(image_preds[i]);
            }
            const auto counts = match_all(p, g, radius_px);
            pooled.bc += counts.bc;
            pooled.tc += counts.tc;
            continue;
        }

        // MatchThenAttribute: match over the full image, then place each
        // outcome in a region. TPs follow the ground truth's region,
        // unmatched predictions their own, unmatched ground truths theirs.
        // Outcomes landing on UNK are excluded altogether.
        for (CellClass cls : {CellClass::BC, CellClass::TC}) {
            std::vector<PredictedCell> p;
            std::vector<std::size_t> p_idx;
            std::vector<GroundTruthCell> g;
            std::vector<std::size_t> g_idx;
            for (std::size_t i = 0; i < image_preds.size(); ++i) {
                if (image_preds[i].cls == cls) {
                    p.push_back(image_preds[i]);
                    p_idx.push_back(i);
                }
            }
            for (std::size_t i = 0; i < gts.size(); ++i) {
                if (gts[i].cls == cls) {
                    g.push_back(gts[i]);
                    g_idx.push_back(i);
                }
            }
            const auto result = match_class(p, g, radius_px);
            std::vector<bool> pred_matched(p.size(), false);
            std::vector<bool> gt_matched(g.size(), false);
            auto& slot = pooled.of(cls);
            for (const auto& [pi, gi] : result.matches) {
                pred_matched[pi] = true;
                gt_matched[gi] = true;
                if (gt_regions[g_idx[gi]] == region) ++slot.tp;
            }
            for (std::size_t i = 0; i < p.size(); ++i) {
                if (!pred_matched[i] && pred_regions[p_idx[i]] == region) ++slot.fp;
            }
            for (std::size_t i = 0; i < g.size(); ++i) {
                if (!gt_matched[i] && gt_regions[g_idx[i]] == region) ++slot.fn;
            }
        }
    }
    return report_from_counts(pooled);
}

} // namespace celleval
