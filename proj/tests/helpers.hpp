#pragma once

// Shared builders for unit and acceptance tests: canonical metas, small
// tissue grids, randomized matching instances, and the six-organ reference
// manifest used by the validation tests.

#include <string>
#include <utility>
#include <vector>

#include "celleval/rng.hpp"
#include "celleval/types.hpp"

namespace testutil {

inline celleval::PatchPairMeta make_meta(int offset_x = 0, int offset_y = 0,
                                         const std::string& pair_id = "pair_0",
                                         const std::string& wsi_id = "wsi_0",
                                         const std::string& organ = "kidney",
                                         celleval::Split split = celleval::Split::Train) {
    celleval::PatchPairMeta m;
    m.pair_id = pair_id;
    m.wsi_id = wsi_id;
    m.organ = organ;
    m.split = split;
    m.cell_offset_x = offset_x;
    m.cell_offset_y = offset_y;
    return m;
}

inline celleval::TissueGrid uniform_grid(celleval::TissueClass cls) {
    celleval::TissueGrid g;
    g.labels.assign(static_cast<std::size_t>(g.width) * g.height, cls);
    return g;
}

// Left half CA, right half BG (split at column width/2).
inline celleval::TissueGrid half_grid() {
    celleval::TissueGrid g = uniform_grid(celleval::TissueClass::BG);
    for (int row = 0; row < g.height; ++row) {
        for (int col = 0; col < g.width / 2; ++col) {
            g.at(col, row) = celleval::TissueClass::CA;
        }
    }
    return g;
}

inline celleval::TissueGrid checkerboard_grid(int block = 8) {
    celleval::TissueGrid g = uniform_grid(celleval::TissueClass::BG);
    for (int row = 0; row < g.height; ++row) {
        for (int col = 0; col < g.width; ++col) {
            if (((col / block) + (row / block)) % 2 == 0) {
                g.at(col, row) = celleval::TissueClass::CA;
            }
        }
    }
    return g;
}

inline celleval::TissueProbGrid random_prob_grid(celleval::Rng& rng) {
    celleval::TissueProbGrid g;
    g.p_ca.resize(static_cast<std::size_t>(g.width) * g.height);
    for (auto& v : g.p_ca) {
        v = rng.next_double();
    }
    return g;
}

inline celleval::TissueProbGrid constant_prob_grid(double value) {
    celleval::TissueProbGrid g;
    g.p_ca.assign(static_cast<std::size_t>(g.width) * g.height, value);
    return g;
}

// Random matching instance in the standard cell frame. Duplicate positions
// and confidence ties occur on purpose (coordinates snap to a coarse lattice
// and confidences to two decimals) so tie-break paths get exercised.
struct MatchInstance {
    std::vector<celleval::PredictedCell> preds;
    std::vector<celleval::GroundTruthCell> gts;
};

inline MatchInstance random_match_instance(celleval::Rng& rng, int max_gt = 50, int max_pred = 50,
                                           int patch = celleval::kCellPatchSize) {
    MatchInstance inst;
    const int n_gt = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(max_gt) + 1));
    const int n_pred = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(max_pred) + 1));
    const int lattice = patch / 16;
    for (int i = 0; i < n_gt; ++i) {
        celleval::GroundTruthCell g;
        g.x = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(lattice))) * 16;
        g.y = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(lattice))) * 16;
        g.cls = rng.next_bool(0.5) ? celleval::CellClass::TC : celleval::CellClass::BC;
        inst.gts.push_back(g);
    }
    for (int i = 0; i < n_pred; ++i) {
        celleval::PredictedCell p;
        if (!inst.gts.empty() && rng.next_bool(0.6)) {
            // Near some ground truth so TPs and contested neighborhoods exist.
            const auto& g = inst.gts[rng.next_below(inst.gts.size())];
            p.x = g.x + rng.uniform(-20.0, 20.0);
            p.y = g.y + rng.uniform(-20.0, 20.0);
        } else {
            p.x = rng.uniform(0.0, patch - 1.0);
            p.y = rng.uniform(0.0, patch - 1.0);
        }
        p.x = std::min(std::max(p.x, 0.0), patch - 1.0);
        p.y = std::min(std::max(p.y, 0.0), patch - 1.0);
        p.cls = rng.next_bool(0.5) ? celleval::CellClass::TC : celleval::CellClass::BC;
        p.confidence = static_cast<double>(rng.next_below(101)) / 100.0;
        inst.preds.push_back(p);
    }
    return inst;
}

// Six-organ reference manifest: 673 pairs split 406/137/130, one WSI per
// pair, geometry all valid.
inline celleval::DatasetManifest reference_manifest() {
    struct OrganCounts {
        const char* organ;
        long long train, val, test;
    };
    static constexpr OrganCounts kOrgans[] = {
        {"kidney", 125, 41, 41},      {"head-neck", 27, 9, 10}, {"prostate", 50, 17, 16},
        {"stomach", 36, 12, 12},      {"endometrium", 86, 29, 25}, {"bladder", 82, 29, 26},
    };
    celleval::DatasetManifest manifest;
    int serial = 0;
    for (const auto& oc : kOrgans) {
        const long long per_split[3] = {oc.train, oc.val, oc.test};
        for (int s = 0; s < 3; ++s) {
            for (long long i = 0; i < per_split[s]; ++i) {
                const std::string id = std::string(oc.organ) + "_" + std::to_string(serial++);
                auto meta = make_meta(512, 512, id, "wsi_" + id, oc.organ,
                                      static_cast<celleval::Split>(s));
                manifest.pairs.push_back(meta);
            }
        }
    }
    return manifest;
}

} // namespace testutil
