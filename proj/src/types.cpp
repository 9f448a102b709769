#include "celleval/types.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace celleval {

const char* to_string(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Val: return "val";
        default: return "test";
    }
}

std::optional<Split> parse_split(const std::string& s) {
    if (s == "train") return Split::Train;
    if (s == "val") return Split::Val;
    if (s == "test") return Split::Test;
    return std::nullopt;
}

void validate_cell(const GroundTruthCell& c) {
    if (c.x < 0 || c.x >= kCellPatchSize) {
        throw BoundsError("cell x coordinate " + std::to_string(c.x) + " outside [0, " +
                          std::to_string(kCellPatchSize) + ")");
    }
    if (c.y < 0 || c.y >= kCellPatchSize) {
        throw BoundsError("cell y coordinate " + std::to_string(c.y) + " outside [0, " +
                          std::to_string(kCellPatchSize) + ")");
    }
}

void validate_cell(const PredictedCell& c) {
    if (!(c.x >= 0.0 && c.x < kCellPatchSize)) {
        throw BoundsError("prediction x coordinate " + std::to_string(c.x) + " outside [0, " +
                          std::to_string(kCellPatchSize) + ")");
    }
    if (!(c.y >= 0.0 && c.y < kCellPatchSize)) {
        throw BoundsError("prediction y coordinate " + std::to_string(c.y) + " outside [0, " +
                          std::to_string(kCellPatchSize) + ")");
    }
    if (!(c.confidence >= 0.0 && c.confidence <= 1.0)) {
        throw InputError("prediction confidence " + std::to_string(c.confidence) + " outside [0, 1]");
    }
}

void validate_grid(const TissueGrid& g) {
    if (g.width <= 0 || g.height <= 0) {
        throw InputError("tissue grid has non-positive dimensions");
    }
    if (g.labels.size() != static_cast<std::size_t>(g.width) * g.height) {
        throw InputError("tissue grid label count " + std::to_string(g.labels.size()) +
                         " does not match " + std::to_string(g.width) + "x" + std::to_string(g.height));
    }
    for (TissueClass t : g.labels) {
        if (t != TissueClass::BG && t != TissueClass::CA && t != TissueClass::UNK) {
            throw InputError("tissue grid label " + std::to_string(static_cast<int>(t)) +
                             " is not one of {1, 2, 255}");
        }
    }
}

void validate_grid(const TissueProbGrid& g) {
    if (g.width <= 0 || g.height <= 0) {
        throw InputError("probability grid has non-positive dimensions");
    }
    if (g.p_ca.size() != static_cast<std::size_t>(g.width) * g.height) {
        throw InputError("probability grid value count " + std::to_string(g.p_ca.size()) +
                         " does not match " + std::to_string(g.width) + "x" + std::to_string(g.height));
    }
    for (double v : g.p_ca) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw InputError("probability grid value " + std::to_string(v) + " outside [0, 1]");
        }
    }
}

std::vector<std::string> check_meta(const PatchPairMeta& m) {
    std::vector<std::string> problems;
    if (m.cell_offset_x < 0 || m.cell_offset_y < 0) {
        problems.push_back("negative cell offset");
    }
    if (m.cell_offset_x + kCellPatchSize > kTissueNativeSize ||
        m.cell_offset_y + kCellPatchSize > kTissueNativeSize) {
        problems.push_back("cell patch extends past the tissue patch");
    }
    if (m.cell_mpp <= 0.0 || m.tissue_mpp <= 0.0) {
        problems.push_back("non-positive MPP");
    } else if (m.tissue_mpp / m.cell_mpp != kDownsampleFactor) {
        problems.push_back("tissue/cell MPP ratio is not exactly 4");
    }
    if (m.pair_id.empty()) problems.push_back("empty pair_id");
    if (m.wsi_id.empty()) problems.push_back("empty wsi_id");
    return problems;
}

void validate_meta(const PatchPairMeta& m) {
    const auto problems = check_meta(m);
    if (!problems.empty()) {
        std::ostringstream oss;
        oss << "pair '" << m.pair_id << "': " << problems.front();
        for (std::size_t i = 1; i < problems.size(); ++i) oss << "; " << problems[i];
        throw InputError(oss.str());
    }
}

long long ValidationReport::count(Violation::Kind k) const {
    return std::count_if(violations.begin(), violations.end(),
                         [k](const Violation& v) { return v.kind == k; });
}

ManifestCounts manifest_counts(const DatasetManifest& manifest) {
    std::map<std::string, std::array<long long, 3>> by_organ;
    ManifestCounts out;
    for (const auto& p : manifest.pairs) {
        const auto s = static_cast<std::size_t>(p.split);
        by_organ[p.organ][s] += 1;
        out.totals[s] += 1;
    }
    out.per_organ.assign(by_organ.begin(), by_organ.end());
    return out;
}

ValidationReport validate_manifest(const DatasetManifest& manifest, double ratio_tolerance) {
    ValidationReport report;
    report.pair_count = static_cast<long long>(manifest.pairs.size());

    std::set<std::string> seen_pairs;
    std::map<std::string, std::set<Split>> wsi_splits;
    for (const auto& p : manifest.pairs) {
        if (!seen_pairs.insert(p.pair_id).second) {
            report.violations.push_back({Violation::Kind::DuplicatePairId, p.pair_id,
                                         "pair_id '" + p.pair_id + "' appears more than once"});
        }
        wsi_splits[p.wsi_id].insert(p.split);
        for (const auto& problem : check_meta(p)) {
            report.violations.push_back({Violation::Kind::Geometry, p.pair_id,
                                         "pair '" + p.pair_id + "': " + problem});
        }
    }

    for (const auto& [wsi, splits] : wsi_splits) {
        if (splits.size() > 1) {
            std::ostringstream oss;
            oss << "wsi '" << wsi << "' appears in splits {";
            bool first = true;
            for (Split s : splits) {
                if (!first) oss << ", ";
                oss << to_string(s);
                first = false;
            }
            oss << "}";
            report.violations.push_back({Violation::Kind::SplitLeakage, wsi, oss.str()});
        }
    }

    // 6:2:2 target, expressed per organ against that organ's own total.
    static constexpr double kRatioFractions[3] = {0.6, 0.2, 0.2};
    for (const auto& [organ, counts] : manifest_counts(manifest).per_organ) {
        const double total = static_cast<double>(counts[0] + counts[1] + counts[2]);
        for (std::size_t s = 0; s < 3; ++s) {
            const double expected = total * kRatioFractions[s];
            const double deviation = std::abs(static_cast<double>(counts[s]) - expected);
            if (deviation > ratio_tolerance + 1e-9) {
                std::ostringstream oss;
                oss << "organ '" << organ << "' " << to_string(static_cast<Split>(s)) << " split has "
                    << counts[s] << " pairs, expected " << expected << " +/- " << ratio_tolerance;
                report.violations.push_back({Violation::Kind::RatioDeviation, organ, oss.str()});
            }
        }
    }
    return report;
}

} // namespace celleval
