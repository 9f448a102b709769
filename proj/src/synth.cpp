#include "celleval/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "celleval/error.hpp"
#include "celleval/geometry.hpp"
#include "celleval/rng.hpp"

namespace celleval {

namespace {

void require_probability(double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw ParamError(std::string(name) + " must be in [0, 1], got " + std::to_string(p));
    }
}

// Minimum pairwise distance over all ground truths, class-blind.
double min_separation(const std::vector<GroundTruthCell>& gts) {
    double best_sq = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < gts.size(); ++i) {
        for (std::size_t j = i + 1; j < gts.size(); ++j) {
            const double dx = gts[i].x - gts[j].x;
            const double dy = gts[i].y - gts[j].y;
            best_sq = std::min(best_sq, dx * dx + dy * dy);
        }
    }
    return std::sqrt(best_sq);
}

} // namespace

TissueGrid gen_tissue(std::uint64_t seed, const TissueSynthParams& params) {
    if (params.size <= 0) throw ParamError("tissue size must be positive");
    if (params.n_blobs < 0) throw ParamError("n_blobs must be non-negative");
    if (!(params.radius_min_px > 0.0 && params.radius_min_px <= params.radius_max_px)) {
        throw ParamError("blob radius range must satisfy 0 < min <= max");
    }
    if (params.unk_border_px < 0 || 2 * params.unk_border_px > params.size) {
        throw ParamError("unk_border_px must be in [0, size/2]");
    }

    TissueGrid grid;
    grid.width = params.size;
    grid.height = params.size;
    grid.mpp = kTissueMpp;
    grid.labels.assign(static_cast<std::size_t>(params.size) * params.size, TissueClass::BG);

    Rng rng(seed);
    for (int blob = 0; blob < params.n_blobs; ++blob) {
        const double cx = rng.uniform(0.0, static_cast<double>(params.size));
        const double cy = rng.uniform(0.0, static_cast<double>(params.size));
        const double r = rng.uniform(params.radius_min_px, params.radius_max_px);
        const double r_sq = r * r;
        const int x0 = std::max(0, static_cast<int>(std::floor(cx - r)));
        const int x1 = std::min(params.size - 1, static_cast<int>(std::ceil(cx + r)));
        const int y0 = std::max(0, static_cast<int>(std::floor(cy - r)));
        const int y1 = std::min(params.size - 1, static_cast<int>(std::ceil(cy + r)));
        for (int y = y0; y <= y1; ++y) {
            const double dy = y - cy;
            for (int x = x0; x <= x1; ++x) {
                const double dx = x - cx;
                if (dx * dx + dy * dy <= r_sq) grid.at(x, y) = TissueClass::CA;
            }
        }
    }

    const int border = params.unk_border_px;
    if (border > 0) {
        for (int y = 0; y < params.size; ++y) {
            for (int x = 0; x < params.size; ++x) {
                if (x < border || y < border || x >= params.size - border ||
                    y >= params.size - border) {
                    grid.at(x, y) = TissueClass::UNK;
                }
            }
        }
    }
    return grid;
}

std::vector<GroundTruthCell> gen_cells(const TissueGrid& grid,
                                       const PatchPairMeta& meta,
                                       const CellSynthParams& params,
                                       std::uint64_t seed) {
    if (params.density_per_mpx < 0.0) throw ParamError("density must be non-negative");
    require_probability(params.p_tc_given_ca, "p_tc_given_ca");
    require_probability(params.p_bc_given_bg, "p_bc_given_bg");
    if (params.min_sep_px < 0.0) throw ParamError("min_sep_px must be non-negative");
    if (params.max_attempts_per_cell <= 0) throw ParamError("attempt budget must be positive");

    const double patch_px = static_cast<double>(kCellPatchSize) * kCellPatchSize;
    const long long target = std::llround(params.density_per_mpx * patch_px / 1e6);
    const double min_sep_sq = params.min_sep_px * params.min_sep_px;

    // Occupancy buckets at least min_sep wide, so conflicts live in the 3x3
    // neighborhood around a candidate.
    const int bucket_px = std::max(1, static_cast<int>(std::ceil(params.min_sep_px)));
    const int buckets_per_side = (kCellPatchSize + bucket_px - 1) / bucket_px;
    std::vector<std::vector<std::size_t>> buckets(
        static_cast<std::size_t>(buckets_per_side) * buckets_per_side);

    std::vector<GroundTruthCell> cells;
    cells.reserve(static_cast<std::size_t>(target));
    Rng rng(seed);
    for (long long i = 0; i < target; ++i) {
        bool placed = false;
        for (int attempt = 0; attempt < params.max_attempts_per_cell; ++attempt) {
            const int x = static_cast<int>(rng.next_below(kCellPatchSize));
            const int y = static_cast<int>(rng.next_below(kCellPatchSize));
            const TissueClass region = tissue_class_at(x, y, grid, meta);
            if (region == TissueClass::UNK) continue;

            bool conflict = false;
            if (params.min_sep_px > 0.0) {
                const int bx = x / bucket_px;
                const int by = y / bucket_px;
                for (int ny = std::max(0, by - 1); ny <= std::min(buckets_per_side - 1, by + 1) && !conflict; ++ny) {
                    for (int nx = std::max(0, bx - 1); nx <= std::min(buckets_per_side - 1, bx + 1); ++nx) {
                        for (std::size_t idx : buckets[static_cast<std::size_t>(ny) * buckets_per_side + nx]) {
                            const double dx = cells[idx].x - x;
                            const double dy = cells[idx].y - y;
                            if (dx * dx + dy * dy < min_sep_sq) {
                                conflict = true;
                                break;
                            }
                        }
                        if (conflict) break;
                    }
                }
            }
            if (conflict) continue;

            CellClass cls;
            if (region == TissueClass::CA) {
                cls = rng.next_bool(params.p_tc_given_ca) ? CellClass::TC : CellClass::BC;
            } else {
                cls = rng.next_bool(params.p_bc_given_bg) ? CellClass::BC : CellClass::TC;
            }
            if (params.min_sep_px > 0.0) {
                buckets[static_cast<std::size_t>(y / bucket_px) * buckets_per_side + x / bucket_px]
                    .push_back(cells.size());
            }
            cells.push_back(GroundTruthCell{x, y, cls});
            placed = true;
            break;
        }
        if (!placed) {
            throw ParamError("cell placement failed after " +
                             std::to_string(params.max_attempts_per_cell) +
                             " attempts; density " + std::to_string(params.density_per_mpx) +
                             "/Mpx is infeasible for min_sep_px " +
                             std::to_string(params.min_sep_px));
        }
    }
    return cells;
}

PerturbResult perturb_to_predictions(const std::vector<GroundTruthCell>& gts,
                                     const PerturbParams& params,
                                     std::uint64_t seed,
                                     double radius_px,
                                     int patch_size) {
    require_probability(params.drop_rate, "drop_rate");
    require_probability(params.spurious_rate, "spurious_rate");
    require_probability(params.class_flip_rate, "class_flip_rate");
    if (params.jitter_sigma_px < 0.0) throw ParamError("jitter_sigma_px must be non-negative");
    if (radius_px <= 0.0) throw ParamError("radius_px must be positive");
    if (patch_size <= 0) throw ParamError("patch_size must be positive");

    PerturbResult result;
    Rng rng(seed);
    const double sigma = params.jitter_sigma_px;
    const double max_extent = static_cast<double>(patch_size - 1);

    for (const auto& gt : gts) {
        auto& own = result.expected.of(gt.cls);
        if (rng.next_bool(params.drop_rate)) {
            ++own.fn;
            continue;
        }
        double dx = 0.0;
        double dy = 0.0;
        if (sigma > 0.0) {
            dx = std::clamp(rng.next_normal() * sigma, -3.0 * sigma, 3.0 * sigma);
            dy = std::clamp(rng.next_normal() * sigma, -3.0 * sigma, 3.0 * sigma);
        }
        const double x = std::clamp(gt.x + dx, 0.0, max_extent);
        const double y = std::clamp(gt.y + dy, 0.0, max_extent);
        const bool flip = rng.next_bool(params.class_flip_rate);
        const CellClass cls =
            flip ? (gt.cls == CellClass::BC ? CellClass::TC : CellClass::BC) : gt.cls;
        const double confidence = rng.uniform(0.5, 1.0);
        result.predictions.push_back(PredictedCell{x, y, cls, confidence});
        if (flip) {
            ++own.fn;
            ++result.expected.of(cls).fp;
        } else {
            ++own.tp;
        }
    }

    // Spurious detections: per class, a fixed share of that class's ground
    // truths, kept clear of all same-class ground truths so they can never
    // match.
    const double clear_sq = (radius_px + 1e-6) * (radius_px + 1e-6);
    for (CellClass cls : {CellClass::BC, CellClass::TC}) {
        long long n_class = 0;
        for (const auto& gt : gts) {
            if (gt.cls == cls) ++n_class;
        }
        const long long n_spurious = std::llround(params.spurious_rate * n_class);
        for (long long i = 0; i < n_spurious; ++i) {
            bool placed = false;
            for (int attempt = 0; attempt < 1000; ++attempt) {
                const double x = rng.uniform(0.0, max_extent);
                const double y = rng.uniform(0.0, max_extent);
                bool clear = true;
                for (const auto& gt : gts) {
                    if (gt.cls != cls) continue;
                    const double ddx = gt.x - x;
                    const double ddy = gt.y - y;
                    if (ddx * ddx + ddy * ddy <= clear_sq) {
                        clear = false;
                        break;
                    }
                }
                if (clear) {
                    result.predictions.push_back(
                        PredictedCell{x, y, cls, rng.uniform(0.0, 0.5)});
                    ++result.expected.of(cls).fp;
                    placed = true;
                    break;
                }
            }
            if (!placed) {
                throw ParamError("no room for a spurious detection clear of ground truths");
            }
        }
    }

    const bool jitter_bounded = 3.0 * sigma * std::sqrt(2.0) < radius_px;
    result.exact =
        jitter_bounded && (gts.size() < 2 || min_separation(gts) > 2.0 * radius_px);
    return result;
}

} // namespace celleval
