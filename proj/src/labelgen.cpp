#include "celleval/labelgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "celleval/error.hpp"
#include "celleval/matching.hpp"

namespace celleval {

namespace {

struct PixelClaim {
    double dist_sq = std::numeric_limits<double>::infinity();
    int center_y = 0;
    int center_x = 0;
    std::uint8_t label = 0;

    bool beats(const PixelClaim& other) const {
        if (dist_sq != other.dist_sq) return dist_sq < other.dist_sq;
        if (center_y != other.center_y) return center_y < other.center_y;
        return center_x < other.center_x;
    }
};

void check_raster_params(double scale_px, int size, const char* what) {
    if (scale_px <= 0.0) throw ParamError(std::string(what) + " must be positive");
    if (size <= 0) throw ParamError("raster size must be positive");
}

void require_in_raster(const GroundTruthCell& cell, int size) {
    if (cell.x < 0 || cell.x >= size || cell.y < 0 || cell.y >= size) {
        throw BoundsError("cell (" + std::to_string(cell.x) + ", " + std::to_string(cell.y) +
                          ") outside the " + std::to_string(size) + "x" + std::to_string(size) +
                          " raster");
    }
}

} // namespace

LabelMap points_to_disks(const std::vector<GroundTruthCell>& cells,
                         double radius_um,
                         double mpp,
                         int size) {
    const double radius_px = radius_px_from_um(radius_um, mpp);
    check_raster_params(radius_px, size, "disk radius");
    const double radius_sq = radius_px * radius_px;
    const int reach = static_cast<int>(std::floor(radius_px));

    LabelMap map(size, size);
    std::vector<PixelClaim> claims(map.labels.size());
    for (const auto& cell : cells) {
        require_in_raster(cell, size);
        const int x0 = std::max(0, cell.x - reach);
        const int x1 = std::min(size - 1, cell.x + reach);
        const int y0 = std::max(0, cell.y - reach);
        const int y1 = std::min(size - 1, cell.y + reach);
        for (int y = y0; y <= y1; ++y) {
            const double dy = y - cell.y;
            for (int x = x0; x <= x1; ++x) {
                const double dx = x - cell.x;
                const double dist_sq = dx * dx + dy * dy;
                if (dist_sq > radius_sq) continue;
                PixelClaim claim{dist_sq, cell.y, cell.x,
                                 static_cast<std::uint8_t>(cell.cls)};
                auto& best = claims[static_cast<std::size_t>(y) * size + x];
                if (claim.beats(best)) best = claim;
            }
        }
    }
    for (std::size_t i = 0; i < claims.size(); ++i) map.labels[i] = claims[i].label;
    return map;
}

PerClass<Heatmap> points_to_gaussians(const std::vector<GroundTruthCell>& cells,
                                      double sigma_um,
                                      double mpp,
                                      int size) {
    const double sigma_px = radius_px_from_um(sigma_um, mpp);
    check_raster_params(sigma_px, size, "gaussian sigma");
    const double support_px = kGaussianSupportSigmas * sigma_px;
    const double support_sq = support_px * support_px;
    const double inv_two_sigma_sq = 1.0 / (2.0 * sigma_px * sigma_px);
    const int reach = static_cast<int>(std::floor(support_px));

    PerClass<Heatmap> maps{Heatmap(size, size), Heatmap(size, size)};
    for (const auto& cell : cells) {
        require_in_raster(cell, size);
        auto& map = maps.of(cell.cls);
        const int x0 = std::max(0, cell.x - reach);
        const int x1 = std::min(size - 1, cell.x + reach);
        const int y0 = std::max(0, cell.y - reach);
        const int y1 = std::min(size - 1, cell.y + reach);
        for (int y = y0; y <= y1; ++y) {
            const double dy = y - cell.y;
            for (int x = x0; x <= x1; ++x) {
                const double dx = x - cell.x;
                const double dist_sq = dx * dx + dy * dy;
                if (dist_sq > support_sq) continue;
                const double value = std::exp(-dist_sq * inv_two_sigma_sq);
                double& slot = map.at(x, y);
                slot = std::max(slot, value);
            }
        }
    }
    return maps;
}

std::vector<PredictedCell> peaks_from_heatmap(const Heatmap& h,
                                              CellClass cls,
                                              double min_distance_px,
                                              double threshold) {
    if (min_distance_px <= 0.0) throw ParamError("min_distance_px must be positive");

    struct Candidate {
        double value;
        int y;
        int x;
    };
    std::vector<Candidate> candidates;
    for (int y = 0; y < h.height; ++y) {
        for (int x = 0; x < h.width; ++x) {
            const double value = h.at(x, y);
            if (value < threshold) continue;
            bool is_max = true;
            for (int dy = -1; dy <= 1 && is_max; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const int nx = x + dx;
                    const int ny = y + dy;
                    if (nx < 0 || ny < 0 || nx >= h.width || ny >= h.height) continue;
                    if (h.at(nx, ny) > value) {
                        is_max = false;
                        break;
                    }
                }
            }
            if (is_max) candidates.push_back({value, y, x});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.value != b.value) return a.value > b.value;
        if (a.y != b.y) return a.y < b.y;
        return a.x < b.x;
    });

    const double min_dist_sq = min_distance_px * min_distance_px;
    std::vector<PredictedCell> peaks;
    for (const auto& c : candidates) {
        bool suppressed = false;
        for (const auto& p : peaks) {
            const double dx = c.x - p.x;
            const double dy = c.y - p.y;
            if (dx * dx + dy * dy <= min_dist_sq) {
                suppressed = true;
                break;
            }
        }
        if (!suppressed) {
            peaks.push_back({static_cast<double>(c.x), static_cast<double>(c.y), cls, c.value});
        }
    }
    return peaks;
}

std::vector<PredictedCell> peaks_from_heatmaps(const PerClass<Heatmap>& maps,
                                               double min_distance_px,
                                               double threshold) {
    auto peaks = peaks_from_heatmap(maps.bc, CellClass::BC, min_distance_px, threshold);
    auto tc = peaks_from_heatmap(maps.tc, CellClass::TC, min_distance_px, threshold);
    peaks.insert(peaks.end(), tc.begin(), tc.end());
    return peaks;
}

} // namespace celleval
