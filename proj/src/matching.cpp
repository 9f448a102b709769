#include "celleval/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace celleval {

double radius_px_from_um(double radius_um, double mpp) {
    if (!(radius_um > 0.0) || !(mpp > 0.0)) {
        throw ParamError("radius and MPP must be positive");
    }
    return std::round(radius_um / mpp * 1e9) / 1e9;
}

namespace {

// Candidate comparator shared by every nearest-scan: smaller squared
// distance wins, then smaller (y, x), then smaller input index.
struct Candidate {
    double dist_sq = std::numeric_limits<double>::infinity();
    double y = 0.0;
    double x = 0.0;
    std::size_t index = 0;

    bool better_than(const Candidate& o) const {
        if (dist_sq != o.dist_sq) return dist_sq < o.dist_sq;
        if (y != o.y) return y < o.y;
        if (x != o.x) return x < o.x;
        return index < o.index;
    }
};

// Uniform bucket grid over the ground-truth points with lazy deletion.
// Bucket edge length equals the match radius; a query expands Chebyshev
// rings until no farther ring can hold a point at <= the best distance, so
// the scan sees every point a full linear scan would pick, ties included.
class BucketGrid {
public:
    BucketGrid(const std::vector<GroundTruthCell>& gts, double bucket_size)
        : gts_(gts), size_(bucket_size), alive_(gts.size(), true), alive_count_(gts.size()) {
        if (gts.empty()) return;
        double min_x = gts[0].x, max_x = gts[0].x, min_y = gts[0].y, max_y = gts[0].y;
        for (const auto& g : gts) {
            min_x = std::min(min_x, static_cast<double>(g.x));
            max_x = std::max(max_x, static_cast<double>(g.x));
            min_y = std::min(min_y, static_cast<double>(g.y));
            max_y = std::max(max_y, static_cast<double>(g.y));
        }
        origin_x_ = min_x;
        origin_y_ = min_y;
        cols_ = bucket_of(max_x, origin_x_) + 1;
        rows_ = bucket_of(max_y, origin_y_) + 1;
        buckets_.resize(static_cast<std::size_t>(cols_) * rows_);
        for (std::size_t i = 0; i < gts.size(); ++i) {
            buckets_[bucket_index(gts[i].x, gts[i].y)].push_back(i);
        }
    }

    bool empty() const { return alive_count_ == 0; }

    // Nearest remaining ground truth to (px, py), or nullopt when none remain.
    std::optional<std::size_t> nearest(double px, double py) const {
        if (empty()) return std::nullopt;
        Candidate best;
        const int qc = bucket_of(px, origin_x_);
        const int qr = bucket_of(py, origin_y_);
        const int max_ring = std::max({qc, cols_ - 1 - qc, qr, rows_ - 1 - qr, 0});
        for (int ring = 0; ring <= max_ring; ++ring) {
            // A point in ring r is at least (r-1)*size away; once even that
            // exceeds the best distance no farther ring can win or tie.
            if (best.dist_sq < std::numeric_limits<double>::infinity() && ring >= 1) {
                const double ring_min = (ring - 1) * size_;
                if (ring_min * ring_min > best.dist_sq) break;
            }
            scan_ring(px, py, qc, qr, ring, best);
        }
        if (best.dist_sq == std::numeric_limits<double>::infinity()) return std::nullopt;
        return best.index;
    }

    void remove(std::size_t index) {
        alive_[index] = false;
        --alive_count_;
    }

    bool alive(std::size_t index) const { return alive_[index]; }

private:
    int bucket_of(double v, double origin) const {
        return static_cast<int>(std::floor((v - origin) / size_));
    }

    std::size_t bucket_index(double x, double y) const {
        return static_cast<std::size_t>(bucket_of(y, origin_y_)) * cols_ + bucket_of(x, origin_x_);
    }

    void consider_bucket(double px, double py, int col, int row, Candidate& best) const {
        if (col < 0 || col >= cols_ || row < 0 || row >= rows_) return;
        for (std::size_t i : buckets_[static_cast<std::size_t>(row) * cols_ + col]) {
            if (!alive_[i]) continue;
            const double dx = gts_[i].x - px;
            const double dy = gts_[i].y - py;
            const Candidate c{dx * dx + dy * dy, static_cast<double>(gts_[i].y),
                              static_cast<double>(gts_[i].x), i};
            if (c.better_than(best)) best = c;
        }
    }

    void scan_ring(double px, double py, int qc, int qr, int ring, Candidate& best) const {
        if (ring == 0) {
            consider_bucket(px, py, qc, qr, best);
            return;
        }
        for (int col = qc - ring; col <= qc + ring; ++col) {
            consider_bucket(px, py, col, qr - ring, best);
            consider_bucket(px, py, col, qr + ring, best);
        }
        for (int row = qr - ring + 1; row <= qr + ring - 1; ++row) {
            consider_bucket(px, py, qc - ring, row, best);
            consider_bucket(px, py, qc + ring, row, best);
        }
    }

    const std::vector<GroundTruthCell>& gts_;
    double size_;
    double origin_x_ = 0.0, origin_y_ = 0.0;
    int cols_ = 0, rows_ = 0;
    std::vector<std::vector<std::size_t>> buckets_;
    std::vector<bool> alive_;
    std::size_t alive_count_;
};

} // namespace

MatchResult match_class(const std::vector<PredictedCell>& preds,
                        const std::vector<GroundTruthCell>& gts,
                        double radius_px) {
    if (!(radius_px > 0.0)) {
        throw ParamError("match radius must be positive, got " + std::to_string(radius_px));
    }

    std::vector<std::size_t> order(preds.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& pa = preds[a];
        const auto& pb = preds[b];
        if (pa.confidence != pb.confidence) return pa.confidence > pb.confidence;
        if (pa.y != pb.y) return pa.y < pb.y;
        if (pa.x != pb.x) return pa.x < pb.x;
        return a < b;
    });

    BucketGrid grid(gts, radius_px);
    const double radius_sq = radius_px * radius_px;

    MatchResult result;
    for (std::size_t pi : order) {
        const auto nearest = grid.nearest(preds[pi].x, preds[pi].y);
        if (!nearest) {
            ++result.counts.fp;
            continue;
        }
        const auto& g = gts[*nearest];
        const double dx = g.x - preds[pi].x;
        const double dy = g.y - preds[pi].y;
        if (dx * dx + dy * dy > radius_sq) {
            ++result.counts.fp;
        } else {
            ++result.counts.tp;
            result.matches.emplace_back(pi, *nearest);
            grid.remove(*nearest);
        }
    }
    result.counts.fn = static_cast<long long>(gts.size()) - result.counts.tp;
    return result;
}

PerClass<MatchCounts> match_all(const std::vector<PredictedCell>& preds,
                                const std::vector<GroundTruthCell>& gts,
                                double radius_px) {
    PerClass<MatchCounts> out;
    for (CellClass cls : {CellClass::BC, CellClass::TC}) {
        std::vector<PredictedCell> p;
        std::vector<GroundTruthCell> g;
        for (const auto& c : preds) {
            if (c.cls == cls) p.push_back(c);
        }
        for (const auto& c : gts) {
            if (c.cls == cls) g.push_back(c);
        }
        out.of(cls) = match_class(p, g, radius_px).counts;
    }
    return out;
}

} // namespace celleval
