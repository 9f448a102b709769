#include <cmath>
#include <cstdlib>
#include <set>
#include <vector>

#include "doctest.h"

#include "celleval/labelgen.hpp"
#include "celleval/matching.hpp"
#include "celleval/rng.hpp"

using namespace celleval;

namespace {

// Literal per-pixel rasterizer: nearest center within radius wins, ties by
// smaller (y, x).
LabelMap disks_reference(const std::vector<GroundTruthCell>& cells, double radius_px, int size) {
    LabelMap map(size, size);
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            double best = radius_px * radius_px + 1.0;
            int best_cy = 0, best_cx = 0;
            std::uint8_t label = 0;
            for (const auto& c : cells) {
                const double dx = x - c.x;
                const double dy = y - c.y;
                const double d2 = dx * dx + dy * dy;
                if (d2 > radius_px * radius_px) continue;
                const bool wins = label == 0 || d2 < best ||
                                  (d2 == best && (c.y < best_cy || (c.y == best_cy && c.x < best_cx)));
                if (wins) {
                    best = d2;
                    best_cy = c.y;
                    best_cx = c.x;
                    label = static_cast<std::uint8_t>(c.cls);
                }
            }
            map.at(x, y) = label;
        }
    }
    return map;
}

PerClass<Heatmap> gaussians_reference(const std::vector<GroundTruthCell>& cells, double sigma_px,
                                      int size) {
    PerClass<Heatmap> maps{Heatmap(size, size), Heatmap(size, size)};
    const double support_sq = (3.5 * sigma_px) * (3.5 * sigma_px);
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            for (const auto& c : cells) {
                const double dx = x - c.x;
                const double dy = y - c.y;
                const double d2 = dx * dx + dy * dy;
                if (d2 > support_sq) continue;
                auto& v = maps.of(c.cls).at(x, y);
                v = std::max(v, std::exp(-d2 / (2.0 * sigma_px * sigma_px)));
            }
        }
    }
    return maps;
}

} // namespace

TEST_CASE("a lone disk covers exactly the pixels within 7 px") {
    const std::vector<GroundTruthCell> cells = {{100, 100, CellClass::TC}};
    const auto map = points_to_disks(cells); // 1.4 um at 0.2 MPP = 7 px
    CHECK(map.at(100, 100) == 2);
    CHECK(map.at(107, 100) == 2); // distance exactly 7
    CHECK(map.at(100, 107) == 2);
    CHECK(map.at(108, 100) == 0); // distance 8
    CHECK(map.at(100, 108) == 0);
    CHECK(map.at(105, 105) == 0); // distance sqrt(50) > 7
    CHECK(map.at(104, 105) == 2); // distance sqrt(41) < 7

    long long painted = 0;
    for (auto v : map.labels) painted += v != 0;
    // |{(dx,dy) : dx^2+dy^2 <= 49}| = 149
    CHECK(painted == 149);
}

TEST_CASE("no cells produce an all-zero label map and empty peak list") {
    const auto map = points_to_disks({});
    for (auto v : map.labels) REQUIRE(v == 0);

    const auto maps = points_to_gaussians({});
    for (double v : maps.bc.values) REQUIRE(v == 0.0);
    CHECK(peaks_from_heatmaps(maps, 7.0, 0.5).empty());
}

TEST_CASE("overlapping disks of different classes resolve to the nearest center") {
    const std::vector<GroundTruthCell> cells = {{20, 20, CellClass::BC}, {28, 20, CellClass::TC}};
    const auto map = points_to_disks(cells, 1.4, 0.2, 64);
    const auto ref = disks_reference(cells, 7.0, 64);
    for (int y = 0; y < 64; ++y) {
        for (int x = 0; x < 64; ++x) {
            REQUIRE(map.at(x, y) == ref.at(x, y));
        }
    }
    CHECK(map.at(23, 20) == 1); // 3 px from BC, 5 px from TC
    CHECK(map.at(24, 20) == 1); // equidistant: smaller (y,x) center wins
    CHECK(map.at(25, 20) == 2);
}

TEST_CASE("random disk rasters match the per-pixel reference") {
    Rng rng(61);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<GroundTruthCell> cells;
        const int n = 3 + static_cast<int>(rng.next_below(8));
        for (int i = 0; i < n; ++i) {
            cells.push_back({static_cast<int>(rng.next_below(96)), static_cast<int>(rng.next_below(96)),
                             rng.next_bool(0.5) ? CellClass::TC : CellClass::BC});
        }
        const auto map = points_to_disks(cells, 1.4, 0.2, 96);
        const auto ref = disks_reference(cells, 7.0, 96);
        REQUIRE(map.labels == ref.labels);
    }
}

TEST_CASE("gaussian heatmaps peak at one and fall off as expected") {
    // sigma 1.0 um at 0.2 MPP = 5 px, so the value 5 px from the center is
    // exp(-0.5) and the support ends at 17.5 px.
    const std::vector<GroundTruthCell> cells = {{50, 50, CellClass::BC}};
    const auto maps = points_to_gaussians(cells, 1.0, 0.2, 128);
    CHECK(maps.bc.at(50, 50) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(maps.bc.at(55, 50) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
    CHECK(maps.bc.at(50, 55) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
    CHECK(maps.bc.at(50 + 17, 50) > 0.0);
    CHECK(maps.bc.at(50 + 18, 50) == 0.0); // beyond 3.5 sigma, hard zero
    for (double v : maps.tc.values) REQUIRE(v == 0.0);
    for (double v : maps.bc.values) {
        REQUIRE(v >= 0.0);
        REQUIRE(v <= 1.0);
    }
}

TEST_CASE("nearby same-class gaussians combine by maximum") {
    Rng rng(62);
    std::vector<GroundTruthCell> cells;
    for (int i = 0; i < 6; ++i) {
        cells.push_back({static_cast<int>(rng.next_below(80)), static_cast<int>(rng.next_below(80)),
                         rng.next_bool(0.5) ? CellClass::TC : CellClass::BC});
    }
    const auto maps = points_to_gaussians(cells, 1.14, 0.2, 80);
    const auto ref = gaussians_reference(cells, 5.7, 80);
    for (int y = 0; y < 80; ++y) {
        for (int x = 0; x < 80; ++x) {
            REQUIRE(maps.bc.at(x, y) == doctest::Approx(ref.bc.at(x, y)).epsilon(1e-12));
            REQUIRE(maps.tc.at(x, y) == doctest::Approx(ref.tc.at(x, y)).epsilon(1e-12));
        }
    }
}

TEST_CASE("peak extraction recovers well-separated cells exactly") {
    Rng rng(63);
    std::vector<GroundTruthCell> cells;
    // Lattice placement guarantees pairwise separation > 42 px.
    for (int gy = 0; gy < 5; ++gy) {
        for (int gx = 0; gx < 5; ++gx) {
            if (!rng.next_bool(0.7)) continue;
            cells.push_back({60 + gx * 100 + static_cast<int>(rng.next_below(40)),
                             60 + gy * 100 + static_cast<int>(rng.next_below(40)),
                             rng.next_bool(0.5) ? CellClass::TC : CellClass::BC});
        }
    }
    REQUIRE(!cells.empty());

    const auto maps = points_to_gaussians(cells, kDefaultGaussianSigmaUm, 0.2, 640);
    const auto peaks = peaks_from_heatmaps(maps, 7.0, 0.5);
    REQUIRE(peaks.size() == cells.size());
    for (const auto& p : peaks) {
        CHECK(p.confidence == doctest::Approx(1.0).epsilon(1e-12));
        bool found = false;
        for (const auto& c : cells) {
            if (c.cls == p.cls && std::abs(c.x - p.x) <= 1.0 && std::abs(c.y - p.y) <= 1.0) {
                found = true;
                break;
            }
        }
        CHECK(found);
    }

    // Round trip through the matcher: everything is a true positive.
    const auto counts = match_all(peaks, cells, 15.0);
    CHECK(counts.bc.fp == 0);
    CHECK(counts.bc.fn == 0);
    CHECK(counts.tc.fp == 0);
    CHECK(counts.tc.fn == 0);
}

TEST_CASE("suppression keeps exactly one of two equal maxima within the radius") {
    Heatmap h(64, 64);
    h.at(30, 30) = 1.0;
    h.at(33, 30) = 1.0; // 3 px apart, equal height
    const auto peaks = peaks_from_heatmap(h, CellClass::BC, 7.0, 0.5);
    REQUIRE(peaks.size() == 1);
    // Equal values: the smaller (y, x) candidate is accepted first.
    CHECK(peaks[0].x == 30.0);
    CHECK(peaks[0].y == 30.0);

    // With a smaller suppression radius both survive.
    CHECK(peaks_from_heatmap(h, CellClass::BC, 2.0, 0.5).size() == 2);
}

TEST_CASE("peaks below the threshold and non-maxima are ignored") {
    Heatmap h(32, 32);
    h.at(10, 10) = 0.4; // below threshold
    h.at(20, 20) = 0.8;
    h.at(21, 20) = 0.7; // neighbor of the maximum, not a local max
    const auto peaks = peaks_from_heatmap(h, CellClass::TC, 3.0, 0.5);
    REQUIRE(peaks.size() == 1);
    CHECK(peaks[0].x == 20.0);
    CHECK(peaks[0].cls == CellClass::TC);
    CHECK(peaks[0].confidence == 0.8);
}

TEST_CASE("plateau pixels tie as local maxima and are resolved by suppression") {
    Heatmap h(32, 32);
    // A 2x2 plateau: all four qualify as >= their neighbors.
    h.at(10, 10) = h.at(11, 10) = h.at(10, 11) = h.at(11, 11) = 0.9;
    const auto peaks = peaks_from_heatmap(h, CellClass::BC, 3.0, 0.5);
    REQUIRE(peaks.size() == 1);
    CHECK(peaks[0].x == 10.0);
    CHECK(peaks[0].y == 10.0);
}

TEST_CASE("class maps are extracted independently and concatenated BC before TC") {
    PerClass<Heatmap> maps{Heatmap(64, 64), Heatmap(64, 64)};
    maps.bc.at(10, 10) = 0.9;
    maps.tc.at(40, 40) = 0.8;
    maps.tc.at(11, 10) = 0.7; // near the BC peak, but in the other map
    const auto peaks = peaks_from_heatmaps(maps, 7.0, 0.5);
    REQUIRE(peaks.size() == 3);
    CHECK(peaks[0].cls == CellClass::BC);
    CHECK(peaks[1].cls == CellClass::TC);
    CHECK(peaks[2].cls == CellClass::TC);
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(points_to_disks({}, 0.0), ParamError);
    CHECK_THROWS_AS(points_to_disks({}, 1.4, 0.0), ParamError);
    CHECK_THROWS_AS(points_to_disks({}, 1.4, 0.2, 0), ParamError);
    CHECK_THROWS_AS(points_to_gaussians({}, -1.0), ParamError);
    CHECK_THROWS_AS(peaks_from_heatmap(Heatmap(8, 8), CellClass::BC, 0.0, 0.5), ParamError);
}

TEST_CASE("out-of-patch cells are rejected") {
    CHECK_THROWS_AS(points_to_disks({{200, 10, CellClass::BC}}, 1.4, 0.2, 64), BoundsError);
    CHECK_THROWS_AS(points_to_gaussians({{10, -1, CellClass::BC}}, 1.14, 0.2, 64), BoundsError);
}
