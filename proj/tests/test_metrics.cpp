#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"

#include "celleval/metrics.hpp"
#include "celleval/rng.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace celleval;

namespace {

// Builds a split where every image has the same per-class counts:
// one TP, one FP, one FN for each class.
void add_standard_image(ImagePredictions& preds, ImageGroundTruth& gts, const std::string& id) {
    std::vector<GroundTruthCell>& g = gts[id];
    std::vector<PredictedCell>& p = preds[id];
    g.push_back({0, 0, CellClass::BC});
    g.push_back({900, 900, CellClass::BC}); // missed
    g.push_back({0, 500, CellClass::TC});
    g.push_back({900, 100, CellClass::TC}); // missed
    p.push_back({0.0, 0.0, CellClass::BC, 0.9});
    p.push_back({500.0, 500.0, CellClass::BC, 0.8}); // stray
    p.push_back({0.0, 500.0, CellClass::TC, 0.9});
    p.push_back({500.0, 100.0, CellClass::TC, 0.8}); // stray
}

} // namespace

TEST_CASE("class metrics on hand-checked tallies") {
    const auto even = class_metrics({1, 1, 1});
    CHECK(even.precision == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(even.recall == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(even.f1 == doctest::Approx(0.5).epsilon(1e-12));

    const auto skewed = class_metrics({3, 1, 2});
    CHECK(skewed.precision == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(skewed.recall == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(skewed.f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("degenerate tallies resolve to zero, not NaN") {
    const auto zero = class_metrics({0, 0, 0});
    CHECK(zero.precision == 0.0);
    CHECK(zero.recall == 0.0);
    CHECK(zero.f1 == 0.0);

    CHECK(class_metrics({0, 5, 0}).precision == 0.0);
    CHECK(class_metrics({0, 0, 5}).recall == 0.0);
    CHECK(class_metrics({0, 5, 5}).f1 == 0.0);
}

TEST_CASE("split evaluation pools counts over images before deriving metrics") {
    ImagePredictions preds;
    ImageGroundTruth gts;
    add_standard_image(preds, gts, "img_a");
    add_standard_image(preds, gts, "img_b");

    const auto report = evaluate_split(preds, gts, 15.0);
    CHECK(report.counts.bc == MatchCounts{2, 2, 2});
    CHECK(report.counts.tc == MatchCounts{2, 2, 2});
    CHECK(report.metrics.bc.f1 == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(report.metrics.tc.f1 == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(report.mean_f1 == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("a perfect submission scores mF1 = 1") {
    ImagePredictions preds;
    ImageGroundTruth gts;
    Rng rng(21);
    for (const std::string id : {"a", "b", "c"}) {
        for (int i = 0; i < 30; ++i) {
            const int x = static_cast<int>(rng.next_below(1024));
            const int y = static_cast<int>(rng.next_below(1024));
            const CellClass cls = rng.next_bool(0.5) ? CellClass::TC : CellClass::BC;
            gts[id].push_back({x, y, cls});
            preds[id].push_back({static_cast<double>(x), static_cast<double>(y), cls, 1.0});
        }
    }
    const auto report = evaluate_split(preds, gts, 15.0);
    CHECK(report.mean_f1 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(report.counts.bc.fp == 0);
    CHECK(report.counts.tc.fn == 0);
}

TEST_CASE("an image missing from the predictions counts as empty predictions") {
    ImagePredictions preds;
    ImageGroundTruth gts;
    add_standard_image(preds, gts, "present");
    add_standard_image(preds, gts, "absent");

    ImagePredictions with_missing = preds;
    with_missing.erase("absent");
    ImagePredictions with_empty = preds;
    with_empty["absent"].clear();

    const auto a = evaluate_split(with_missing, gts, 15.0);
    const auto b = evaluate_split(with_empty, gts, 15.0);
    CHECK(a == b);
    // The absent image's ground truths all become FN.
    CHECK(a.counts.bc.fn == 1 + 2);
    CHECK(a.counts.bc.tp == 1);
}

TEST_CASE("predictions for unknown images are an input error listing the ids") {
    ImagePredictions preds;
    ImageGroundTruth gts;
    add_standard_image(preds, gts, "known");
    preds["mystery"].push_back({1.0, 1.0, CellClass::BC, 0.5});

    CHECK_THROWS_WITH_AS(evaluate_split(preds, gts, 15.0), doctest::Contains("mystery"),
                         InputError);
    CHECK_THROWS_AS(per_image_counts(preds, gts, 15.0), InputError);
}

TEST_CASE("split evaluation agrees with the reference matcher plus direct formulas") {
    ImagePredictions preds;
    ImageGroundTruth gts;
    Rng rng(22);
    for (int img = 0; img < 10; ++img) {
        const std::string id = "img_" + std::to_string(img);
        const auto inst = testutil::random_match_instance(rng);
        gts[id] = inst.gts;
        preds[id] = inst.preds;
    }

    PerClass<MatchCounts> pooled;
    for (const auto& [id, g] : gts) {
        for (CellClass cls : {CellClass::BC, CellClass::TC}) {
            std::vector<PredictedCell> p_c;
            std::vector<GroundTruthCell> g_c;
            for (const auto& p : preds[id]) {
                if (p.cls == cls) p_c.push_back(p);
            }
            for (const auto& gt : g) {
                if (gt.cls == cls) g_c.push_back(gt);
            }
            pooled.of(cls) += oracle::match_reference(p_c, g_c, 15.0).counts;
        }
    }

    const auto report = evaluate_split(preds, gts, 15.0);
    REQUIRE(report.counts == pooled);

    auto f1 = [](const MatchCounts& c) {
        const double denom = 2.0 * c.tp + c.fp + c.fn;
        return denom == 0.0 ? 0.0 : 2.0 * c.tp / denom;
    };
    CHECK(report.mean_f1 == doctest::Approx((f1(pooled.bc) + f1(pooled.tc)) / 2.0).epsilon(1e-12));
}

TEST_CASE("per-image counts are identical across worker counts") {
    ImagePredictions preds;
    ImageGroundTruth gts;
    Rng rng(23);
    for (int img = 0; img < 12; ++img) {
        const std::string id = "img_" + std::to_string(img);
        const auto inst = testutil::random_match_instance(rng);
        gts[id] = inst.gts;
        preds[id] = inst.preds;
    }
    const auto serial = per_image_counts(preds, gts, 15.0, 1);
    const auto parallel = per_image_counts(preds, gts, 15.0, 4);
    REQUIRE(serial == parallel);
    CHECK(serial.size() == 12);
    CHECK(evaluate_split(preds, gts, 15.0, 1) == evaluate_split(preds, gts, 15.0, 4));
}

TEST_CASE("grouped evaluation splits by the provided mapping") {
    ImagePredictions preds;
    ImageGroundTruth gts;
    add_standard_image(preds, gts, "k_1");
    add_standard_image(preds, gts, "k_2");
    add_standard_image(preds, gts, "s_1");

    const std::map<std::string, std::string> groups = {
        {"k_1", "kidney"}, {"k_2", "kidney"}, {"s_1", "stomach"}};
    const auto by_group = evaluate_grouped(preds, gts, groups, 15.0);
    REQUIRE(by_group.size() == 2);
    CHECK(by_group.at("kidney").counts.bc == MatchCounts{2, 2, 2});
    CHECK(by_group.at("stomach").counts.bc == MatchCounts{1, 1, 1});

    // Every ground-truth image must be mapped.
    const std::map<std::string, std::string> partial = {{"k_1", "kidney"}, {"k_2", "kidney"}};
    CHECK_THROWS_AS(evaluate_grouped(preds, gts, partial, 15.0), InputError);
}

TEST_CASE("report_from_counts derives the same report as the full pipeline") {
    ImagePredictions preds;
    ImageGroundTruth gts;
    add_standard_image(preds, gts, "only");
    const auto full = evaluate_split(preds, gts, 15.0);
    CHECK(report_from_counts(full.counts) == full);
}
