#include "celleval/metrics.hpp"

#include <algorithm>
#include <sstream>
#include <thread>

namespace celleval {

ClassMetrics class_metrics(const MatchCounts& counts) {
    ClassMetrics m;
    const long long pred_total = counts.tp + counts.fp;
    const long long gt_total = counts.tp + counts.fn;
    m.precision = pred_total > 0 ? static_cast<double>(counts.tp) / pred_total : 0.0;
    m.recall = gt_total > 0 ? static_cast<double>(counts.tp) / gt_total : 0.0;
    const double pr = m.precision + m.recall;
    m.f1 = pr > 0.0 ? 2.0 * m.precision * m.recall / pr : 0.0;
    return m;
}

EvalReport report_from_counts(const PerClass<MatchCounts>& pooled) {
    EvalReport report;
    report.counts = pooled;
    report.metrics.bc = class_metrics(pooled.bc);
    report.metrics.tc = class_metrics(pooled.tc);
    report.mean_f1 = (report.metrics.bc.f1 + report.metrics.tc.f1) / 2.0;
    return report;
}

ImageCounts per_image_counts(const ImagePredictions& preds,
                             const ImageGroundTruth& gts,
                             double radius_px,
                             int jobs) {
    std::vector<std::string> unknown;
    for (const auto& [id, cells] : preds) {
        if (!gts.count(id)) unknown.push_back(id);
    }
    if (!unknown.empty()) {
        std::ostringstream oss;
        oss << "predictions reference unknown image ids:";
        for (const auto& id : unknown) oss << " '" << id << "'";
        throw InputError(oss.str());
    }

    static const std::vector<PredictedCell> kNoPredictions;
    std::vector<const std::string*> ids;
    ids.reserve(gts.size());
    for (const auto& [id, cells] : gts) ids.push_back(&id);

    std::vector<PerClass<MatchCounts>> counts(ids.size());
    const auto work = [&](std::size_t i) {
        const auto it = preds.find(*ids[i]);
        const auto& p = it == preds.end() ? kNoPredictions : it->second;
        counts[i] = match_all(p, gts.at(*ids[i]), radius_px);
    };

    jobs = std::max(1, jobs);
    if (jobs == 1 || ids.size() <= 1) {
        for (std::size_t i = 0; i < ids.size(); ++i) work(i);
    } else {
        // Static chunking; each image writes only its own slot, so the
        // result is independent of the worker count.
        std::vector<std::thread> workers;
        const std::size_t n_workers = std::min<std::size_t>(jobs, ids.size());
        for (std::size_t w = 0; w < n_workers; ++w) {
            workers.emplace_back([&, w] {
                for (std::size_t i = w; i < ids.size(); i += n_workers) work(i);
            });
        }
        for (auto& t : workers) t.join();
    }

    ImageCounts out;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        out.emplace(*ids[i], counts[i]);
    }
    return out;
}

EvalReport evaluate_split(const ImagePredictions& preds,
                          const ImageGroundTruth& gts,
                          double radius_px,
                          int jobs) {
    PerClass<MatchCounts> pooled;
    for (const auto& [id, c] : per_image_counts(preds, gts, radius_px, jobs)) {
        pooled.bc += c.bc;
        pooled.tc += c.tc;
    }
    return report_from_counts(pooled);
}

std::map<std::string, EvalReport> evaluate_grouped(const ImagePredictions& preds,
                                                   const ImageGroundTruth& gts,
                                                   const std::map<std::string, std::string>& group_of,
                                                   double radius_px,
                                                   int jobs) {
    for (const auto& [id, cells] : gts) {
        if (!group_of.count(id)) {
            throw InputError("image '" + id + "' has no group assignment");
        }
    }
    std::map<std::string, PerClass<MatchCounts>> pooled;
    for (const auto& [id, c] : per_image_counts(preds, gts, radius_px, jobs)) {
        auto& p = pooled[group_of.at(id)];
        p.bc += c.bc;
        p.tc += c.tc;
    }
    std::map<std::string, EvalReport> out;
    for (const auto& [group, counts] : pooled) {
        out.emplace(group, report_from_counts(counts));
    }
    return out;
}

} // namespace celleval
