#include "celleval/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <thread>

#include "celleval/metrics.hpp"
#include "celleval/rng.hpp"

namespace celleval {

const char* to_string(Statistic s) {
    switch (s) {
        case Statistic::MeanF1: return "mf1";
        case Statistic::F1Tc: return "f1-tc";
        case Statistic::F1Bc: return "f1-bc";
        case Statistic::PrecisionTc: return "precision-tc";
        case Statistic::PrecisionBc: return "precision-bc";
        case Statistic::RecallTc: return "recall-tc";
        default: return "recall-bc";
    }
}

std::optional<Statistic> parse_statistic(const std::string& s) {
    for (Statistic stat : {Statistic::MeanF1, Statistic::F1Tc, Statistic::F1Bc,
                           Statistic::PrecisionTc, Statistic::PrecisionBc,
                           Statistic::RecallTc, Statistic::RecallBc}) {
        if (s == to_string(stat)) return stat;
    }
    return std::nullopt;
}

double compute_statistic(const PerClass<MatchCounts>& pooled, Statistic stat) {
    const ClassMetrics bc = class_metrics(pooled.bc);
    const ClassMetrics tc = class_metrics(pooled.tc);
    switch (stat) {
        case Statistic::MeanF1: return (bc.f1 + tc.f1) / 2.0;
        case Statistic::F1Tc: return tc.f1;
        case Statistic::F1Bc: return bc.f1;
        case Statistic::PrecisionTc: return tc.precision;
        case Statistic::PrecisionBc: return bc.precision;
        case Statistic::RecallTc: return tc.recall;
        default: return bc.recall;
    }
}

double compute_statistic(const std::vector<PerClass<MatchCounts>>& per_image, Statistic stat) {
    PerClass<MatchCounts> pooled;
    for (const auto& c : per_image) {
        pooled.bc += c.bc;
        pooled.tc += c.tc;
    }
    return compute_statistic(pooled, stat);
}

namespace {

// Run fn(iteration) for every iteration, split over `jobs` threads. Each
// iteration owns its output slot, so scheduling never affects results.
void for_each_iteration(int n_iter, int jobs, const std::function<void(int)>& fn) {
    jobs = std::max(1, jobs);
    if (jobs == 1 || n_iter <= 1) {
        for (int i = 0; i < n_iter; ++i) fn(i);
        return;
    }
    std::vector<std::thread> workers;
    const int n_workers = std::min(jobs, n_iter);
    for (int w = 0; w < n_workers; ++w) {
        workers.emplace_back([&, w] {
            for (int i = w; i < n_iter; i += n_workers) fn(i);
        });
    }
    for (auto& t : workers) t.join();
}

std::vector<std::size_t> resample_indices(std::size_t n, Rng& rng) {
    std::vector<std::size_t> idx(n);
    for (auto& v : idx) v = static_cast<std::size_t>(rng.next_below(n));
    return idx;
}

double pooled_statistic(const std::vector<PerClass<MatchCounts>>& per_image,
                        const std::vector<std::size_t>& idx,
                        Statistic stat) {
    PerClass<MatchCounts> pooled;
    for (std::size_t i : idx) {
        pooled.bc += per_image[i].bc;
        pooled.tc += per_image[i].tc;
    }
    return compute_statistic(pooled, stat);
}

// Linear interpolation between order statistics (q in [0,1], values sorted).
double percentile_sorted(const std::vector<double>& sorted, double q) {
    const double h = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

void check_bootstrap_args(std::size_t n_images, int n_iter, double level) {
    if (n_images == 0) throw ParamError("bootstrap needs at least one image");
    if (n_iter <= 0) throw ParamError("iteration count must be positive");
    if (!(level > 0.0 && level < 1.0)) throw ParamError("confidence level must be in (0, 1)");
}

std::vector<std::string> team_order(const TeamCounts& teams) {
    std::vector<std::string> names;
    names.reserve(teams.size());
    for (const auto& [name, counts] : teams) names.push_back(name);
    return names;
}

std::size_t check_team_args(const TeamCounts& teams, int n_iter) {
    if (teams.empty()) throw ParamError("need at least one team");
    if (n_iter <= 0) throw ParamError("iteration count must be positive");
    std::size_t n_images = teams.begin()->second.size();
    for (const auto& [name, counts] : teams) {
        if (counts.size() != n_images) {
            throw InputError("team '" + name + "' covers " + std::to_string(counts.size()) +
                             " images, expected " + std::to_string(n_images));
        }
    }
    if (n_images == 0) throw ParamError("teams cover no images");
    return n_images;
}

// Per-iteration statistic value for every team under one shared resample.
// Stored per iteration; all accumulation happens afterwards in iteration
// order so matrices are identical for any worker count.
std::vector<std::vector<double>> shared_resample_stats(const TeamCounts& teams,
                                                       const std::vector<std::string>& names,
                                                       Statistic stat,
                                                       int n_iter,
                                                       std::uint64_t seed,
                                                       int jobs,
                                                       std::size_t n_images) {
    std::vector<const std::vector<PerClass<MatchCounts>>*> columns;
    columns.reserve(names.size());
    for (const auto& name : names) columns.push_back(&teams.at(name));

    std::vector<std::vector<double>> stats(n_iter, std::vector<double>(names.size()));
    for_each_iteration(n_iter, jobs, [&](int i) {
        Rng rng(seed, static_cast<std::uint64_t>(i));
        const auto idx = resample_indices(n_images, rng);
        for (std::size_t t = 0; t < columns.size(); ++t) {
            stats[i][t] = pooled_statistic(*columns[t], idx, stat);
        }
    });
    return stats;
}

} // namespace

ConfidenceInterval bootstrap_ci(const std::vector<PerClass<MatchCounts>>& per_image,
                                Statistic stat,
                                int n_iter,
                                double level,
                                std::uint64_t seed,
                                int jobs) {
    check_bootstrap_args(per_image.size(), n_iter, level);

    std::vector<double> values(n_iter);
    for_each_iteration(n_iter, jobs, [&](int i) {
        Rng rng(seed, static_cast<std::uint64_t>(i));
        values[i] = pooled_statistic(per_image, resample_indices(per_image.size(), rng), stat);
    });
    std::sort(values.begin(), values.end());

    ConfidenceInterval ci;
    ci.point = compute_statistic(per_image, stat);
    const double alpha = (1.0 - level) / 2.0;
    ci.lo = percentile_sorted(values, alpha);
    ci.hi = percentile_sorted(values, 1.0 - alpha);
    return ci;
}

RankMatrix rank_probability_matrix(const TeamCounts& teams,
                                   Statistic stat,
                                   int n_iter,
                                   std::uint64_t seed,
                                   int jobs) {
    const std::size_t n_images = check_team_args(teams, n_iter);
    RankMatrix out;
    out.teams = team_order(teams);
    const std::size_t n_teams = out.teams.size();
    const auto stats = shared_resample_stats(teams, out.teams, stat, n_iter, seed, jobs, n_images);

    out.probability.assign(n_teams, std::vector<double>(n_teams, 0.0));
    std::vector<std::size_t> order(n_teams);
    for (int i = 0; i < n_iter; ++i) {
        const auto& s = stats[i];
        for (std::size_t t = 0; t < n_teams; ++t) order[t] = t;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (s[a] != s[b]) return s[a] > s[b];
            return a < b;
        });
        // Tied teams share their block of rank slots uniformly.
        std::size_t start = 0;
        while (start < n_teams) {
            std::size_t end = start + 1;
            while (end < n_teams && s[order[end]] == s[order[start]]) ++end;
            const double weight = 1.0 / static_cast<double>(end - start);
            for (std::size_t rank = start; rank < end; ++rank) {
                for (std::size_t k = start; k < end; ++k) {
                    out.probability[rank][order[k]] += weight;
                }
            }
            start = end;
        }
    }
    for (auto& row : out.probability) {
        for (auto& v : row) v /= static_cast<double>(n_iter);
    }
    return out;
}

PairwiseMatrix pairwise_outperformance(const TeamCounts& teams,
                                       Statistic stat,
                                       int n_iter,
                                       std::uint64_t seed,
                                       int jobs) {
    const std::size_t n_images = check_team_args(teams, n_iter);
    PairwiseMatrix out;
    out.teams = team_order(teams);
    const std::size_t n_teams = out.teams.size();
    const auto stats = shared_resample_stats(teams, out.teams, stat, n_iter, seed, jobs, n_images);

    out.probability.assign(n_teams, std::vector<double>(n_teams, 0.5));
    for (std::size_t a = 0; a < n_teams; ++a) {
        for (std::size_t b = a + 1; b < n_teams; ++b) {
            double wins = 0.0; // 1 per win, 0.5 per tie; exact in doubles
            for (int i = 0; i < n_iter; ++i) {
                if (stats[i][a] > stats[i][b]) {
                    wins += 1.0;
                } else if (stats[i][a] == stats[i][b]) {
                    wins += 0.5;
                }
            }
            const double p = wins / static_cast<double>(n_iter);
            out.probability[a][b] = p;
            out.probability[b][a] = 1.0 - p;
        }
    }
    return out;
}

} // namespace celleval
