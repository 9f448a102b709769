#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "celleval/types.hpp"

namespace celleval {

enum class Statistic {
    MeanF1,
    F1Tc,
    F1Bc,
    PrecisionTc,
    PrecisionBc,
    RecallTc,
    RecallBc,
};

const char* to_string(Statistic s);
std::optional<Statistic> parse_statistic(const std::string& s);

// Statistic evaluated on split-pooled counts.
double compute_statistic(const PerClass<MatchCounts>& pooled, Statistic stat);
double compute_statistic(const std::vector<PerClass<MatchCounts>>& per_image, Statistic stat);

struct ConfidenceInterval {
    double point = 0.0;
    double lo = 0.0;
    double hi = 0.0;

    bool operator==(const ConfidenceInterval&) const = default;
};

// Percentile bootstrap over images: each iteration resamples image indices
// with replacement (same size), pools the counts, and recomputes the
// statistic. Interval bounds are the (1-level)/2 and 1-(1-level)/2 empirical
// percentiles (linear interpolation between order statistics); the point
// estimate is the full-sample statistic. Iteration i draws from
// Rng(seed, i), so results are bit-identical for a given seed regardless
// of the worker count.
ConfidenceInterval bootstrap_ci(const std::vector<PerClass<MatchCounts>>& per_image,
                                Statistic stat,
                                int n_iter = 10000,
                                double level = 0.95,
                                std::uint64_t seed = 0,
                                int jobs = 1);

using TeamCounts = std::map<std::string, std::vector<PerClass<MatchCounts>>>;

struct RankMatrix {
    std::vector<std::string> teams; // column order
    // probability[rank][team]; each team column sums to 1.
    std::vector<std::vector<double>> probability;
};

// Rank-probability analysis: one shared image resample per iteration is
// applied to every team, teams are ranked by the statistic (descending),
// and ties share their rank slots uniformly.
RankMatrix rank_probability_matrix(const TeamCounts& teams,
                                   Statistic stat,
                                   int n_iter = 10000,
                                   std::uint64_t seed = 0,
                                   int jobs = 1);

struct PairwiseMatrix {
    std::vector<std::string> teams;
    // probability[row][col] that the row team outperforms the column team;
    // ties count 0.5 for each side, the diagonal is fixed at 0.5, and
    // probability[i][j] + probability[j][i] == 1 exactly.
    std::vector<std::vector<double>> probability;
};

PairwiseMatrix pairwise_outperformance(const TeamCounts& teams,
                                       Statistic stat,
                                       int n_iter = 10000,
                                       std::uint64_t seed = 0,
                                       int jobs = 1);

} // namespace celleval
