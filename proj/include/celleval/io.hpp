#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "celleval/fusion.hpp"
#include "celleval/labelgen.hpp"
#include "celleval/metrics.hpp"
#include "celleval/statistics.hpp"
#include "celleval/subgroup.hpp"
#include "celleval/types.hpp"

namespace celleval {

// All loaders throw InputError with the offending file (and line / pixel /
// element where applicable) in the message. Writers throw InputError when
// the target cannot be opened.

// Cell annotations: header-less CSV rows `x,y,class`, class 1=BC / 2=TC.
std::vector<GroundTruthCell> parse_cells_csv(std::istream& in, const std::string& name);
std::vector<GroundTruthCell> load_cells_csv(const std::string& path);
void save_cells_csv(const std::string& path, const std::vector<GroundTruthCell>& cells);

// Predictions for a whole split: JSON {"points": [{image_id, x, y, class,
// confidence}]}.
ImagePredictions parse_predictions_json(std::istream& in, const std::string& name);
ImagePredictions load_predictions_json(const std::string& path);
std::string predictions_json_string(const ImagePredictions& preds);
void save_predictions_json(const std::string& path, const ImagePredictions& preds);

// Tissue label raster: binary PGM (P5), maxval 255, values {1=BG, 2=CA,
// 255=UNK}.
TissueGrid parse_tissue_pgm(std::istream& in, const std::string& name);
TissueGrid load_tissue_pgm(const std::string& path);
void save_tissue_pgm(const std::string& path, const TissueGrid& grid);

// Probability raster: 16-bit PGM (maxval 65535, big-endian), value/65535;
// or a CSV float raster, one row per line.
TissueProbGrid parse_prob_pgm(std::istream& in, const std::string& name);
TissueProbGrid load_prob_pgm(const std::string& path);
void save_prob_pgm(const std::string& path, const TissueProbGrid& grid);
TissueProbGrid parse_prob_csv(std::istream& in, const std::string& name);
TissueProbGrid load_prob_csv(const std::string& path);
void save_prob_csv(const std::string& path, const TissueProbGrid& grid);

// Disk label raster: PGM, maxval 255, values {0=background, 1=BC, 2=TC}.
LabelMap load_label_pgm(const std::string& path);
void save_label_pgm(const std::string& path, const LabelMap& map);

// Heatmaps use the 16-bit probability-raster encoding.
Heatmap load_heatmap_pgm(const std::string& path);
void save_heatmap_pgm(const std::string& path, const Heatmap& map);

// Scored cells (fusion input): JSON {"cells": [{x, y, p_tc, p_bc}]}.
std::vector<ScoredCell> load_scored_cells_json(const std::string& path);
std::string scored_cells_json_string(const std::vector<ScoredCell>& cells);
void save_scored_cells_json(const std::string& path, const std::vector<ScoredCell>& cells);

// Pair metadata and manifests (JSON object / array of objects). Parsing is
// structural only; semantic checks live in validate_meta / validate_manifest.
PatchPairMeta load_pair_meta_json(const std::string& path);
void save_pair_meta_json(const std::string& path, const PatchPairMeta& meta);
DatasetManifest parse_manifest_json(std::istream& in, const std::string& name);
DatasetManifest load_manifest_json(const std::string& path);
void save_manifest_json(const std::string& path, const DatasetManifest& manifest);

// A split directory:
//   manifest.json                pair metadata array
//   annotations/<pair_id>.csv    ground-truth cells
//   tissue/<pair_id>.pgm         tissue label raster
//   tissue_prob/<pair_id>.pgm    cancer-probability raster (optional)
struct SplitData {
    DatasetManifest manifest;
    ImageGroundTruth cells;                    // keyed by pair_id
    std::map<std::string, TissueGrid> grids;   // keyed by pair_id
    std::map<std::string, TissueProbGrid> probs; // present only if on disk
    std::map<std::string, PatchPairMeta> metas;  // keyed by pair_id
};

// Loads and fully validates a split directory: every pair's files must
// exist, parse, and satisfy the core invariants (duplicate pair ids, bad
// geometry, out-of-range cells or labels all raise InputError).
SplitData load_split(const std::string& dir);
void save_split(const std::string& dir, const SplitData& data);

// View for region-conditioned analyses.
PerImageAnnotations to_annotations(const SplitData& data);

// Report emission. JSON output is canonical: keys sorted, floating-point
// values rounded to 6 significant digits.
std::string report_json(const EvalReport& report);
std::string grouped_report_json(const std::map<std::string, EvalReport>& groups,
                                const EvalReport& overall);
std::string ci_json(const ConfidenceInterval& ci, Statistic stat, int iterations,
                    double level, std::uint64_t seed);
std::string rank_json(const RankMatrix& m);
std::string pairwise_json(const PairwiseMatrix& m);
std::string cooccur_json(const CooccurrenceTable& table);
std::string subgroup_report_json(const EvalReport& report, TissueClass region,
                                 SubgroupSemantics semantics);
std::string validation_json(const ValidationReport& report, const ManifestCounts& counts);

// CSV views shaped for plotting: per-row entity, per-column metric.
std::string report_csv(const EvalReport& report);
std::string ci_csv(const ConfidenceInterval& ci, Statistic stat);
std::string rank_csv(const RankMatrix& m);
std::string pairwise_csv(const PairwiseMatrix& m);

} // namespace celleval
