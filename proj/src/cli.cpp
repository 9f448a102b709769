#include "celleval/cli.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "celleval/error.hpp"
#include "celleval/fusion.hpp"
#include "celleval/io.hpp"
#include "celleval/labelgen.hpp"
#include "celleval/matching.hpp"
#include "celleval/metrics.hpp"
#include "celleval/rng.hpp"
#include "celleval/statistics.hpp"
#include "celleval/subgroup.hpp"
#include "celleval/synth.hpp"
#include "celleval/types.hpp"

namespace celleval {

namespace {

using nlohmann::json;

void emit(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot open " + path + " for writing");
    f << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

Statistic statistic_or_throw(const std::string& name) {
    const auto s = parse_statistic(name);
    if (!s) throw ParamError("unknown statistic '" + name + "'");
    return *s;
}

TissueClass region_or_throw(const std::string& name) {
    if (name == "bg") return TissueClass::BG;
    if (name == "ca") return TissueClass::CA;
    throw ParamError("region must be 'bg' or 'ca'");
}

std::vector<PerClass<MatchCounts>> flatten(const ImageCounts& counts) {
    std::vector<PerClass<MatchCounts>> v;
    v.reserve(counts.size());
    for (const auto& [id, c] : counts) v.push_back(c);
    return v;
}

// Shared observation inputs for the resampling commands: one entry per
// ground-truth image, in image-id order, identical across teams.
TeamCounts load_teams(const std::vector<std::string>& specs,
                      const ImageGroundTruth& gts,
                      double radius_px,
                      int jobs) {
    TeamCounts teams;
    for (const auto& spec : specs) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
            throw ParamError("--team expects NAME=PREDICTIONS_FILE, got '" + spec + "'");
        }
        const std::string name = spec.substr(0, eq);
        const std::string path = spec.substr(eq + 1);
        if (teams.count(name)) throw ParamError("duplicate team name '" + name + "'");
        teams[name] = flatten(per_image_counts(load_predictions_json(path), gts, radius_px, jobs));
    }
    return teams;
}

json counts_json(const MatchCounts& c) {
    return json{{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}};
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"cell detection evaluation toolkit"};
    app.require_subcommand(1);

    // --- evaluate ---------------------------------------------------------
    struct {
        std::string data, predictions, output, format = "json";
        double radius_um = kDefaultRadiusUm, mpp = kCellMpp;
        int jobs = 1;
        bool by_organ = false;
    } ev;
    auto* evaluate = app.add_subcommand("evaluate", "score predictions against a split");
    evaluate->add_option("--data", ev.data, "split directory")->required();
    evaluate->add_option("--predictions", ev.predictions, "predictions JSON")->required();
    evaluate->add_option("--radius-um", ev.radius_um, "hit radius in micrometers");
    evaluate->add_option("--mpp", ev.mpp, "microns per pixel of the cell frame");
    evaluate->add_option("--jobs", ev.jobs, "worker threads");
    evaluate->add_option("--format", ev.format)->check(CLI::IsMember({"json", "csv"}));
    evaluate->add_option("-o,--output", ev.output, "write the report here instead of stdout");
    evaluate->add_flag("--by-organ", ev.by_organ, "also break the report down per organ");
    evaluate->callback([&] {
        const SplitData data = load_split(ev.data);
        const ImagePredictions preds = load_predictions_json(ev.predictions);
        const double radius_px = radius_px_from_um(ev.radius_um, ev.mpp);
        if (ev.by_organ) {
            if (ev.format != "json") throw ParamError("--by-organ supports only --format json");
            std::map<std::string, std::string> group_of;
            for (const auto& m : data.manifest.pairs) group_of[m.pair_id] = m.organ;
            const auto groups = evaluate_grouped(preds, data.cells, group_of, radius_px, ev.jobs);
            const auto overall = evaluate_split(preds, data.cells, radius_px, ev.jobs);
            emit(grouped_report_json(groups, overall), ev.output, out);
        } else {
            const auto report = evaluate_split(preds, data.cells, radius_px, ev.jobs);
            emit(ev.format == "csv" ? report_csv(report) : report_json(report), ev.output, out);
        }
    });

    // --- ci -----------------------------------------------------------------
    struct {
        std::string data, predictions, output, format = "json", statistic = "mf1";
        double radius_um = kDefaultRadiusUm, mpp = kCellMpp, level = 0.95;
        int iterations = 10000, jobs = 1;
        std::uint64_t seed = 0;
    } ci;
    auto* ci_cmd = app.add_subcommand("ci", "bootstrap confidence interval over images");
    ci_cmd->add_option("--data", ci.data, "split directory")->required();
    ci_cmd->add_option("--predictions", ci.predictions, "predictions JSON")->required();
    ci_cmd->add_option("--statistic", ci.statistic,
                       "mf1, f1-tc, f1-bc, precision-tc, precision-bc, recall-tc, recall-bc");
    ci_cmd->add_option("--iterations", ci.iterations, "bootstrap iterations");
    ci_cmd->add_option("--level", ci.level, "confidence level");
    ci_cmd->add_option("--seed", ci.seed, "resampling seed");
    ci_cmd->add_option("--radius-um", ci.radius_um, "hit radius in micrometers");
    ci_cmd->add_option("--mpp", ci.mpp, "microns per pixel of the cell frame");
    ci_cmd->add_option("--jobs", ci.jobs, "worker threads");
    ci_cmd->add_option("--format", ci.format)->check(CLI::IsMember({"json", "csv"}));
    ci_cmd->add_option("-o,--output", ci.output, "write the report here instead of stdout");
    ci_cmd->callback([&] {
        const SplitData data = load_split(ci.data);
        const ImagePredictions preds = load_predictions_json(ci.predictions);
        const double radius_px = radius_px_from_um(ci.radius_um, ci.mpp);
        const Statistic stat = statistic_or_throw(ci.statistic);
        const auto per_image = flatten(per_image_counts(preds, data.cells, radius_px, ci.jobs));
        const auto interval =
            bootstrap_ci(per_image, stat, ci.iterations, ci.level, ci.seed, ci.jobs);
        emit(ci.format == "csv" ? ci_csv(interval, stat)
                                : ci_json(interval, stat, ci.iterations, ci.level, ci.seed),
             ci.output, out);
    });

    // --- rank / pairwise ---------------------------------------------------
    struct {
        std::string data, output, format = "json", statistic = "mf1";
        std::vector<std::string> teams;
        double radius_um = kDefaultRadiusUm, mpp = kCellMpp;
        int iterations = 10000, jobs = 1;
        std::uint64_t seed = 0;
    } rk, pw;
    const auto add_team_options = [](CLI::App* cmd, auto& opts, const char* what) {
        cmd->add_option("--data", opts.data, "split directory")->required();
        cmd->add_option("--team", opts.teams, "NAME=PREDICTIONS_FILE (repeatable)")->required();
        cmd->add_option("--statistic", opts.statistic, "ranking statistic");
        cmd->add_option("--iterations", opts.iterations, "bootstrap iterations");
        cmd->add_option("--seed", opts.seed, "resampling seed");
        cmd->add_option("--radius-um", opts.radius_um, "hit radius in micrometers");
        cmd->add_option("--mpp", opts.mpp, "microns per pixel of the cell frame");
        cmd->add_option("--jobs", opts.jobs, "worker threads");
        cmd->add_option("--format", opts.format)->check(CLI::IsMember({"json", "csv"}));
        cmd->add_option("-o,--output", opts.output, std::string("write the ") + what +
                                                        " here instead of stdout");
    };
    auto* rank = app.add_subcommand("rank", "bootstrap rank-probability matrix across teams");
    add_team_options(rank, rk, "matrix");
    rank->callback([&] {
        const SplitData data = load_split(rk.data);
        const double radius_px = radius_px_from_um(rk.radius_um, rk.mpp);
        const auto teams = load_teams(rk.teams, data.cells, radius_px, rk.jobs);
        const auto m = rank_probability_matrix(teams, statistic_or_throw(rk.statistic),
                                               rk.iterations, rk.seed, rk.jobs);
        emit(rk.format == "csv" ? rank_csv(m) : rank_json(m), rk.output, out);
    });
    auto* pairwise = app.add_subcommand("pairwise", "bootstrap pairwise outperformance matrix");
    add_team_options(pairwise, pw, "matrix");
    pairwise->callback([&] {
        const SplitData data = load_split(pw.data);
        const double radius_px = radius_px_from_um(pw.radius_um, pw.mpp);
        const auto teams = load_teams(pw.teams, data.cells, radius_px, pw.jobs);
        const auto m = pairwise_outperformance(teams, statistic_or_throw(pw.statistic),
                                               pw.iterations, pw.seed, pw.jobs);
        emit(pw.format == "csv" ? pairwise_csv(m) : pairwise_json(m), pw.output, out);
    });

    // --- subgroup / cooccur -------------------------------------------------
    struct {
        std::string data, predictions, output, format = "json", region, semantics = "filter";
        double radius_um = kDefaultRadiusUm, mpp = kCellMpp;
    } sg;
    auto* subgroup = app.add_subcommand("subgroup", "evaluate only cells in one tissue region");
    subgroup->add_option("--data", sg.data, "split directory")->required();
    subgroup->add_option("--predictions", sg.predictions, "predictions JSON")->required();
    subgroup->add_option("--region", sg.region, "bg or ca")->required();
    subgroup->add_option("--semantics", sg.semantics, "filter: restrict both sides before "
                                                      "matching; attribute: match globally, then "
                                                      "attribute outcomes to regions")
        ->check(CLI::IsMember({"filter", "attribute"}));
    subgroup->add_option("--radius-um", sg.radius_um, "hit radius in micrometers");
    subgroup->add_option("--mpp", sg.mpp, "microns per pixel of the cell frame");
    subgroup->add_option("--format", sg.format)->check(CLI::IsMember({"json", "csv"}));
    subgroup->add_option("-o,--output", sg.output, "write the report here instead of stdout");
    subgroup->callback([&] {
        const SplitData data = load_split(sg.data);
        const ImagePredictions preds = load_predictions_json(sg.predictions);
        const double radius_px = radius_px_from_um(sg.radius_um, sg.mpp);
        const TissueClass region = region_or_throw(sg.region);
        const SubgroupSemantics semantics = sg.semantics == "attribute"
                                                ? SubgroupSemantics::MatchThenAttribute
                                                : SubgroupSemantics::FilterFirst;
        const auto report =
            subgroup_evaluate(preds, to_annotations(data), region, radius_px, semantics);
        emit(sg.format == "csv" ? report_csv(report)
                                : subgroup_report_json(report, region, semantics),
             sg.output, out);
    });

    struct {
        std::string data, output;
    } co;
    auto* cooccur = app.add_subcommand("cooccur", "cell class x tissue region co-occurrence");
    cooccur->add_option("--data", co.data, "split directory")->required();
    cooccur->add_option("-o,--output", co.output, "write the report here instead of stdout");
    cooccur->callback([&] {
        const SplitData data = load_split(co.data);
        emit(cooccur_json(cooccurrence_table(to_annotations(data))), co.output, out);
    });

    // --- labelgen / peaks ----------------------------------------------------
    struct {
        std::string cells, mode, output;
        double radius_um = kDefaultDiskRadiusUm, sigma_um = kDefaultGaussianSigmaUm,
               mpp = kCellMpp;
        int size = kCellPatchSize;
    } lg;
    auto* labelgen = app.add_subcommand("labelgen", "rasterize point annotations");
    labelgen->add_option("--cells", lg.cells, "cell annotation CSV")->required();
    labelgen->add_option("--mode", lg.mode, "disks or gaussians")
        ->required()
        ->check(CLI::IsMember({"disks", "gaussians"}));
    labelgen->add_option("--out", lg.output,
                         "disks: output PGM path; gaussians: prefix for "
                         "<prefix>.bc.pgm and <prefix>.tc.pgm")
        ->required();
    labelgen->add_option("--radius-um", lg.radius_um, "disk radius in micrometers");
    labelgen->add_option("--sigma-um", lg.sigma_um, "gaussian sigma in micrometers");
    labelgen->add_option("--mpp", lg.mpp, "microns per pixel");
    labelgen->add_option("--size", lg.size, "raster side length");
    labelgen->callback([&] {
        const auto cells = load_cells_csv(lg.cells);
        json written = json::array();
        if (lg.mode == "disks") {
            save_label_pgm(lg.output, points_to_disks(cells, lg.radius_um, lg.mpp, lg.size));
            written.push_back(lg.output);
        } else {
            const auto maps = points_to_gaussians(cells, lg.sigma_um, lg.mpp, lg.size);
            for (CellClass c : {CellClass::BC, CellClass::TC}) {
                const std::string path = lg.output + "." + to_string(c) + ".pgm";
                Heatmap map = maps.of(c);
                save_heatmap_pgm(path, map);
                written.push_back(path);
            }
        }
        out << dump(json{{"written", std::move(written)}});
    });

    struct {
        std::string bc, tc, image_id = "image", output;
        double min_distance = 7.0, threshold = 0.5;
    } pk;
    auto* peaks = app.add_subcommand("peaks", "extract point detections from heatmaps");
    peaks->add_option("--bc", pk.bc, "BC heatmap (16-bit PGM)");
    peaks->add_option("--tc", pk.tc, "TC heatmap (16-bit PGM)");
    peaks->add_option("--min-distance", pk.min_distance, "suppression radius in pixels");
    peaks->add_option("--threshold", pk.threshold, "minimum peak value");
    peaks->add_option("--image-id", pk.image_id, "image id for the emitted points");
    peaks->add_option("-o,--output", pk.output, "write predictions JSON here instead of stdout");
    peaks->callback([&] {
        if (pk.bc.empty() && pk.tc.empty()) throw ParamError("give --bc and/or --tc");
        std::vector<PredictedCell> cells;
        if (!pk.bc.empty()) {
            const auto found = peaks_from_heatmap(load_heatmap_pgm(pk.bc), CellClass::BC,
                                                  pk.min_distance, pk.threshold);
            cells.insert(cells.end(), found.begin(), found.end());
        }
        if (!pk.tc.empty()) {
            const auto found = peaks_from_heatmap(load_heatmap_pgm(pk.tc), CellClass::TC,
                                                  pk.min_distance, pk.threshold);
            cells.insert(cells.end(), found.begin(), found.end());
        }
        emit(predictions_json_string({{pk.image_id, cells}}), pk.output, out);
    });

    // --- fuse ------------------------------------------------------------------
    struct {
        std::string cells, meta, tissue, tissue_prob, mode, image_id = "image", output;
        double tau = 0.5, threshold = 0.5;
    } fu;
    auto* fuse = app.add_subcommand("fuse", "refine cell classes with tissue predictions");
    fuse->add_option("--cells", fu.cells, "scored cells JSON")->required();
    fuse->add_option("--meta", fu.meta, "pair metadata JSON")->required();
    fuse->add_option("--mode", fu.mode, "extreme, adaptive, or revise")
        ->required()
        ->check(CLI::IsMember({"extreme", "adaptive", "revise"}));
    fuse->add_option("--tissue", fu.tissue, "tissue label PGM (extreme mode)");
    fuse->add_option("--tissue-prob", fu.tissue_prob, "cancer-probability PGM");
    fuse->add_option("--threshold", fu.threshold, "CA threshold for extreme mode on probabilities");
    fuse->add_option("--tau", fu.tau, "background confidence needed to revise (revise mode)");
    fuse->add_option("--image-id", fu.image_id, "image id for emitted predictions");
    fuse->add_option("-o,--output", fu.output, "write the result here instead of stdout");
    fuse->callback([&] {
        const auto cells = load_scored_cells_json(fu.cells);
        const PatchPairMeta meta = load_pair_meta_json(fu.meta);
        validate_meta(meta);
        if (fu.mode == "extreme") {
            std::vector<PredictedCell> fused;
            if (!fu.tissue.empty()) {
                fused = extreme_fusion(cells, load_tissue_pgm(fu.tissue), meta);
            } else if (!fu.tissue_prob.empty()) {
                fused = extreme_fusion(cells, load_prob_pgm(fu.tissue_prob), meta, fu.threshold);
            } else {
                throw ParamError("extreme mode needs --tissue or --tissue-prob");
            }
            emit(predictions_json_string({{fu.image_id, fused}}), fu.output, out);
        } else {
            if (fu.tissue_prob.empty()) {
                throw ParamError(fu.mode + " mode needs --tissue-prob");
            }
            const TissueProbGrid prob = load_prob_pgm(fu.tissue_prob);
            if (fu.mode == "adaptive") {
                emit(scored_cells_json_string(adaptive_fusion(cells, prob, meta)), fu.output, out);
            } else {
                emit(predictions_json_string(
                         {{fu.image_id, background_revision(cells, prob, meta, fu.tau)}}),
                     fu.output, out);
            }
        }
    });

    // --- synth --------------------------------------------------------------------
    struct {
        std::string out_dir, organ = "synthetic", split = "train", output;
        int pairs = 4, blobs = 8, unk_border = 0;
        std::uint64_t seed = 0;
        double density = 300.0, min_sep = 4.0, radius_min = 40.0, radius_max = 200.0;
        double p_tc_ca = 0.885, p_bc_bg = 0.917;
        double drop = 0.0, jitter = 0.0, spurious = 0.0, flip = 0.0;
        double radius_um = kDefaultRadiusUm, mpp = kCellMpp;
        bool with_prob = false;
    } sy;
    auto* synth = app.add_subcommand("synth", "generate a synthetic corpus with known answers");
    synth->add_option("--out", sy.out_dir, "corpus directory to create")->required();
    synth->add_option("--pairs", sy.pairs, "number of patch pairs");
    synth->add_option("--seed", sy.seed, "master seed");
    synth->add_option("--density", sy.density, "cells per megapixel");
    synth->add_option("--min-sep", sy.min_sep, "minimum cell separation in pixels");
    synth->add_option("--blobs", sy.blobs, "cancer blobs per tissue patch");
    synth->add_option("--radius-min", sy.radius_min, "minimum blob radius (tissue px)");
    synth->add_option("--radius-max", sy.radius_max, "maximum blob radius (tissue px)");
    synth->add_option("--unk-border", sy.unk_border, "UNK border width (tissue px)");
    synth->add_option("--p-tc-ca", sy.p_tc_ca, "P(TC | cancer region)");
    synth->add_option("--p-bc-bg", sy.p_bc_bg, "P(BC | background region)");
    synth->add_option("--drop", sy.drop, "per-cell drop rate");
    synth->add_option("--jitter", sy.jitter, "jitter sigma in pixels");
    synth->add_option("--spurious", sy.spurious, "spurious detections per ground truth");
    synth->add_option("--flip", sy.flip, "class flip rate");
    synth->add_option("--radius-um", sy.radius_um, "hit radius used for spurious placement");
    synth->add_option("--mpp", sy.mpp, "microns per pixel of the cell frame");
    synth->add_flag("--with-prob", sy.with_prob, "also write probability rasters");
    synth->add_option("--split", sy.split)->check(CLI::IsMember({"train", "val", "test"}));
    synth->add_option("--organ", sy.organ, "organ label for the manifest");
    synth->add_option("-o,--output", sy.output, "write the summary here instead of stdout");
    synth->callback([&] {
        if (sy.pairs < 0) throw ParamError("--pairs must be non-negative");
        const double radius_px = radius_px_from_um(sy.radius_um, sy.mpp);

        TissueSynthParams tissue_params;
        tissue_params.n_blobs = sy.blobs;
        tissue_params.radius_min_px = sy.radius_min;
        tissue_params.radius_max_px = sy.radius_max;
        tissue_params.unk_border_px = sy.unk_border;

        CellSynthParams cell_params;
        cell_params.density_per_mpx = sy.density;
        cell_params.p_tc_given_ca = sy.p_tc_ca;
        cell_params.p_bc_given_bg = sy.p_bc_bg;
        cell_params.min_sep_px = sy.min_sep;

        PerturbParams perturb_params;
        perturb_params.drop_rate = sy.drop;
        perturb_params.jitter_sigma_px = sy.jitter;
        perturb_params.spurious_rate = sy.spurious;
        perturb_params.class_flip_rate = sy.flip;

        SplitData data;
        ImagePredictions preds;
        PerClass<MatchCounts> expected;
        bool exact = true;
        for (int i = 0; i < sy.pairs; ++i) {
            char id[32];
            std::snprintf(id, sizeof(id), "synth_%04d", i);

            Rng pair_rng(sy.seed, static_cast<std::uint64_t>(i));
            PatchPairMeta meta;
            meta.pair_id = id;
            meta.wsi_id = id;
            meta.organ = sy.organ;
            meta.split = *parse_split(sy.split);
            meta.cell_offset_x =
                static_cast<int>(pair_rng.next_below(kTissueNativeSize - kCellPatchSize + 1));
            meta.cell_offset_y =
                static_cast<int>(pair_rng.next_below(kTissueNativeSize - kCellPatchSize + 1));

            TissueGrid grid = gen_tissue(pair_rng.next_u64(), tissue_params);
            const auto cells = gen_cells(grid, meta, cell_params, pair_rng.next_u64());
            auto perturbed = perturb_to_predictions(cells, perturb_params, pair_rng.next_u64(),
                                                    radius_px, kCellPatchSize);

            if (sy.with_prob) {
                TissueProbGrid prob;
                prob.width = grid.width;
                prob.height = grid.height;
                prob.mpp = grid.mpp;
                prob.p_ca.resize(grid.labels.size());
                for (std::size_t p = 0; p < grid.labels.size(); ++p) {
                    prob.p_ca[p] = grid.labels[p] == TissueClass::CA   ? 1.0
                                   : grid.labels[p] == TissueClass::BG ? 0.0
                                                                       : 0.5;
                }
                data.probs[id] = std::move(prob);
            }
            data.manifest.pairs.push_back(meta);
            data.cells[id] = cells;
            data.grids[id] = std::move(grid);
            preds[id] = std::move(perturbed.predictions);
            expected.bc += perturbed.expected.bc;
            expected.tc += perturbed.expected.tc;
            exact = exact && perturbed.exact;
        }
        save_split(sy.out_dir, data);
        save_predictions_json(sy.out_dir + "/predictions.json", preds);
        out << dump(json{
            {"dir", sy.out_dir},
            {"pairs", sy.pairs},
            {"seed", sy.seed},
            {"exact", exact},
            {"expected", {{"bc", counts_json(expected.bc)}, {"tc", counts_json(expected.tc)}}},
        });
    });

    // --- validate ------------------------------------------------------------------
    struct {
        std::string manifest, output;
        double ratio_tolerance = 1.0;
    } va;
    auto* validate = app.add_subcommand("validate", "check a manifest's dataset invariants");
    validate->add_option("--manifest", va.manifest, "manifest JSON")->required();
    validate->add_option("--ratio-tolerance", va.ratio_tolerance,
                         "allowed deviation from the 6:2:2 split, in pairs");
    validate->add_option("-o,--output", va.output, "write the report here instead of stdout");
    validate->callback([&] {
        const DatasetManifest manifest = load_manifest_json(va.manifest);
        const ValidationReport report = validate_manifest(manifest, va.ratio_tolerance);
        emit(validation_json(report, manifest_counts(manifest)), va.output, out);
    });

    try {
        app.parse(argc, argv);
        return 0;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace celleval
