#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "seleval/curve.hpp"
#include "seleval/diagnostics.hpp"
#include "seleval/scores.hpp"

namespace seleval {

// Everything computed for one (model, dataset): the curve, the threshold
// sweep, and the diagnostic findings. Composite scores are present only
// when their inputs were supplied.
struct ModelResult {
    std::string model_id;
    std::string dataset_id;
    RiskCoverageCurve curve;
    double auc_value = 0.0;
    std::vector<SweepEntry> sweep;
    FirstDrop first_drop;
    std::vector<FluctuationEvent> fluctuations;
    std::optional<PlateauFinding> plateau;
    std::optional<double> computation;
    std::optional<double> didma;
    std::optional<double> nidma;
    std::optional<double> disca_ood;
};

// Pairwise AUC-vs-tail comparison between two models of the same report.
struct PairTailFinding {
    std::string model_a;
    std::string model_b;
    TailFinding finding;
};

struct ScoreReport {
    nlohmann::ordered_json config_echo;  // the full resolved configuration
    std::vector<ModelResult> models;     // sorted by the active ranking key
    std::vector<PairTailFinding> tail_findings;
};

enum class RankKey { disca_at, auc, didma, nidma };

RankKey rank_key_from_string(const std::string& name);

struct RankedModel {
    std::string model_id;
    double score = 0.0;
};

// Descending by key, ties broken by model_id. All models must share one
// dataset; when several reports are merged they must carry identical
// configurations. `threshold` selects the sweep column for the disca_at,
// didma and nidma keys default to the models' stored composites.
std::vector<RankedModel> rank_models(const std::vector<const ScoreReport*>& reports, RankKey key,
                                     double threshold);
std::vector<RankedModel> rank_models(const ScoreReport& report, RankKey key, double threshold);

enum class TableFormat { csv, markdown };

// One row per model, a (score, cell_class) column pair per threshold.
// Scores carry 12 significant digits; parsing them back and re-emitting
// reproduces the table byte for byte.
std::string emit_table(const ScoreReport& report, TableFormat format);

enum class PlotKind { rc_curve, a_bars, b_lines, fluctuation_bars };

PlotKind plot_kind_from_string(const std::string& name);

// One standalone SVG per kind per dataset in the report, named
// `<kind>_<dataset>.svg` under out_dir. Output contains no timestamps or
// absolute paths; identical reports produce byte-identical files. Returns
// the list of files written.
std::vector<std::filesystem::path> emit_plots(const ScoreReport& report,
                                              const std::set<PlotKind>& kinds,
                                              const std::filesystem::path& out_dir);

// The report.json payload: config echo, per-model scores/diagnostics, and
// pairwise tail findings, with the exact field names of the finding types.
nlohmann::ordered_json report_json(const ScoreReport& report);

// Filesystem-safe form of a model/dataset id used in output file names.
std::string sanitize_id(const std::string& id);

}  // namespace seleval
