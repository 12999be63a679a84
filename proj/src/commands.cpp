#include "seleval/commands.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "seleval/config.hpp"
#include "seleval/curve.hpp"
#include "seleval/diagnostics.hpp"
#include "seleval/errors.hpp"
#include "seleval/prediction_log.hpp"
#include "seleval/report.hpp"
#include "seleval/scores.hpp"
#include "seleval/synth.hpp"
#include "numfmt.hpp"

namespace seleval {

namespace {

namespace fs = std::filesystem;

void write_text_file(const fs::path& path, const std::string& content) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create '" + path.parent_path().string() + "': " + ec.message());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::optional<LogFormat> parse_format(const std::string& name) {
    if (name.empty()) return std::nullopt;
    if (name == "csv") return LogFormat::csv;
    if (name == "jsonl") return LogFormat::jsonl;
    throw ValidationError("unknown log format '" + name + "' (expected csv or jsonl)");
}

// Loads every input file and merges records that belong to the same
// (model, dataset) across files, logs ordered by first appearance.
std::vector<PredictionLog> load_logs(const std::vector<std::string>& files,
                                     const std::optional<LogFormat>& format) {
    std::vector<PredictionLog> merged;
    std::map<std::pair<std::string, std::string>, std::size_t> index;
    for (const auto& file : files) {
        for (auto& log : parse_log_file(file, format)) {
            const auto key = std::make_pair(log.model_id, log.dataset_id);
            auto it = index.find(key);
            if (it == index.end()) {
                index.emplace(key, merged.size());
                merged.push_back(std::move(log));
            } else {
                auto& dst = merged[it->second].records;
                dst.insert(dst.end(), log.records.begin(), log.records.end());
            }
        }
    }
    return merged;
}

// Shared per-model pipeline: curve (optionally resampled), AUC, threshold
// sweep, and the standalone diagnostics.
ModelResult evaluate_model(const PredictionLog& log, const RunConfig& cfg) {
    ModelResult result;
    result.model_id = log.model_id;
    result.dataset_id = log.dataset_id;
    result.curve = build_curve(log);
    if (cfg.resample_bins) result.curve = resample(result.curve, *cfg.resample_bins);
    result.auc_value = auc(result.curve);
    result.sweep = disca_sweep(result.curve, cfg.disca_weights, cfg.thresholds);
    result.first_drop = first_drop(result.curve);
    result.fluctuations = find_fluctuations(result.curve);
    result.plateau = detect_plateau(result.curve, cfg.plateau.band_width, cfg.plateau.min_span,
                                    cfg.plateau.low_maxprob_ceiling);
    if (auto it = cfg.computation.find(log.model_id); it != cfg.computation.end()) {
        result.computation = computation_score(it->second);
    }
    return result;
}

// The sweep's first (highest) threshold provides the headline DiSCA that
// feeds DiDMA and NiDMA.
double headline_disca(const ModelResult& result) {
    return result.sweep.front().breakdown.total;
}

void sort_models(std::vector<ModelResult>& models) {
    std::sort(models.begin(), models.end(), [](const ModelResult& lhs, const ModelResult& rhs) {
        if (lhs.dataset_id != rhs.dataset_id) return lhs.dataset_id < rhs.dataset_id;
        const double l = headline_disca(lhs);
        const double r = headline_disca(rhs);
        if (l != r) return l > r;
        return lhs.model_id < rhs.model_id;
    });
}

void write_report_files(const ScoreReport& report, const fs::path& out_dir,
                        bool with_sweep_table) {
    write_text_file(out_dir / "report.json", report_json(report).dump(2) + "\n");
    if (with_sweep_table) {
        write_text_file(out_dir / "table.csv", emit_table(report, TableFormat::csv));
        write_text_file(out_dir / "table.md", emit_table(report, TableFormat::markdown));
    }
    for (const auto& model : report.models) {
        std::ostringstream csv;
        write_curve_csv(model.curve, csv);
        const auto name = sanitize_id(model.model_id) + "_" + sanitize_id(model.dataset_id) + ".csv";
        write_text_file(out_dir / "curves" / name, csv.str());
    }
    emit_plots(report,
               {PlotKind::rc_curve, PlotKind::a_bars, PlotKind::b_lines,
                PlotKind::fluctuation_bars},
               out_dir / "plots");
}

std::vector<PairTailFinding> pairwise_tails(const std::vector<ModelResult>& models,
                                            double coverage_limit) {
    std::vector<PairTailFinding> findings;
    for (std::size_t i = 0; i < models.size(); ++i) {
        for (std::size_t j = i + 1; j < models.size(); ++j) {
            findings.push_back(PairTailFinding{
                models[i].model_id, models[j].model_id,
                tail_compare(models[i].curve, models[j].curve, coverage_limit)});
        }
    }
    return findings;
}

int cmd_score(const std::vector<std::string>& files, const RunConfig& cfg,
              const fs::path& out_dir, const std::optional<LogFormat>& format,
              std::ostream& out) {
    auto logs = load_logs(files, format);
    for (const auto& log : logs) {
        if (log.dataset_id != logs.front().dataset_id) {
            throw ValidationError("score: logs span datasets '" + logs.front().dataset_id +
                                  "' and '" + log.dataset_id + "'; run once per dataset");
        }
    }

    ScoreReport report;
    report.config_echo = cfg.to_json();
    for (const auto& log : logs) {
        auto result = evaluate_model(log, cfg);
        if (result.computation) {
            result.didma = didma(headline_disca(result), *result.computation, cfg.composition);
        }
        report.models.push_back(std::move(result));
    }
    sort_models(report.models);
    report.tail_findings = pairwise_tails(report.models, cfg.tail_coverage_limit);

    write_report_files(report, out_dir, true);
    out << "scored " << report.models.size() << " model(s) on dataset '"
        << report.models.front().dataset_id << "' -> " << out_dir.string() << "\n";
    return 0;
}

int cmd_nidma(const std::string& iid_file, const std::string& ood_file, const RunConfig& cfg,
              const fs::path& out_dir, const std::optional<LogFormat>& format,
              std::ostream& out) {
    auto iid_logs = load_logs({iid_file}, format);
    auto ood_logs = load_logs({ood_file}, format);

    // One IID/OOD pair per model, matched by model_id.
    std::vector<ModelResult> iid_results;
    std::vector<ModelResult> ood_results;
    for (auto& iid_log : iid_logs) {
        auto match = std::find_if(ood_logs.begin(), ood_logs.end(), [&](const PredictionLog& l) {
            return l.model_id == iid_log.model_id;
        });
        if (match == ood_logs.end()) {
            throw ValidationError("nidma: no OOD log for model '" + iid_log.model_id + "'");
        }
        const ValidatedPair pair = validate_pair(std::move(iid_log), std::move(*match));
        ood_logs.erase(match);

        auto iid_result = evaluate_model(pair.iid, cfg);
        auto ood_result = evaluate_model(pair.ood, cfg);

        if (cfg.composition.q > 0.0 && !iid_result.computation) {
            throw ValidationError("nidma: composition weight q > 0 but no computation input for "
                                  "model '" + iid_result.model_id + "'");
        }
        const double comp = iid_result.computation.value_or(0.0);
        const double didma_score = didma(headline_disca(iid_result), comp, cfg.composition);
        const double disca_ood = headline_disca(ood_result);
        iid_result.didma = didma_score;
        iid_result.disca_ood = disca_ood;
        iid_result.nidma = nidma(didma_score, disca_ood, cfg.composition);

        iid_results.push_back(std::move(iid_result));
        ood_results.push_back(std::move(ood_result));
    }
    if (!ood_logs.empty()) {
        throw ValidationError("nidma: no IID log for model '" + ood_logs.front().model_id + "'");
    }

    ScoreReport report;
    report.config_echo = cfg.to_json();
    sort_models(iid_results);
    sort_models(ood_results);

    // Summary table: one row per model with the composite scores.
    std::string table = "model,auc_iid,auc_ood,disca_iid,disca_ood,computation_score,didma,nidma\n";
    for (const auto& iid_result : iid_results) {
        const auto& ood_result = *std::find_if(
            ood_results.begin(), ood_results.end(),
            [&](const ModelResult& m) { return m.model_id == iid_result.model_id; });
        table += iid_result.model_id + ',' + detail::sig12(iid_result.auc_value) + ',' +
                 detail::sig12(ood_result.auc_value) + ',' +
                 detail::sig12(headline_disca(iid_result)) + ',' +
                 detail::sig12(*iid_result.disca_ood) + ',' +
                 (iid_result.computation ? detail::sig12(*iid_result.computation) : "") + ',' +
                 detail::sig12(*iid_result.didma) + ',' + detail::sig12(*iid_result.nidma) + '\n';
    }

    for (auto& m : iid_results) report.models.push_back(std::move(m));
    for (auto& m : ood_results) report.models.push_back(std::move(m));
    write_report_files(report, out_dir, false);
    write_text_file(out_dir / "table.csv", table);
    out << "nidma report for " << iid_results.size() << " model(s) -> " << out_dir.string()
        << "\n";
    return 0;
}

int cmd_diagnose(const std::string& file, const RunConfig& cfg, const fs::path& out_dir,
                 const std::optional<LogFormat>& format, std::ostream& out) {
    const auto logs = load_logs({file}, format);

    ScoreReport report;
    report.config_echo = cfg.to_json();
    nlohmann::ordered_json findings = nlohmann::ordered_json::array();
    for (const auto& log : logs) {
        auto result = evaluate_model(log, cfg);

        nlohmann::ordered_json entry;
        entry["model_id"] = result.model_id;
        entry["dataset_id"] = result.dataset_id;
        entry["first_drop"] = {{"a", result.first_drop.a}, {"defined", result.first_drop.defined}};
        entry["tolerance_cutoffs"] = nlohmann::ordered_json::array();
        for (const auto& sweep_entry : result.sweep) {
            entry["tolerance_cutoffs"].push_back(nlohmann::ordered_json{
                {"worst_accuracy", sweep_entry.threshold},
                {"b", sweep_entry.breakdown.b},
                {"crossed", sweep_entry.breakdown.b_crossed},
            });
        }
        entry["fluctuations"] = nlohmann::ordered_json::array();
        for (const auto& ev : result.fluctuations) {
            entry["fluctuations"].push_back(nlohmann::ordered_json{
                {"index", ev.index},
                {"d1", ev.d1},
                {"d2", ev.d2},
                {"c1", ev.c1},
                {"c2", ev.c2},
                {"c_clamped", ev.c_clamped},
            });
        }
        if (result.plateau) {
            entry["plateau"] = {{"start_coverage", result.plateau->start_coverage},
                                {"end_coverage", result.plateau->end_coverage},
                                {"accuracy_band", result.plateau->accuracy_band},
                                {"min_threshold_in_region", result.plateau->min_threshold_in_region},
                                {"acceptable", result.plateau->acceptable}};
        } else {
            entry["plateau"] = nullptr;
        }
        findings.push_back(std::move(entry));
        report.models.push_back(std::move(result));
    }
    write_text_file(out_dir / "findings.json", findings.dump(2) + "\n");
    emit_plots(report, {PlotKind::rc_curve}, out_dir / "plots");
    out << "diagnostics for " << report.models.size() << " model(s) -> " << out_dir.string()
        << "\n";
    return 0;
}

int cmd_rank(const std::vector<std::string>& files, const RunConfig& cfg, const std::string& key,
             double threshold, const std::optional<LogFormat>& format, std::ostream& out) {
    const auto logs = load_logs(files, format);
    ScoreReport report;
    report.config_echo = cfg.to_json();
    for (const auto& log : logs) {
        auto result = evaluate_model(log, cfg);
        if (result.computation) {
            result.didma = didma(headline_disca(result), *result.computation, cfg.composition);
        }
        report.models.push_back(std::move(result));
    }
    const auto ranked = rank_models(report, rank_key_from_string(key), threshold);
    out << "rank,model,score\n";
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        out << (i + 1) << ',' << ranked[i].model_id << ',' << detail::sig12(ranked[i].score)
            << '\n';
    }
    return 0;
}

int cmd_curve(const std::string& file, std::optional<std::int64_t> bins,
              const fs::path& out_dir, const std::optional<LogFormat>& format,
              std::ostream& out) {
    const auto logs = load_logs({file}, format);
    for (const auto& log : logs) {
        RiskCoverageCurve curve = build_curve(log);
        if (bins) curve = resample(curve, *bins);
        std::ostringstream csv;
        write_curve_csv(curve, csv);
        const auto name = sanitize_id(log.model_id) + "_" + sanitize_id(log.dataset_id) + ".csv";
        write_text_file(out_dir / "curves" / name, csv.str());
    }
    out << "wrote " << logs.size() << " curve(s) -> " << (out_dir / "curves").string() << "\n";
    return 0;
}

struct SynthArgs {
    int table1_case = 0;  // 0 = shape mode
    std::string shape;
    double accuracy = 1.0;
    double level = 0.9;
    double floor = 0.5;
    int events = 1;
    double magnitude = 0.5;
    std::vector<double> targets;
    std::int64_t n = 200;
    std::uint64_t seed = 1;
    std::string model_id = "synthetic";
    std::string dataset_id = "synthetic";
};

int cmd_synth(const SynthArgs& args, const fs::path& out_dir, std::ostream& out) {
    if (args.table1_case != 0) {
        const Table1Pair pair = generate_table1_pair(args.table1_case, args.n, args.seed);
        const auto stem = "case" + std::to_string(args.table1_case);
        std::ostringstream csv_a;
        std::ostringstream csv_b;
        write_log_csv(pair.log_a, csv_a);
        write_log_csv(pair.log_b, csv_b);
        write_text_file(out_dir / (stem + "_a.csv"), csv_a.str());
        write_text_file(out_dir / (stem + "_b.csv"), csv_b.str());
        out << "verified: " << pair.verified_property << "\n";
        out << "wrote " << (out_dir / (stem + "_a.csv")).string() << " and "
            << (out_dir / (stem + "_b.csv")).string() << "\n";
        return 0;
    }

    SynthSpec spec;
    spec.n_samples = args.n;
    spec.seed = args.seed;
    spec.model_id = args.model_id;
    spec.dataset_id = args.dataset_id;
    if (args.shape == "calibrated") {
        spec.shape = CalibratedShape{args.accuracy};
    } else if (args.shape == "plateau") {
        spec.shape = PlateauShape{args.level, args.floor};
    } else if (args.shape == "fluctuating") {
        spec.shape = FluctuatingShape{args.events, args.magnitude};
    } else if (args.shape == "staircase") {
        spec.shape = StaircaseShape{args.targets};
    } else {
        throw ValidationError("synth: pass --table1-case or --shape "
                              "calibrated|plateau|fluctuating|staircase");
    }
    const PredictionLog log = generate(spec);
    std::ostringstream csv;
    write_log_csv(log, csv);
    const auto path = out_dir / (args.shape + ".csv");
    write_text_file(path, csv.str());
    out << "wrote " << path.string() << " (" << log.records.size() << " records)\n";
    return 0;
}

// Configuration sources compose as defaults < --config file < flags.
struct ConfigFlags {
    std::string config_path;
    std::vector<double> weights;
    std::vector<double> thresholds;
    double p = -1.0, q = -1.0, u = -1.0, v = -1.0;
    double band_width = -1.0, min_span = -1.0, ceiling = -1.0;
    double coverage_limit = -1.0;
    std::int64_t bins = 0;

    void add_options(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file");
        cmd->add_option("--weights", weights, "DiSCA weights x,y,z")->delimiter(',')->expected(3);
        cmd->add_option("--thresholds", thresholds,
                        "worst-accuracy sweep, strictly decreasing in [0.5,1.0]")
            ->delimiter(',');
        cmd->add_option("--p", p, "DiDMA weight on DiSCA");
        cmd->add_option("--q", q, "DiDMA weight on the computation score");
        cmd->add_option("--u", u, "NiDMA weight on DiDMA");
        cmd->add_option("--v", v, "NiDMA weight on DiSCA(OOD)");
        cmd->add_option("--band-width", band_width, "plateau accuracy band");
        cmd->add_option("--min-span", min_span, "minimum plateau coverage span");
        cmd->add_option("--maxprob-ceiling", ceiling, "plateau acceptability ceiling");
        cmd->add_option("--coverage-limit", coverage_limit, "tail comparison coverage limit");
        cmd->add_option("--bins", bins, "resample curves to this many coverage bins");
    }

    RunConfig resolve(const CLI::App* cmd) const {
        RunConfig cfg;
        if (cmd->count("--config") > 0) cfg = RunConfig::load_file(config_path);
        if (cmd->count("--weights") > 0) {
            cfg.disca_weights = DiscaWeights{weights[0], weights[1], weights[2]};
        }
        if (cmd->count("--thresholds") > 0) cfg.thresholds = thresholds;
        if (cmd->count("--p") > 0) cfg.composition.p = p;
        if (cmd->count("--q") > 0) cfg.composition.q = q;
        if (cmd->count("--u") > 0) cfg.composition.u = u;
        if (cmd->count("--v") > 0) cfg.composition.v = v;
        if (cmd->count("--band-width") > 0) cfg.plateau.band_width = band_width;
        if (cmd->count("--min-span") > 0) cfg.plateau.min_span = min_span;
        if (cmd->count("--maxprob-ceiling") > 0) cfg.plateau.low_maxprob_ceiling = ceiling;
        if (cmd->count("--coverage-limit") > 0) cfg.tail_coverage_limit = coverage_limit;
        if (cmd->count("--bins") > 0) cfg.resample_bins = bins;
        cfg.validate();
        return cfg;
    }
};

}  // namespace

int seleval_main(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"selective-answering evaluation: coverage-accuracy curves, AUC diagnostics, "
                 "and the DiSCA/DiDMA/NiDMA scores"};
    app.require_subcommand(1);

    std::string format_name;
    std::string out_dir = "seleval-out";

    // score
    auto* score = app.add_subcommand("score", "score logs and write a full report");
    std::vector<std::string> score_files;
    score->add_option("logs", score_files, "prediction log files")->required();
    score->add_option("--out", out_dir, "output directory");
    score->add_option("--format", format_name, "input format: csv|jsonl");
    ConfigFlags score_cfg;
    score_cfg.add_options(score);

    // nidma
    auto* nidma_cmd = app.add_subcommand("nidma", "score an IID/OOD log pair");
    std::string iid_file;
    std::string ood_file;
    nidma_cmd->add_option("--iid", iid_file, "IID prediction log")->required();
    nidma_cmd->add_option("--ood", ood_file, "OOD prediction log")->required();
    nidma_cmd->add_option("--out", out_dir, "output directory");
    nidma_cmd->add_option("--format", format_name, "input format: csv|jsonl");
    ConfigFlags nidma_cfg;
    nidma_cfg.add_options(nidma_cmd);

    // diagnose
    auto* diagnose = app.add_subcommand("diagnose", "extract a/b, fluctuations, and plateaus");
    std::string diagnose_file;
    diagnose->add_option("log", diagnose_file, "prediction log file")->required();
    diagnose->add_option("--out", out_dir, "output directory");
    diagnose->add_option("--format", format_name, "input format: csv|jsonl");
    ConfigFlags diagnose_cfg;
    diagnose_cfg.add_options(diagnose);

    // rank
    auto* rank = app.add_subcommand("rank", "rank models by a score key");
    std::vector<std::string> rank_files;
    std::string rank_key = "disca";
    double rank_threshold = -1.0;
    rank->add_option("logs", rank_files, "prediction log files")->required();
    rank->add_option("--key", rank_key, "ranking key: disca|auc|didma|nidma");
    rank->add_option("--threshold", rank_threshold, "sweep threshold for the disca key");
    rank->add_option("--format", format_name, "input format: csv|jsonl");
    ConfigFlags rank_cfg;
    rank_cfg.add_options(rank);

    // synth
    auto* synth = app.add_subcommand("synth", "generate synthetic prediction logs");
    SynthArgs synth_args;
    synth->add_option("--table1-case", synth_args.table1_case, "adversarial pair case (1-6)")
        ->check(CLI::Range(1, 6));
    synth->add_option("--shape", synth_args.shape,
                      "curve shape: calibrated|plateau|fluctuating|staircase");
    synth->add_option("--acc", synth_args.accuracy, "calibrated: accuracy at full coverage");
    synth->add_option("--level", synth_args.level, "plateau: accuracy level");
    synth->add_option("--floor", synth_args.floor, "plateau: lowest confidence");
    synth->add_option("--events", synth_args.events, "fluctuating: number of rising runs");
    synth->add_option("--magnitude", synth_args.magnitude, "fluctuating: dip depth in [0,1]");
    synth->add_option("--targets", synth_args.targets, "staircase: 10 decile accuracies")
        ->delimiter(',');
    synth->add_option("--n", synth_args.n, "number of samples");
    synth->add_option("--seed", synth_args.seed, "generator seed");
    synth->add_option("--model-id", synth_args.model_id, "model id for shape logs");
    synth->add_option("--dataset-id", synth_args.dataset_id, "dataset id for shape logs");
    synth->add_option("--out", out_dir, "output directory");

    // curve
    auto* curve_cmd = app.add_subcommand("curve", "export coverage-accuracy curves as CSV");
    std::string curve_file;
    std::int64_t curve_bins = 0;
    curve_cmd->add_option("log", curve_file, "prediction log file")->required();
    curve_cmd->add_option("--bins", curve_bins, "resample to this many coverage bins");
    curve_cmd->add_option("--out", out_dir, "output directory");
    curve_cmd->add_option("--format", format_name, "input format: csv|jsonl");

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        const auto format = parse_format(format_name);
        if (score->parsed()) {
            return cmd_score(score_files, score_cfg.resolve(score), out_dir, format, out);
        }
        if (nidma_cmd->parsed()) {
            return cmd_nidma(iid_file, ood_file, nidma_cfg.resolve(nidma_cmd), out_dir, format,
                             out);
        }
        if (diagnose->parsed()) {
            return cmd_diagnose(diagnose_file, diagnose_cfg.resolve(diagnose), out_dir, format,
                                out);
        }
        if (rank->parsed()) {
            const RunConfig cfg = rank_cfg.resolve(rank);
            const double threshold =
                rank->count("--threshold") > 0 ? rank_threshold : cfg.thresholds.front();
            return cmd_rank(rank_files, cfg, rank_key, threshold, format, out);
        }
        if (synth->parsed()) {
            if (synth->count("--table1-case") > 0 && !synth_args.shape.empty()) {
                throw ValidationError("synth: --table1-case and --shape are mutually exclusive");
            }
            return cmd_synth(synth_args, out_dir, out);
        }
        if (curve_cmd->parsed()) {
            return cmd_curve(curve_file,
                             curve_cmd->count("--bins") > 0
                                 ? std::optional<std::int64_t>(curve_bins)
                                 : std::nullopt,
                             out_dir, format, out);
        }
        err << "error: no command\n";
        return 1;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace seleval
