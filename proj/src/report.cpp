#include "seleval/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "seleval/errors.hpp"
#include "numfmt.hpp"
#include "svg.hpp"

namespace seleval {

namespace {

// Threshold labels in table headers: plain %g keeps 0.95 as "0.95".
std::string threshold_label(double t) { return detail::format_g(t, 6); }

void require_single_dataset(const ScoreReport& report, const char* op) {
    for (const auto& m : report.models) {
        if (m.dataset_id != report.models.front().dataset_id) {
            throw ValidationError(std::string(op) + ": models span multiple datasets ('" +
                                  report.models.front().dataset_id + "' vs '" + m.dataset_id +
                                  "')");
        }
    }
}

double key_score(const ModelResult& model, RankKey key, double threshold) {
    switch (key) {
        case RankKey::auc:
            return model.auc_value;
        case RankKey::disca_at: {
            for (const auto& entry : model.sweep) {
                if (std::abs(entry.threshold - threshold) <= 1e-9) return entry.breakdown.total;
            }
            throw ValidationError("rank: no sweep entry at threshold " +
                                  detail::format_g(threshold, 6) + " for model '" +
                                  model.model_id + "'");
        }
        case RankKey::didma:
            if (!model.didma) {
                throw ValidationError("rank: didma not computed for model '" + model.model_id +
                                      "'");
            }
            return *model.didma;
        case RankKey::nidma:
            if (!model.nidma) {
                throw ValidationError("rank: nidma not computed for model '" + model.model_id +
                                      "'");
            }
            return *model.nidma;
    }
    throw ValidationError("rank: unknown key");
}

}  // namespace

RankKey rank_key_from_string(const std::string& name) {
    if (name == "disca") return RankKey::disca_at;
    if (name == "auc") return RankKey::auc;
    if (name == "didma") return RankKey::didma;
    if (name == "nidma") return RankKey::nidma;
    throw ValidationError("unknown rank key '" + name + "' (expected disca|auc|didma|nidma)");
}

std::vector<RankedModel> rank_models(const std::vector<const ScoreReport*>& reports, RankKey key,
                                     double threshold) {
    if (reports.empty()) throw ValidationError("rank: no reports");
    const auto& reference_config = reports.front()->config_echo;
    std::vector<RankedModel> ranked;
    std::string dataset;
    for (const ScoreReport* report : reports) {
        if (report->config_echo != reference_config) {
            throw ValidationError("rank: reports were produced with different configurations");
        }
        for (const auto& model : report->models) {
            if (dataset.empty()) {
                dataset = model.dataset_id;
            } else if (model.dataset_id != dataset) {
                throw ValidationError("rank: models span multiple datasets ('" + dataset +
                                      "' vs '" + model.dataset_id + "')");
            }
            ranked.push_back(RankedModel{model.model_id, key_score(model, key, threshold)});
        }
    }
    std::sort(ranked.begin(), ranked.end(), [](const RankedModel& lhs, const RankedModel& rhs) {
        if (lhs.score != rhs.score) return lhs.score > rhs.score;
        return lhs.model_id < rhs.model_id;
    });
    return ranked;
}

std::vector<RankedModel> rank_models(const ScoreReport& report, RankKey key, double threshold) {
    return rank_models(std::vector<const ScoreReport*>{&report}, key, threshold);
}

std::string emit_table(const ScoreReport& report, TableFormat format) {
    if (report.models.empty()) throw ValidationError("emit_table: report has no models");
    require_single_dataset(report, "emit_table");

    const auto& sweep0 = report.models.front().sweep;
    for (const auto& model : report.models) {
        if (model.sweep.size() != sweep0.size()) {
            throw ValidationError("emit_table: models carry different threshold sweeps");
        }
    }

    std::vector<std::string> header{"model"};
    for (const auto& entry : sweep0) {
        header.push_back("disca_" + threshold_label(entry.threshold));
        header.push_back("class_" + threshold_label(entry.threshold));
    }

    std::vector<std::vector<std::string>> rows;
    for (const auto& model : report.models) {
        std::vector<std::string> row{model.model_id};
        for (const auto& entry : model.sweep) {
            row.push_back(detail::sig12(entry.breakdown.total));
            row.push_back(to_string(entry.cell_class));
        }
        rows.push_back(std::move(row));
    }

    std::string out;
    if (format == TableFormat::csv) {
        auto join = [&out](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                if (i > 0) out += ',';
                out += cells[i];
            }
            out += '\n';
        };
        join(header);
        for (const auto& row : rows) join(row);
    } else {
        auto join = [&out](const std::vector<std::string>& cells) {
            out += '|';
            for (const auto& cell : cells) {
                out += ' ';
                out += cell;
                out += " |";
            }
            out += '\n';
        };
        join(header);
        out += '|';
        for (std::size_t i = 0; i < header.size(); ++i) out += " --- |";
        out += '\n';
        for (const auto& row : rows) join(row);
    }
    return out;
}

std::string sanitize_id(const std::string& id) {
    std::string out = id;
    for (char& c : out) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
        if (!ok) c = '_';
    }
    return out;
}

PlotKind plot_kind_from_string(const std::string& name) {
    if (name == "rc_curve") return PlotKind::rc_curve;
    if (name == "a_bars") return PlotKind::a_bars;
    if (name == "b_lines") return PlotKind::b_lines;
    if (name == "fluctuation_bars") return PlotKind::fluctuation_bars;
    throw ValidationError("unknown plot kind '" + name + "'");
}

namespace {

using detail::SvgCanvas;

constexpr int kWidth = 640;
constexpr int kHeight = 480;
constexpr double kLeft = 60.0;
constexpr double kRight = 470.0;
constexpr double kTop = 30.0;
constexpr double kBottom = 440.0;

struct UnitFrame {
    double x(double unit) const { return kLeft + unit * (kRight - kLeft); }
    double y(double unit) const { return kBottom - unit * (kBottom - kTop); }
};

void draw_unit_axes(SvgCanvas& svg, const std::string& x_label, const std::string& y_label) {
    const UnitFrame frame;
    for (int i = 0; i <= 4; ++i) {
        const double v = i * 0.25;
        svg.line(frame.x(v), kBottom, frame.x(v), kBottom + 4, "black");
        svg.text(frame.x(v), kBottom + 18, SvgCanvas::num(v), "black", 10, "middle");
        svg.line(kLeft - 4, frame.y(v), kLeft, frame.y(v), "black");
        svg.text(kLeft - 8, frame.y(v) + 4, SvgCanvas::num(v), "black", 10, "end");
        if (i > 0) {
            svg.line(frame.x(v), kTop, frame.x(v), kBottom, "#dddddd", 0.5);
            svg.line(kLeft, frame.y(v), kRight, frame.y(v), "#dddddd", 0.5);
        }
    }
    svg.line(kLeft, kTop, kLeft, kBottom, "black");
    svg.line(kLeft, kBottom, kRight, kBottom, "black");
    svg.text((kLeft + kRight) / 2, kHeight - 8, x_label, "black", 12, "middle");
    svg.text(14, (kTop + kBottom) / 2, y_label, "black", 12, "middle");
}

void draw_legend(SvgCanvas& svg, const std::vector<std::string>& names) {
    const auto& palette = detail::chart_palette();
    for (std::size_t i = 0; i < names.size(); ++i) {
        const double y = kTop + 14.0 * static_cast<double>(i);
        const auto& color = palette[i % palette.size()];
        svg.line(kRight + 10, y, kRight + 30, y, color, 2.0);
        svg.text(kRight + 36, y + 4, names[i], "black", 10);
    }
}

std::string render_rc_curve(const std::vector<const ModelResult*>& models) {
    SvgCanvas svg(kWidth, kHeight);
    draw_unit_axes(svg, "coverage", "accuracy");
    const UnitFrame frame;
    const auto& palette = detail::chart_palette();
    std::vector<std::string> names;
    for (std::size_t i = 0; i < models.size(); ++i) {
        const auto& pts = models[i]->curve.points;
        std::vector<std::pair<double, double>> line;
        line.reserve(pts.size() + 1);
        // constant extension down to zero coverage
        line.emplace_back(frame.x(0.0), frame.y(pts.front().accuracy));
        for (const auto& p : pts) line.emplace_back(frame.x(p.coverage), frame.y(p.accuracy));
        svg.polyline(line, palette[i % palette.size()]);
        names.push_back(models[i]->model_id);
    }
    draw_legend(svg, names);
    return std::move(svg).finish();
}

std::string render_b_lines(const std::vector<const ModelResult*>& models) {
    SvgCanvas svg(kWidth, kHeight);
    const UnitFrame frame;
    const auto& palette = detail::chart_palette();

    const auto& sweep0 = models.front()->sweep;
    const auto n_cols = sweep0.size();
    // x axis: the descending accuracy-threshold sweep, evenly spaced
    for (std::size_t j = 0; j < n_cols; ++j) {
        const double u = n_cols == 1 ? 0.0 : static_cast<double>(j) / static_cast<double>(n_cols - 1);
        svg.line(frame.x(u), kBottom, frame.x(u), kBottom + 4, "black");
        svg.text(frame.x(u), kBottom + 18, threshold_label(sweep0[j].threshold), "black", 10,
                 "middle");
    }
    for (int i = 0; i <= 4; ++i) {
        const double v = i * 0.25;
        svg.line(kLeft - 4, frame.y(v), kLeft, frame.y(v), "black");
        svg.text(kLeft - 8, frame.y(v) + 4, SvgCanvas::num(v), "black", 10, "end");
    }
    svg.line(kLeft, kTop, kLeft, kBottom, "black");
    svg.line(kLeft, kBottom, kRight, kBottom, "black");
    svg.text((kLeft + kRight) / 2, kHeight - 8, "accuracy threshold", "black", 12, "middle");
    svg.text(14, (kTop + kBottom) / 2, "b", "black", 12, "middle");

    std::vector<std::string> names;
    for (std::size_t i = 0; i < models.size(); ++i) {
        std::vector<std::pair<double, double>> line;
        const auto& sweep = models[i]->sweep;
        for (std::size_t j = 0; j < sweep.size(); ++j) {
            const double u =
                sweep.size() == 1 ? 0.0 : static_cast<double>(j) / static_cast<double>(sweep.size() - 1);
            line.emplace_back(frame.x(u), frame.y(sweep[j].breakdown.b));
        }
        svg.polyline(line, palette[i % palette.size()]);
        names.push_back(models[i]->model_id);
    }
    draw_legend(svg, names);
    return std::move(svg).finish();
}

std::string render_bars(const std::vector<const ModelResult*>& models, bool fluctuations) {
    SvgCanvas svg(kWidth, kHeight);
    const UnitFrame frame;

    double max_value = 1.0;
    if (fluctuations) {
        for (const auto* m : models) {
            max_value = std::max(max_value, static_cast<double>(m->fluctuations.size()));
        }
    }

    for (int i = 0; i <= 4; ++i) {
        const double v = i * 0.25;
        svg.line(kLeft - 4, frame.y(v), kLeft, frame.y(v), "black");
        svg.text(kLeft - 8, frame.y(v) + 4, detail::format_g(v * max_value, 4), "black", 10,
                 "end");
    }
    svg.line(kLeft, kTop, kLeft, kBottom, "black");
    svg.line(kLeft, kBottom, kRight, kBottom, "black");
    svg.text(14, (kTop + kBottom) / 2, fluctuations ? "fluctuations" : "a", "black", 12, "middle");

    const auto& palette = detail::chart_palette();
    const double slot = (kRight - kLeft) / static_cast<double>(models.size());
    const double bar_width = slot * 0.6;
    for (std::size_t i = 0; i < models.size(); ++i) {
        const double value = fluctuations
                                 ? static_cast<double>(models[i]->fluctuations.size()) / max_value
                                 : models[i]->first_drop.a;
        const double x = kLeft + slot * (static_cast<double>(i) + 0.2);
        const double y = frame.y(value);
        svg.rect(x, y, bar_width, kBottom - y, palette[i % palette.size()]);
        const double label = fluctuations ? static_cast<double>(models[i]->fluctuations.size())
                                          : models[i]->first_drop.a;
        svg.text(x + bar_width / 2, y - 4, detail::format_g(label, 4), "black", 10, "middle");
        svg.text(x + bar_width / 2, kBottom + 16, models[i]->model_id, "black", 9, "middle");
    }
    return std::move(svg).finish();
}

std::string kind_stem(PlotKind kind) {
    switch (kind) {
        case PlotKind::rc_curve: return "rc_curve";
        case PlotKind::a_bars: return "a_bars";
        case PlotKind::b_lines: return "b_lines";
        case PlotKind::fluctuation_bars: return "fluctuation_bars";
    }
    return "plot";
}

}  // namespace

std::vector<std::filesystem::path> emit_plots(const ScoreReport& report,
                                              const std::set<PlotKind>& kinds,
                                              const std::filesystem::path& out_dir) {
    if (report.models.empty()) throw ValidationError("emit_plots: report has no models");

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create '" + out_dir.string() + "': " + ec.message());

    // datasets in first-appearance order
    std::vector<std::string> datasets;
    for (const auto& model : report.models) {
        if (std::find(datasets.begin(), datasets.end(), model.dataset_id) == datasets.end()) {
            datasets.push_back(model.dataset_id);
        }
    }

    std::vector<std::filesystem::path> manifest;
    for (const auto& dataset : datasets) {
        std::vector<const ModelResult*> models;
        for (const auto& model : report.models) {
            if (model.dataset_id == dataset) models.push_back(&model);
        }
        for (PlotKind kind : kinds) {
            std::string content;
            switch (kind) {
                case PlotKind::rc_curve: content = render_rc_curve(models); break;
                case PlotKind::a_bars: content = render_bars(models, false); break;
                case PlotKind::b_lines: content = render_b_lines(models); break;
                case PlotKind::fluctuation_bars: content = render_bars(models, true); break;
            }
            const auto path = out_dir / (kind_stem(kind) + "_" + sanitize_id(dataset) + ".svg");
            std::ofstream out(path, std::ios::binary);
            if (!out) throw IoError("cannot write '" + path.string() + "'");
            out << content;
            manifest.push_back(path);
        }
    }
    return manifest;
}

namespace {

nlohmann::ordered_json breakdown_json(const DiscaBreakdown& bd) {
    return nlohmann::ordered_json{
        {"a", bd.a},
        {"a_defined", bd.a_defined},
        {"b", bd.b},
        {"b_crossed", bd.b_crossed},
        {"worst_accuracy", bd.worst_accuracy},
        {"n_fluctuations", bd.n_fluctuations},
        {"term1", bd.term1},
        {"term2", bd.term2},
        {"term3", bd.term3},
        {"total", bd.total},
    };
}

nlohmann::ordered_json fluctuation_json(const FluctuationEvent& ev) {
    return nlohmann::ordered_json{
        {"index", ev.index}, {"d1", ev.d1},           {"d2", ev.d2},
        {"c1", ev.c1},       {"c2", ev.c2},           {"c_clamped", ev.c_clamped},
    };
}

nlohmann::ordered_json plateau_json(const std::optional<PlateauFinding>& plateau) {
    if (!plateau) return nullptr;
    return nlohmann::ordered_json{
        {"start_coverage", plateau->start_coverage},
        {"end_coverage", plateau->end_coverage},
        {"accuracy_band", plateau->accuracy_band},
        {"min_threshold_in_region", plateau->min_threshold_in_region},
        {"acceptable", plateau->acceptable},
    };
}

nlohmann::ordered_json optional_json(const std::optional<double>& value) {
    if (!value) return nullptr;
    return *value;
}

}  // namespace

nlohmann::ordered_json report_json(const ScoreReport& report) {
    nlohmann::ordered_json doc;
    doc["config"] = report.config_echo;
    doc["models"] = nlohmann::ordered_json::array();
    for (const auto& model : report.models) {
        nlohmann::ordered_json entry;
        entry["model_id"] = model.model_id;
        entry["dataset_id"] = model.dataset_id;
        entry["n_samples"] = model.curve.n_samples;
        entry["overall_accuracy"] = model.curve.overall_accuracy();
        entry["auc"] = model.auc_value;
        entry["first_drop"] =
            nlohmann::ordered_json{{"a", model.first_drop.a}, {"defined", model.first_drop.defined}};
        entry["sweep"] = nlohmann::ordered_json::array();
        for (const auto& sweep_entry : model.sweep) {
            entry["sweep"].push_back(nlohmann::ordered_json{
                {"threshold", sweep_entry.threshold},
                {"cell_class", to_string(sweep_entry.cell_class)},
                {"breakdown", breakdown_json(sweep_entry.breakdown)},
            });
        }
        entry["fluctuations"] = nlohmann::ordered_json::array();
        for (const auto& ev : model.fluctuations) entry["fluctuations"].push_back(fluctuation_json(ev));
        entry["plateau"] = plateau_json(model.plateau);
        entry["computation_score"] = optional_json(model.computation);
        entry["didma"] = optional_json(model.didma);
        entry["nidma"] = optional_json(model.nidma);
        entry["disca_ood"] = optional_json(model.disca_ood);
        doc["models"].push_back(std::move(entry));
    }
    doc["tail_findings"] = nlohmann::ordered_json::array();
    for (const auto& pair : report.tail_findings) {
        doc["tail_findings"].push_back(nlohmann::ordered_json{
            {"model_a", pair.model_a},
            {"model_b", pair.model_b},
            {"coverage_limit", pair.finding.coverage_limit},
            {"auc_full_a", pair.finding.auc_full_a},
            {"auc_full_b", pair.finding.auc_full_b},
            {"mean_acc_tail_a", pair.finding.mean_acc_tail_a},
            {"mean_acc_tail_b", pair.finding.mean_acc_tail_b},
            {"disagreement", pair.finding.disagreement},
        });
    }
    return doc;
}

}  // namespace seleval
