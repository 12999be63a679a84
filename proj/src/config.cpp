#include "seleval/config.hpp"

#include <fstream>

#include "seleval/errors.hpp"

namespace seleval {

namespace {

void reject_unknown_keys(const nlohmann::json& obj, std::initializer_list<const char*> known,
                         const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        bool ok = false;
        for (const char* k : known) {
            if (key == k) {
                ok = true;
                break;
            }
        }
        if (!ok) throw ValidationError("config: unknown key '" + key + "' in " + where);
    }
}

double get_number(const nlohmann::json& obj, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) {
        throw ValidationError(std::string("config: '") + key + "' must be a number");
    }
    return obj[key].get<double>();
}

ComputationInput computation_from_json(const nlohmann::json& obj, const std::string& model_id) {
    const std::string where = "computation['" + model_id + "']";
    if (!obj.is_object()) throw ValidationError("config: " + where + " must be an object");
    reject_unknown_keys(obj, {"energy", "param_ratio"}, where);
    if (obj.contains("energy") == obj.contains("param_ratio")) {
        throw ValidationError("config: " + where +
                              " must hold exactly one of 'energy' or 'param_ratio'");
    }
    if (obj.contains("param_ratio")) {
        const auto& pr = obj["param_ratio"];
        reject_unknown_keys(pr, {"optimal_params", "model_params"}, where + ".param_ratio");
        ParamRatio ratio;
        ratio.optimal_params = pr.value("optimal_params", std::int64_t{0});
        ratio.model_params = pr.value("model_params", std::int64_t{0});
        return ratio;
    }
    const auto& en = obj["energy"];
    reject_unknown_keys(en, {"pue", "processes"}, where + ".energy");
    EnergyProfile profile;
    profile.pue = get_number(en, "pue", 1.0);
    if (!en.contains("processes") || !en["processes"].is_array()) {
        throw ValidationError("config: " + where + ".energy needs a 'processes' array");
    }
    for (const auto& item : en["processes"]) {
        reject_unknown_keys(item, {"p_dram", "p_cpu", "p_gpu", "e_dram", "e_cpu", "e_gpu"},
                            where + ".energy.processes");
        EnergyProcess proc;
        proc.p_dram = get_number(item, "p_dram", 0.0);
        proc.p_cpu = get_number(item, "p_cpu", 0.0);
        proc.p_gpu = get_number(item, "p_gpu", 0.0);
        proc.e_dram = get_number(item, "e_dram", 0.0);
        proc.e_cpu = get_number(item, "e_cpu", 0.0);
        proc.e_gpu = get_number(item, "e_gpu", 0.0);
        profile.processes.push_back(proc);
    }
    return profile;
}

nlohmann::ordered_json computation_to_json(const ComputationInput& input) {
    if (const auto* ratio = std::get_if<ParamRatio>(&input)) {
        return nlohmann::ordered_json{{"param_ratio",
                                       {{"optimal_params", ratio->optimal_params},
                                        {"model_params", ratio->model_params}}}};
    }
    const auto& profile = std::get<EnergyProfile>(input);
    nlohmann::ordered_json processes = nlohmann::ordered_json::array();
    for (const auto& proc : profile.processes) {
        processes.push_back(nlohmann::ordered_json{
            {"p_dram", proc.p_dram},
            {"p_cpu", proc.p_cpu},
            {"p_gpu", proc.p_gpu},
            {"e_dram", proc.e_dram},
            {"e_cpu", proc.e_cpu},
            {"e_gpu", proc.e_gpu},
        });
    }
    return nlohmann::ordered_json{
        {"energy", {{"pue", profile.pue}, {"processes", processes}}}};
}

}  // namespace

std::vector<double> RunConfig::default_thresholds() {
    return {0.95, 0.90, 0.85, 0.80, 0.75, 0.70, 0.65, 0.60, 0.55};
}

void RunConfig::validate() const {
    disca_weights.validate();
    composition.validate();
    if (thresholds.empty()) throw ValidationError("config: thresholds must be non-empty");
    for (std::size_t j = 0; j < thresholds.size(); ++j) {
        if (!(thresholds[j] >= 0.5) || !(thresholds[j] <= 1.0)) {
            throw ValidationError("config: thresholds must lie in [0.5, 1.0]");
        }
        if (j > 0 && !(thresholds[j] < thresholds[j - 1])) {
            throw ValidationError("config: thresholds must be strictly decreasing");
        }
    }
    if (!(plateau.band_width > 0.0)) throw ValidationError("config: plateau.band_width must be > 0");
    if (!(plateau.min_span > 0.0) || plateau.min_span > 1.0) {
        throw ValidationError("config: plateau.min_span must be in (0, 1]");
    }
    if (!(plateau.low_maxprob_ceiling > 0.0) || !(plateau.low_maxprob_ceiling < 1.0)) {
        throw ValidationError("config: plateau.low_maxprob_ceiling must be in (0, 1)");
    }
    if (!(tail_coverage_limit > 0.0) || tail_coverage_limit > 1.0) {
        throw ValidationError("config: tail_coverage_limit must be in (0, 1]");
    }
    if (resample_bins && *resample_bins < 1) {
        throw ValidationError("config: resample_bins must be >= 1");
    }
    // Computation entries are validated eagerly so a bad config fails the
    // run before any scoring starts.
    for (const auto& [model_id, input] : computation) {
        try {
            (void)computation_score(input);
        } catch (const ValidationError& e) {
            throw ValidationError("config: computation['" + model_id + "']: " + e.what());
        }
    }
}

RunConfig RunConfig::from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ValidationError("config: top level must be a JSON object");
    reject_unknown_keys(doc,
                        {"disca_weights", "composition", "thresholds", "plateau",
                         "tail_coverage_limit", "computation", "resample_bins"},
                        "config");
    RunConfig cfg;
    if (doc.contains("disca_weights")) {
        const auto& w = doc["disca_weights"];
        reject_unknown_keys(w, {"x", "y", "z"}, "disca_weights");
        cfg.disca_weights.x = get_number(w, "x", cfg.disca_weights.x);
        cfg.disca_weights.y = get_number(w, "y", cfg.disca_weights.y);
        cfg.disca_weights.z = get_number(w, "z", cfg.disca_weights.z);
    }
    if (doc.contains("composition")) {
        const auto& w = doc["composition"];
        reject_unknown_keys(w, {"p", "q", "u", "v"}, "composition");
        cfg.composition.p = get_number(w, "p", cfg.composition.p);
        cfg.composition.q = get_number(w, "q", cfg.composition.q);
        cfg.composition.u = get_number(w, "u", cfg.composition.u);
        cfg.composition.v = get_number(w, "v", cfg.composition.v);
    }
    if (doc.contains("thresholds")) {
        if (!doc["thresholds"].is_array()) {
            throw ValidationError("config: thresholds must be an array of numbers");
        }
        cfg.thresholds.clear();
        for (const auto& t : doc["thresholds"]) {
            if (!t.is_number()) throw ValidationError("config: thresholds must be numbers");
            cfg.thresholds.push_back(t.get<double>());
        }
    }
    if (doc.contains("plateau")) {
        const auto& p = doc["plateau"];
        reject_unknown_keys(p, {"band_width", "min_span", "low_maxprob_ceiling"}, "plateau");
        cfg.plateau.band_width = get_number(p, "band_width", cfg.plateau.band_width);
        cfg.plateau.min_span = get_number(p, "min_span", cfg.plateau.min_span);
        cfg.plateau.low_maxprob_ceiling =
            get_number(p, "low_maxprob_ceiling", cfg.plateau.low_maxprob_ceiling);
    }
    cfg.tail_coverage_limit = get_number(doc, "tail_coverage_limit", cfg.tail_coverage_limit);
    if (doc.contains("computation")) {
        if (!doc["computation"].is_object()) {
            throw ValidationError("config: computation must map model ids to inputs");
        }
        for (const auto& [model_id, input] : doc["computation"].items()) {
            cfg.computation.emplace(model_id, computation_from_json(input, model_id));
        }
    }
    if (doc.contains("resample_bins") && !doc["resample_bins"].is_null()) {
        if (!doc["resample_bins"].is_number_integer()) {
            throw ValidationError("config: resample_bins must be an integer");
        }
        cfg.resample_bins = doc["resample_bins"].get<std::int64_t>();
    }
    cfg.validate();
    return cfg;
}

RunConfig RunConfig::load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path.string() + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("config '" + path.string() + "': " + e.what());
    }
    return from_json(doc);
}

nlohmann::ordered_json RunConfig::to_json() const {
    nlohmann::ordered_json doc;
    doc["disca_weights"] = {{"x", disca_weights.x}, {"y", disca_weights.y}, {"z", disca_weights.z}};
    doc["composition"] = {
        {"p", composition.p}, {"q", composition.q}, {"u", composition.u}, {"v", composition.v}};
    doc["thresholds"] = thresholds;
    doc["plateau"] = {{"band_width", plateau.band_width},
                      {"min_span", plateau.min_span},
                      {"low_maxprob_ceiling", plateau.low_maxprob_ceiling}};
    doc["tail_coverage_limit"] = tail_coverage_limit;
    doc["computation"] = nlohmann::ordered_json::object();
    for (const auto& [model_id, input] : computation) {
        doc["computation"][model_id] = computation_to_json(input);
    }
    doc["resample_bins"] = resample_bins ? nlohmann::ordered_json(*resample_bins)
                                         : nlohmann::ordered_json(nullptr);
    return doc;
}

}  // namespace seleval
