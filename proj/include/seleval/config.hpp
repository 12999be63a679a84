#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "seleval/scores.hpp"

namespace seleval {

struct PlateauParams {
    double band_width = 0.05;
    double min_span = 0.5;
    double low_maxprob_ceiling = 0.5;
};

// Every free parameter of the metrics in one place. Defaults: weight
// thirds, the 0.95..0.55 threshold sweep, and DiDMA reduced to DiSCA
// (p=1, q=0) until a computation input is supplied.
struct RunConfig {
    DiscaWeights disca_weights;
    CompositionWeights composition;
    std::vector<double> thresholds = default_thresholds();
    PlateauParams plateau;
    double tail_coverage_limit = 0.3;
    std::map<std::string, ComputationInput> computation;  // keyed by model_id
    std::optional<std::int64_t> resample_bins;

    static std::vector<double> default_thresholds();

    // Throws ValidationError naming the violated constraint.
    void validate() const;

    // Missing keys keep their defaults; unknown keys are rejected.
    static RunConfig from_json(const nlohmann::json& doc);
    static RunConfig load_file(const std::filesystem::path& path);

    // Full echo of the resolved configuration, embedded in every report.
    nlohmann::ordered_json to_json() const;
};

}  // namespace seleval
