#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "seleval/prediction_log.hpp"

namespace seleval {

// Accuracy never rises: all correct answers sit above all wrong ones, with
// the requested accuracy at full coverage.
struct CalibratedShape {
    double target_accuracy = 1.0;
};

// Near-constant accuracy over the whole sweep, confidences spanning down to
// threshold_floor.
struct PlateauShape {
    double accuracy_level = 0.9;
    double threshold_floor = 0.5;
};

// Exactly n_events valley-to-peak accuracy rises; event_magnitude in [0, 1]
// scales how deep each valley cuts.
struct FluctuatingShape {
    int n_events = 1;
    double event_magnitude = 0.5;
};

// Cumulative accuracy steered to an explicit target at the end of each
// coverage decile.
struct StaircaseShape {
    std::vector<double> decile_accuracy;  // exactly 10 values in [0, 1]
};

struct SynthSpec {
    std::int64_t n_samples = 0;  // >= 10
    std::uint64_t seed = 0;
    std::variant<CalibratedShape, PlateauShape, FluctuatingShape, StaircaseShape> shape;
    std::string model_id = "synthetic";
    std::string dataset_id = "synthetic";
};

// Deterministic given (spec, seed). Maxprobs are distinct and strictly
// decreasing so no tie blocks form. The produced curve is checked against
// the requested shape before returning; infeasible specs throw.
PredictionLog generate(const SynthSpec& spec);

// An adversarial pair: AUC ranks A above B while every selective-answering
// diagnostic favors B. Cases one through six vary the attack (tail flip,
// fluctuation count/magnitude/placement, plateau, combined).
struct Table1Pair {
    PredictionLog log_a;
    PredictionLog log_b;
    std::string verified_property;  // human-readable summary of the checks passed
};

// n_samples >= 40. The pair is verified post-hoc through the real curve,
// diagnostics, and score pipeline; construction retries with perturbed
// confidences a bounded number of times and fails loudly rather than
// returning a non-conforming pair.
Table1Pair generate_table1_pair(int case_id, std::int64_t n_samples, std::uint64_t seed);

}  // namespace seleval
