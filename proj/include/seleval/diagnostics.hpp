#pragma once

#include <optional>
#include <vector>

#include "seleval/curve.hpp"

namespace seleval {

// Maxprob gaps below this are clamped when normalizing fluctuation
// magnitudes; transformer-style models space confidences far more finely
// than this.
inline constexpr double kMinMaxprobGap = 0.001;

// Maxprob at the point where accuracy first drops below 100%. When the
// model never errs, `defined` is false and `a` falls back to the lowest
// observed maxprob.
struct FirstDrop {
    double a = 0.0;
    bool defined = false;
};

// Maxprob at the point where accuracy first falls below the worst
// admissible accuracy. When the curve never crosses, `crossed` is false and
// `b` is the lowest observed maxprob (the confidence floor at full
// coverage).
struct ToleranceCutoff {
    double b = 0.0;
    bool crossed = false;
};

// One valley-to-peak accuracy rise: evidence that confidence and
// correctness are decorrelated over that stretch of the sweep.
struct FluctuationEvent {
    int index = 0;            // 1-based, in increasing-coverage order
    double d1 = 0.0;          // accuracy at the valley
    double d2 = 0.0;          // accuracy at the peak (d1 < d2)
    double c1 = 0.0;          // maxprob at the valley
    double c2 = 0.0;          // maxprob at the peak (c1 >= c2)
    double c_clamped = 0.0;   // max(c1 - c2, kMinMaxprobGap)
};

// Full-range AUC comparison against mean accuracy in the low-coverage tail.
// `disagreement` flags the orderings pointing in opposite directions.
struct TailFinding {
    double coverage_limit = 0.0;
    double auc_full_a = 0.0;
    double auc_full_b = 0.0;
    double mean_acc_tail_a = 0.0;
    double mean_acc_tail_b = 0.0;
    bool disagreement = false;
};

// A wide trailing coverage region of nearly constant accuracy. Acceptable
// only when the model answers that whole region with low confidence.
struct PlateauFinding {
    double start_coverage = 0.0;
    double end_coverage = 0.0;
    double accuracy_band = 0.0;
    double min_threshold_in_region = 0.0;
    bool acceptable = false;
};

FirstDrop first_drop(const RiskCoverageCurve& curve);

// worst_accuracy must be in [0.5, 1.0]; the crossing test is strict
// (accuracy == worst_accuracy still meets the tolerance).
ToleranceCutoff tolerance_cutoff(const RiskCoverageCurve& curve, double worst_accuracy);

// Scans accuracy in increasing-coverage order; each maximal strictly-rising
// run is one event, with the valley at the point before the first rise and
// the peak at the run's end. Flat segments terminate a run.
std::vector<FluctuationEvent> find_fluctuations(const RiskCoverageCurve& curve);

// coverage_limit in (0, 1]. Mean tail accuracy is the trapezoid integral
// over [0, coverage_limit] divided by the limit.
TailFinding tail_compare(const RiskCoverageCurve& curve_a, const RiskCoverageCurve& curve_b,
                         double coverage_limit);

// Longest trailing region (ending at coverage 1) whose accuracy range stays
// within band_width; reported when its span reaches min_span. Acceptable
// iff every threshold in the region is <= low_maxprob_ceiling.
std::optional<PlateauFinding> detect_plateau(const RiskCoverageCurve& curve, double band_width,
                                             double min_span, double low_maxprob_ceiling);

}  // namespace seleval
