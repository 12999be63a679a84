#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "seleval/prediction_log.hpp"

namespace seleval {

// One point of a coverage-accuracy curve. Records sharing a maxprob value
// are admitted as one atomic block (no threshold can separate them), so a
// curve has one point per distinct maxprob. `answered`/`correct` are the
// exact cumulative tallies behind the coverage and accuracy quotients.
struct CurvePoint {
    double coverage = 0.0;   // answered / n_samples, in (0, 1]
    double accuracy = 0.0;   // correct / answered
    double threshold = 0.0;  // maxprob of the last block admitted
    std::int64_t answered = 0;
    std::int64_t correct = 0;

    friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

// The full sweep of the answering rule "answer iff maxprob >= t": points in
// increasing-coverage (decreasing-threshold) order, ending at coverage 1.
struct RiskCoverageCurve {
    std::string model_id;
    std::string dataset_id;
    std::int64_t n_samples = 0;
    std::vector<CurvePoint> points;

    double overall_accuracy() const { return points.back().accuracy; }
};

// Sorts records by maxprob descending and emits one cumulative point per
// tie block. Deterministic for any input order.
RiskCoverageCurve build_curve(const PredictionLog& log);

// Area under accuracy-over-coverage on [0, 1]: trapezoids between points,
// with accuracy held constant at the first point's value on
// [0, first coverage]. Constant-accuracy curves integrate to that accuracy
// exactly.
double auc(const RiskCoverageCurve& curve);

// Same integral restricted to [0, coverage_limit]; the curve is linearly
// interpolated where the limit falls between points. coverage_limit must be
// in (0, 1].
double auc_upto(const RiskCoverageCurve& curve, double coverage_limit);

// Step-evaluates the curve at the coverage grid {i/n_bins, i=1..n_bins}:
// each grid point carries the last block point with coverage <= the grid
// value (the first block below the first point). n_bins >= 1.
RiskCoverageCurve resample(const RiskCoverageCurve& curve, std::int64_t n_bins);

// CSV export: header `coverage,accuracy,threshold`, 12 significant digits.
void write_curve_csv(const RiskCoverageCurve& curve, std::ostream& out);

}  // namespace seleval
