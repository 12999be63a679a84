#include "seleval/curve.hpp"

#include <algorithm>
#include <ostream>

#include "seleval/errors.hpp"
#include "numfmt.hpp"

namespace seleval {

RiskCoverageCurve build_curve(const PredictionLog& log) {
    if (log.records.empty()) throw ValidationError("build_curve: empty log");

    std::vector<std::pair<double, bool>> samples;
    samples.reserve(log.records.size());
    for (const auto& rec : log.records) samples.emplace_back(rec.maxprob, rec.correct);
    std::sort(samples.begin(), samples.end(),
              [](const auto& lhs, const auto& rhs) { return lhs.first > rhs.first; });

    RiskCoverageCurve curve;
    curve.model_id = log.model_id;
    curve.dataset_id = log.dataset_id;
    curve.n_samples = static_cast<std::int64_t>(samples.size());

    const auto n = static_cast<double>(curve.n_samples);
    std::int64_t answered = 0;
    std::int64_t correct = 0;
    std::size_t i = 0;
    while (i < samples.size()) {
        const double block_maxprob = samples[i].first;
        while (i < samples.size() && samples[i].first == block_maxprob) {
            ++answered;
            correct += samples[i].second ? 1 : 0;
            ++i;
        }
        CurvePoint point;
        point.answered = answered;
        point.correct = correct;
        point.coverage = static_cast<double>(answered) / n;
        point.accuracy = static_cast<double>(correct) / static_cast<double>(answered);
        point.threshold = block_maxprob;
        curve.points.push_back(point);
    }
    return curve;
}

namespace {

bool constant_accuracy(const RiskCoverageCurve& curve) {
    const double first = curve.points.front().accuracy;
    return std::all_of(curve.points.begin(), curve.points.end(),
                       [first](const CurvePoint& p) { return p.accuracy == first; });
}

}  // namespace

double auc(const RiskCoverageCurve& curve) {
    if (curve.points.empty()) throw ValidationError("auc: curve has no points");
    // A constant curve integrates to its accuracy; returning it directly
    // keeps all-correct and all-wrong logs at exactly 1 and 0.
    if (constant_accuracy(curve)) return curve.points.front().accuracy;

    const auto& pts = curve.points;
    double area = pts.front().coverage * pts.front().accuracy;
    for (std::size_t k = 1; k < pts.size(); ++k) {
        area += (pts[k].coverage - pts[k - 1].coverage) * 0.5 *
                (pts[k].accuracy + pts[k - 1].accuracy);
    }
    return area;
}

double auc_upto(const RiskCoverageCurve& curve, double coverage_limit) {
    if (curve.points.empty()) throw ValidationError("auc_upto: curve has no points");
    if (!(coverage_limit > 0.0) || coverage_limit > 1.0) {
        throw ValidationError("auc_upto: coverage limit must be in (0, 1]");
    }
    if (constant_accuracy(curve)) return curve.points.front().accuracy * coverage_limit;

    const auto& pts = curve.points;
    if (coverage_limit <= pts.front().coverage) {
        return pts.front().accuracy * coverage_limit;
    }
    double area = pts.front().coverage * pts.front().accuracy;
    for (std::size_t k = 1; k < pts.size(); ++k) {
        const auto& lo = pts[k - 1];
        const auto& hi = pts[k];
        if (hi.coverage <= coverage_limit) {
            area += (hi.coverage - lo.coverage) * 0.5 * (hi.accuracy + lo.accuracy);
            continue;
        }
        const double t = (coverage_limit - lo.coverage) / (hi.coverage - lo.coverage);
        const double acc_at_limit = lo.accuracy + t * (hi.accuracy - lo.accuracy);
        area += (coverage_limit - lo.coverage) * 0.5 * (lo.accuracy + acc_at_limit);
        break;
    }
    return area;
}

RiskCoverageCurve resample(const RiskCoverageCurve& curve, std::int64_t n_bins) {
    if (curve.points.empty()) throw ValidationError("resample: curve has no points");
    if (n_bins < 1) throw ValidationError("resample: n_bins must be >= 1");

    RiskCoverageCurve out;
    out.model_id = curve.model_id;
    out.dataset_id = curve.dataset_id;
    out.n_samples = curve.n_samples;
    out.points.reserve(static_cast<std::size_t>(n_bins));

    const auto& pts = curve.points;
    std::size_t block = 0;  // last block with coverage <= grid, monotone in i
    for (std::int64_t i = 1; i <= n_bins; ++i) {
        const double grid = static_cast<double>(i) / static_cast<double>(n_bins);
        while (block + 1 < pts.size() && pts[block + 1].coverage <= grid) ++block;
        CurvePoint point = pts[block];
        point.coverage = grid;
        out.points.push_back(point);
    }
    return out;
}

void write_curve_csv(const RiskCoverageCurve& curve, std::ostream& out) {
    out << "coverage,accuracy,threshold\n";
    for (const auto& p : curve.points) {
        out << detail::sig12(p.coverage) << ',' << detail::sig12(p.accuracy) << ','
            << detail::sig12(p.threshold) << '\n';
    }
}

}  // namespace seleval
