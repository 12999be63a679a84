#include "seleval/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "seleval/errors.hpp"

namespace seleval {

namespace {

void require_points(const RiskCoverageCurve& curve, const char* op) {
    if (curve.points.empty()) {
        throw ValidationError(std::string(op) + ": curve has no points");
    }
}

}  // namespace

FirstDrop first_drop(const RiskCoverageCurve& curve) {
    require_points(curve, "first_drop");
    for (const auto& p : curve.points) {
        if (p.accuracy < 1.0) return FirstDrop{p.threshold, true};
    }
    return FirstDrop{curve.points.back().threshold, false};
}

ToleranceCutoff tolerance_cutoff(const RiskCoverageCurve& curve, double worst_accuracy) {
    require_points(curve, "tolerance_cutoff");
    if (!(worst_accuracy >= 0.5) || !(worst_accuracy <= 1.0)) {
        throw ValidationError("tolerance_cutoff: worst_accuracy must be in [0.5, 1.0]");
    }
    for (const auto& p : curve.points) {
        if (p.accuracy < worst_accuracy) return ToleranceCutoff{p.threshold, true};
    }
    return ToleranceCutoff{curve.points.back().threshold, false};
}

std::vector<FluctuationEvent> find_fluctuations(const RiskCoverageCurve& curve) {
    require_points(curve, "find_fluctuations");
    const auto& pts = curve.points;
    std::vector<FluctuationEvent> events;
    std::size_t k = 1;
    while (k < pts.size()) {
        if (pts[k].accuracy > pts[k - 1].accuracy) {
            const std::size_t valley = k - 1;
            while (k + 1 < pts.size() && pts[k + 1].accuracy > pts[k].accuracy) ++k;
            const std::size_t peak = k;
            FluctuationEvent ev;
            ev.index = static_cast<int>(events.size()) + 1;
            ev.d1 = pts[valley].accuracy;
            ev.d2 = pts[peak].accuracy;
            ev.c1 = pts[valley].threshold;
            ev.c2 = pts[peak].threshold;
            ev.c_clamped = std::max(ev.c1 - ev.c2, kMinMaxprobGap);
            events.push_back(ev);
        }
        ++k;
    }
    return events;
}

TailFinding tail_compare(const RiskCoverageCurve& curve_a, const RiskCoverageCurve& curve_b,
                         double coverage_limit) {
    if (!(coverage_limit > 0.0) || coverage_limit > 1.0) {
        throw ValidationError("tail_compare: coverage_limit must be in (0, 1]");
    }
    TailFinding finding;
    finding.coverage_limit = coverage_limit;
    finding.auc_full_a = auc(curve_a);
    finding.auc_full_b = auc(curve_b);
    finding.mean_acc_tail_a = auc_upto(curve_a, coverage_limit) / coverage_limit;
    finding.mean_acc_tail_b = auc_upto(curve_b, coverage_limit) / coverage_limit;
    const double full_diff = finding.auc_full_a - finding.auc_full_b;
    const double tail_diff = finding.mean_acc_tail_a - finding.mean_acc_tail_b;
    finding.disagreement =
        full_diff != 0.0 && tail_diff != 0.0 && std::signbit(full_diff) != std::signbit(tail_diff);
    return finding;
}

std::optional<PlateauFinding> detect_plateau(const RiskCoverageCurve& curve, double band_width,
                                             double min_span, double low_maxprob_ceiling) {
    require_points(curve, "detect_plateau");
    if (!(band_width > 0.0)) throw ValidationError("detect_plateau: band_width must be > 0");
    if (!(min_span > 0.0) || min_span > 1.0) {
        throw ValidationError("detect_plateau: min_span must be in (0, 1]");
    }
    if (!(low_maxprob_ceiling > 0.0) || !(low_maxprob_ceiling < 1.0)) {
        throw ValidationError("detect_plateau: low_maxprob_ceiling must be in (0, 1)");
    }

    // Accuracy range only grows as the region extends backwards, so the
    // longest qualifying suffix ends where the range first exceeds the band.
    const auto& pts = curve.points;
    double lo = pts.back().accuracy;
    double hi = lo;
    std::size_t start = pts.size() - 1;
    for (std::size_t k = pts.size() - 1; k-- > 0;) {
        const double next_lo = std::min(lo, pts[k].accuracy);
        const double next_hi = std::max(hi, pts[k].accuracy);
        if (next_hi - next_lo > band_width) break;
        lo = next_lo;
        hi = next_hi;
        start = k;
    }

    PlateauFinding finding;
    finding.start_coverage = pts[start].coverage;
    finding.end_coverage = pts.back().coverage;
    finding.accuracy_band = hi - lo;
    finding.min_threshold_in_region = pts.back().threshold;
    if (finding.end_coverage - finding.start_coverage < min_span) return std::nullopt;
    finding.acceptable = pts[start].threshold <= low_maxprob_ceiling;
    return finding;
}

}  // namespace seleval
