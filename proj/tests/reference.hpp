#pragma once

// From-scratch reference implementations, kept independent of the library's
// computation path: the curve is rebuilt per threshold by counting over the
// whole sample set (O(n^2)), and the scans below share no code with the
// production ones.

#include <algorithm>
#include <optional>
#include <vector>

#include "seleval/prediction_log.hpp"

namespace refimpl {

struct RefPoint {
    double coverage;
    double accuracy;
    double threshold;
};

inline std::vector<RefPoint> curve(const seleval::PredictionLog& log) {
    std::vector<double> thresholds;
    for (const auto& rec : log.records) thresholds.push_back(rec.maxprob);
    std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

    std::vector<RefPoint> points;
    const double n = static_cast<double>(log.records.size());
    for (double t : thresholds) {
        long answered = 0;
        long correct = 0;
        for (const auto& rec : log.records) {
            if (rec.maxprob >= t) {
                ++answered;
                if (rec.correct) ++correct;
            }
        }
        points.push_back(RefPoint{static_cast<double>(answered) / n,
                                  static_cast<double>(correct) / static_cast<double>(answered), t});
    }
    return points;
}

inline double auc(const std::vector<RefPoint>& points) {
    double area = points[0].coverage * points[0].accuracy;
    for (std::size_t k = 1; k < points.size(); ++k) {
        area += 0.5 * (points[k].accuracy + points[k - 1].accuracy) *
                (points[k].coverage - points[k - 1].coverage);
    }
    return area;
}

struct RefExtraction {
    double value;
    bool flagged;  // defined / crossed
};

inline RefExtraction first_drop(const std::vector<RefPoint>& points) {
    for (const auto& p : points) {
        if (p.accuracy < 1.0) return {p.threshold, true};
    }
    return {points.back().threshold, false};
}

inline RefExtraction tolerance_cutoff(const std::vector<RefPoint>& points, double worst) {
    for (const auto& p : points) {
        if (p.accuracy < worst) return {p.threshold, true};
    }
    return {points.back().threshold, false};
}

struct RefEvent {
    double d1, d2, c1, c2;
};

// Rising-run scan written as an explicit state machine.
inline std::vector<RefEvent> fluctuations(const std::vector<RefPoint>& points) {
    std::vector<RefEvent> events;
    std::optional<std::size_t> run_start;
    for (std::size_t k = 1; k <= points.size(); ++k) {
        const bool rising = k < points.size() && points[k].accuracy > points[k - 1].accuracy;
        if (rising && !run_start) {
            run_start = k - 1;
        } else if (!rising && run_start) {
            events.push_back(RefEvent{points[*run_start].accuracy, points[k - 1].accuracy,
                                      points[*run_start].threshold, points[k - 1].threshold});
            run_start.reset();
        }
    }
    return events;
}

}  // namespace refimpl
