#include "seleval/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "seleval/curve.hpp"
#include "seleval/diagnostics.hpp"
#include "seleval/errors.hpp"
#include "seleval/scores.hpp"

namespace seleval {

namespace {

// Engine output mapped to [0, 1) directly; distribution adaptors are not
// pinned down by the standard and would break bit-reproducibility across
// library versions.
double unit_real(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Strictly decreasing confidences inside (lo, hi): an even grid with
// per-sample jitter of less than half a grid step.
std::vector<double> descending_maxprobs(std::int64_t n, double hi, double lo,
                                        std::mt19937_64& rng) {
    const double step = (hi - lo) / static_cast<double>(n);
    std::vector<double> maxprobs(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
        const double base = hi - (static_cast<double>(i) + 0.5) * step;
        const double jitter = (unit_real(rng) - 0.5) * 0.5 * step;
        maxprobs[static_cast<std::size_t>(i)] = base + jitter;
    }
    return maxprobs;
}

PredictionLog assemble(std::string model_id, std::string dataset_id,
                       const std::vector<double>& maxprobs, const std::vector<bool>& correct) {
    PredictionLog log;
    log.model_id = std::move(model_id);
    log.dataset_id = std::move(dataset_id);
    log.records.reserve(maxprobs.size());
    for (std::size_t i = 0; i < maxprobs.size(); ++i) {
        PredictionRecord rec;
        rec.model_id = log.model_id;
        rec.dataset_id = log.dataset_id;
        rec.maxprob = maxprobs[i];
        rec.correct = correct[i];
        log.records.push_back(std::move(rec));
    }
    return log;
}

void check_unit(double value, const char* what) {
    if (!(value >= 0.0) || value > 1.0) {
        throw ValidationError(std::string("synth: ") + what + " must be in [0, 1]");
    }
}

std::vector<bool> corrects_first(std::int64_t n, std::int64_t k) {
    std::vector<bool> correct(static_cast<std::size_t>(n), false);
    std::fill(correct.begin(), correct.begin() + static_cast<std::ptrdiff_t>(k), true);
    return correct;
}

std::vector<bool> calibrated_pattern(std::int64_t n, double target) {
    const auto k = std::clamp<std::int64_t>(std::llround(target * static_cast<double>(n)), 0, n);
    return corrects_first(n, k);
}

// ceil(m * level) correct answers among the first m keeps the running
// accuracy within [level, level + 1/m] from the first sample on.
std::vector<bool> plateau_pattern(std::int64_t n, double level) {
    std::vector<bool> correct(static_cast<std::size_t>(n));
    std::int64_t cum = 0;
    for (std::int64_t m = 1; m <= n; ++m) {
        const auto want = std::min<std::int64_t>(
            m, static_cast<std::int64_t>(std::ceil(static_cast<double>(m) * level - 1e-12)));
        correct[static_cast<std::size_t>(m - 1)] = want > cum;
        cum = std::max(cum, want);
    }
    return correct;
}

std::vector<bool> fluctuating_pattern(std::int64_t n, int n_events, double magnitude) {
    std::vector<bool> correct(static_cast<std::size_t>(n), true);
    if (n_events == 0) return correct;

    const std::int64_t lead = std::max<std::int64_t>(2, n / 10);
    const std::int64_t cycle = (n - lead) / n_events;
    // every cycle needs a fall and a rise
    if (cycle < 2) throw ValidationError("synth: too many fluctuation events for n_samples");
    const auto wrongs = std::clamp<std::int64_t>(
        std::llround(magnitude * static_cast<double>(cycle) / 2.0), 1, cycle - 1);
    for (int e = 0; e < n_events; ++e) {
        const std::int64_t start = lead + cycle * e;
        for (std::int64_t i = 0; i < wrongs; ++i) {
            correct[static_cast<std::size_t>(start + i)] = false;
        }
    }
    return correct;
}

std::vector<bool> staircase_pattern(std::int64_t n, const std::vector<double>& targets) {
    std::vector<bool> correct(static_cast<std::size_t>(n), false);
    std::int64_t cum = 0;
    std::int64_t prev_boundary = 0;
    for (std::size_t d = 0; d < 10; ++d) {
        const auto boundary = static_cast<std::int64_t>(
            std::llround(static_cast<double>(n) * static_cast<double>(d + 1) / 10.0));
        const auto want = std::clamp<std::int64_t>(
            std::llround(targets[d] * static_cast<double>(boundary)), cum,
            cum + (boundary - prev_boundary));
        // corrects lead inside the decile
        for (std::int64_t i = prev_boundary; i < prev_boundary + (want - cum); ++i) {
            correct[static_cast<std::size_t>(i)] = true;
        }
        cum = want;
        prev_boundary = boundary;
    }
    return correct;
}

bool accuracy_non_increasing(const RiskCoverageCurve& curve) {
    return find_fluctuations(curve).empty();
}

}  // namespace

PredictionLog generate(const SynthSpec& spec) {
    if (spec.n_samples < 10) throw ValidationError("synth: n_samples must be >= 10");
    const std::int64_t n = spec.n_samples;
    std::mt19937_64 rng(spec.seed);

    std::vector<double> maxprobs;
    std::vector<bool> correct;

    if (const auto* shape = std::get_if<CalibratedShape>(&spec.shape)) {
        check_unit(shape->target_accuracy, "target accuracy");
        maxprobs = descending_maxprobs(n, 0.99, 0.30, rng);
        correct = calibrated_pattern(n, shape->target_accuracy);
    } else if (const auto* shape = std::get_if<PlateauShape>(&spec.shape)) {
        check_unit(shape->accuracy_level, "accuracy level");
        check_unit(shape->threshold_floor, "threshold floor");
        const double hi = 0.995;
        if (shape->threshold_floor >= hi - 0.01) {
            throw ValidationError("synth: threshold floor leaves no confidence range");
        }
        maxprobs = descending_maxprobs(n, hi, std::max(shape->threshold_floor, 0.001), rng);
        correct = plateau_pattern(n, shape->accuracy_level);
    } else if (const auto* shape = std::get_if<FluctuatingShape>(&spec.shape)) {
        check_unit(shape->event_magnitude, "event magnitude");
        if (shape->n_events < 0 || shape->n_events > n / 4) {
            throw ValidationError("synth: n_events must be in [0, n_samples/4]");
        }
        maxprobs = descending_maxprobs(n, 0.99, 0.30, rng);
        correct = fluctuating_pattern(n, shape->n_events, shape->event_magnitude);
    } else {
        const auto& shape = std::get<StaircaseShape>(spec.shape);
        if (shape.decile_accuracy.size() != 10) {
            throw ValidationError("synth: staircase needs exactly 10 decile targets");
        }
        for (double t : shape.decile_accuracy) check_unit(t, "decile target");
        maxprobs = descending_maxprobs(n, 0.99, 0.30, rng);
        correct = staircase_pattern(n, shape.decile_accuracy);
    }

    PredictionLog log = assemble(spec.model_id, spec.dataset_id, maxprobs, correct);

    // The generator verifies its own output rather than trusting the
    // construction.
    const RiskCoverageCurve curve = build_curve(log);
    if (const auto* shape = std::get_if<CalibratedShape>(&spec.shape)) {
        (void)shape;
        if (!accuracy_non_increasing(curve)) {
            throw ValidationError("synth: calibrated construction produced a rise");
        }
    } else if (std::get_if<PlateauShape>(&spec.shape) != nullptr) {
        double lo = 1.0;
        double hi = 0.0;
        for (const auto& p : curve.points) {
            if (p.coverage >= 0.5) {
                lo = std::min(lo, p.accuracy);
                hi = std::max(hi, p.accuracy);
            }
        }
        if (hi - lo > 0.05) {
            throw ValidationError("synth: infeasible plateau (accuracy range exceeds 0.05)");
        }
    } else if (const auto* shape = std::get_if<FluctuatingShape>(&spec.shape)) {
        const auto events = find_fluctuations(curve);
        if (static_cast<int>(events.size()) != shape->n_events) {
            throw ValidationError("synth: fluctuating construction produced " +
                                  std::to_string(events.size()) + " events, wanted " +
                                  std::to_string(shape->n_events));
        }
    }
    return log;
}

namespace {

struct PairOutcome {
    double auc_a = 0.0;
    double auc_b = 0.0;
    DiscaBreakdown disca_a;
    DiscaBreakdown disca_b;
    std::vector<FluctuationEvent> events_a;
    std::vector<FluctuationEvent> events_b;
    std::optional<PlateauFinding> plateau_a;
    std::optional<PlateauFinding> plateau_b;
    TailFinding tail;
};

constexpr double kPairWorstAccuracy = 0.9;
constexpr double kPairTailLimit = 0.3;

PairOutcome evaluate_pair(const PredictionLog& a, const PredictionLog& b) {
    const DiscaWeights thirds{};
    const RiskCoverageCurve curve_a = build_curve(a);
    const RiskCoverageCurve curve_b = build_curve(b);
    PairOutcome out;
    out.auc_a = auc(curve_a);
    out.auc_b = auc(curve_b);
    out.disca_a = disca(curve_a, thirds, kPairWorstAccuracy);
    out.disca_b = disca(curve_b, thirds, kPairWorstAccuracy);
    out.events_a = find_fluctuations(curve_a);
    out.events_b = find_fluctuations(curve_b);
    out.plateau_a = detect_plateau(curve_a, 0.05, 0.5, 0.5);
    out.plateau_b = detect_plateau(curve_b, 0.05, 0.5, 0.5);
    out.tail = tail_compare(curve_a, curve_b, kPairTailLimit);
    return out;
}

double total_magnitude(const std::vector<FluctuationEvent>& events) {
    return std::accumulate(events.begin(), events.end(), 0.0,
                           [](double acc, const FluctuationEvent& ev) {
                               return acc + (ev.d2 - ev.d1);
                           });
}

// Shared low-level builders. All correctness patterns are laid out in
// descending-maxprob position order.

std::vector<bool> sprinkled_wrongs(std::int64_t n, std::int64_t period, std::int64_t offset) {
    std::vector<bool> correct(static_cast<std::size_t>(n), true);
    for (std::int64_t i = offset; i < n; i += period) {
        correct[static_cast<std::size_t>(i)] = false;
    }
    return correct;
}

// Alternating correct/wrong segments, sized as fractions of n; the last
// segment absorbs rounding. Segments at even positions are correct.
std::vector<bool> segment_pattern(std::int64_t n, const std::vector<double>& fractions) {
    std::vector<bool> correct;
    correct.reserve(static_cast<std::size_t>(n));
    for (std::size_t s = 0; s < fractions.size(); ++s) {
        auto len = std::max<std::int64_t>(
            1, std::llround(fractions[s] * static_cast<double>(n)));
        if (s + 1 == fractions.size()) {
            len = n - static_cast<std::int64_t>(correct.size());
        }
        const bool value = s % 2 == 0;
        for (std::int64_t i = 0; i < len && static_cast<std::int64_t>(correct.size()) < n; ++i) {
            correct.push_back(value);
        }
    }
    correct.resize(static_cast<std::size_t>(n), fractions.size() % 2 == 1);
    return correct;
}

struct CasePlan {
    std::vector<bool> correct_a;
    std::vector<bool> correct_b;
    double hi_a = 0.99, lo_a = 0.50;
    double hi_b = 0.99, lo_b = 0.40;
};

CasePlan plan_case(int case_id, std::int64_t n) {
    CasePlan plan;
    switch (case_id) {
        case 1:
            // A: high AUC but errs immediately; B: flawless until coverage
            // 0.3, then collapses.
            plan.correct_a = sprinkled_wrongs(n, 10, 1);
            plan.correct_b = corrects_first(n, std::llround(0.3 * static_cast<double>(n)));
            break;
        case 2:
            // two deep early dips for A
            plan.correct_a = segment_pattern(n, {0.05, 0.025, 0.075, 0.025, 0.575, 0.25});
            plan.correct_b = corrects_first(n, std::llround(0.35 * static_cast<double>(n)));
            break;
        case 3: {
            // many shallow dips spread over the sweep
            std::vector<double> fractions{0.06};
            for (int e = 0; e < 8; ++e) {
                fractions.push_back(0.01);
                fractions.push_back(0.0775);
            }
            plan.correct_a = segment_pattern(n, fractions);
            plan.correct_b = corrects_first(n, std::llround(0.5 * static_cast<double>(n)));
            break;
        }
        case 4:
            // fewer events, large magnitude, mid-to-high coverage
            plan.correct_a = segment_pattern(n, {0.30, 0.05, 0.25, 0.05, 0.35});
            plan.correct_b = corrects_first(n, std::llround(0.45 * static_cast<double>(n)));
            break;
        case 5:
            // transformer-style plateau: all confidences squeezed high
            plan.correct_a = plateau_pattern(n, 0.93);
            plan.hi_a = 0.9999;
            plan.lo_a = 0.992;
            plan.correct_b = corrects_first(n, std::llround(0.5 * static_cast<double>(n)));
            break;
        case 6:
            // plateau plus two deep dips inside the squeezed range
            plan.correct_a = segment_pattern(n, {0.05, 0.015, 0.135, 0.015, 0.785});
            plan.hi_a = 0.9999;
            plan.lo_a = 0.992;
            plan.correct_b = corrects_first(n, std::llround(0.5 * static_cast<double>(n)));
            break;
        default:
            throw ValidationError("table1 case must be in 1..6");
    }
    return plan;
}

std::string check_case(int case_id, const PairOutcome& out) {
    std::ostringstream why;
    if (!(out.auc_a > out.auc_b)) {
        why << "auc(A)=" << out.auc_a << " not above auc(B)=" << out.auc_b;
        return why.str();
    }
    if (!(out.disca_b.total > out.disca_a.total)) {
        why << "disca(B)=" << out.disca_b.total << " not above disca(A)=" << out.disca_a.total;
        return why.str();
    }
    switch (case_id) {
        case 1:
            if (!out.tail.disagreement ||
                !(out.tail.mean_acc_tail_b > out.tail.mean_acc_tail_a)) {
                return "tail comparison did not flip the AUC ordering";
            }
            break;
        case 2:
            if (out.events_a.size() < 2 || !out.events_b.empty()) {
                return "expected >=2 fluctuation events for A and none for B";
            }
            break;
        case 3:
            if (out.events_a.size() < 6 || !out.events_b.empty()) {
                return "expected >=6 fluctuation events for A and none for B";
            }
            break;
        case 4:
            if (out.events_a.size() < 2 || !out.events_b.empty() ||
                total_magnitude(out.events_a) < 0.1) {
                return "expected large-magnitude fluctuations for A and none for B";
            }
            break;
        case 5:
            if (!out.plateau_a || out.plateau_a->acceptable) {
                return "expected an unacceptable plateau for A";
            }
            if (out.plateau_b && !out.plateau_b->acceptable) {
                return "B unexpectedly shows an unacceptable plateau";
            }
            if (!out.events_b.empty()) return "expected no fluctuations for B";
            break;
        case 6:
            if (!out.plateau_a || out.plateau_a->acceptable || out.events_a.size() < 2) {
                return "expected an unacceptable plateau plus fluctuations for A";
            }
            if (!out.events_b.empty()) return "expected no fluctuations for B";
            break;
        default:
            return "unknown case";
    }
    return {};
}

std::string describe_case(int case_id, const PairOutcome& out) {
    std::ostringstream text;
    text << "case " << case_id << ": auc(A)=" << out.auc_a << " > auc(B)=" << out.auc_b
         << "; disca(B)=" << out.disca_b.total << " > disca(A)=" << out.disca_a.total
         << " at worst_accuracy=" << kPairWorstAccuracy;
    switch (case_id) {
        case 1:
            text << "; tail mean accuracy below coverage " << kPairTailLimit
                 << ": B=" << out.tail.mean_acc_tail_b << " > A=" << out.tail.mean_acc_tail_a;
            break;
        case 2:
        case 3:
        case 4:
            text << "; fluctuation events: A=" << out.events_a.size()
                 << " (magnitude " << total_magnitude(out.events_a) << "), B="
                 << out.events_b.size();
            break;
        case 5:
        case 6:
            text << "; A forms an unacceptable plateau over ["
                 << out.plateau_a->start_coverage << ", " << out.plateau_a->end_coverage
                 << "] with thresholds above 0.5; B does not";
            break;
        default:
            break;
    }
    return text.str();
}

}  // namespace

Table1Pair generate_table1_pair(int case_id, std::int64_t n_samples, std::uint64_t seed) {
    if (case_id < 1 || case_id > 6) throw ValidationError("table1 case must be in 1..6");
    if (n_samples < 40) {
        throw ValidationError("table1 pair needs n_samples >= 40");
    }

    const CasePlan plan = plan_case(case_id, n_samples);
    const std::string dataset = "table1_case" + std::to_string(case_id);

    std::string last_reason;
    constexpr int kMaxAttempts = 8;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(attempt));
        const auto maxprobs_a = descending_maxprobs(n_samples, plan.hi_a, plan.lo_a, rng);
        const auto maxprobs_b = descending_maxprobs(n_samples, plan.hi_b, plan.lo_b, rng);
        PredictionLog log_a = assemble("model_a", dataset, maxprobs_a, plan.correct_a);
        PredictionLog log_b = assemble("model_b", dataset, maxprobs_b, plan.correct_b);

        const PairOutcome outcome = evaluate_pair(log_a, log_b);
        last_reason = check_case(case_id, outcome);
        if (last_reason.empty()) {
            return Table1Pair{std::move(log_a), std::move(log_b),
                              describe_case(case_id, outcome)};
        }
    }
    throw ValidationError("table1 case " + std::to_string(case_id) +
                          ": construction failed after " + std::to_string(kMaxAttempts) +
                          " attempts (" + last_reason + "); try another seed");
}

}  // namespace seleval
