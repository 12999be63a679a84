#include "seleval/scores.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "seleval/errors.hpp"

namespace seleval {

namespace {

constexpr double kWeightSumTolerance = 1e-9;

void check_weight_sum(double sum, const char* what) {
    if (std::abs(sum - 1.0) > kWeightSumTolerance) {
        throw ValidationError(std::string(what) + " must sum to 1 (got " + std::to_string(sum) +
                              ")");
    }
}

}  // namespace

void DiscaWeights::validate() const {
    if (x < 0.0 || y < 0.0 || z < 0.0) {
        throw ValidationError("disca weights x, y, z must be >= 0");
    }
    check_weight_sum(x + y + z, "disca weights x+y+z");
}

void CompositionWeights::validate() const {
    if (p < 0.0 || q < 0.0 || u < 0.0 || v < 0.0) {
        throw ValidationError("composition weights must be >= 0");
    }
    check_weight_sum(p + q, "composition weights p+q");
    check_weight_sum(u + v, "composition weights u+v");
}

double fluctuation_penalty(std::span<const FluctuationEvent> events) {
    if (events.empty()) return 0.0;
    const auto n = static_cast<double>(events.size());
    double weighted = 0.0;
    double weight_sum = 0.0;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const double weight = n - static_cast<double>(i);  // event 1 gets weight n
        weighted += weight * (events[i].d2 - events[i].d1) / events[i].c_clamped;
        weight_sum += weight;
    }
    return weighted / weight_sum;
}

DiscaBreakdown disca(const RiskCoverageCurve& curve, const DiscaWeights& weights,
                     double worst_accuracy) {
    weights.validate();

    const FirstDrop drop = first_drop(curve);
    const ToleranceCutoff cutoff = tolerance_cutoff(curve, worst_accuracy);
    const auto events = find_fluctuations(curve);

    DiscaBreakdown breakdown;
    breakdown.a = drop.a;
    breakdown.a_defined = drop.defined;
    breakdown.b = cutoff.b;
    breakdown.b_crossed = cutoff.crossed;
    breakdown.worst_accuracy = worst_accuracy;
    breakdown.n_fluctuations = static_cast<int>(events.size());
    if (breakdown.a <= 0.0 || breakdown.b <= 0.0) {
        // maxprob bounds make this unreachable for curves built from logs
        throw std::logic_error("disca: extracted a or b is not positive");
    }
    breakdown.term1 = weights.x / breakdown.a;
    breakdown.term2 = weights.y / breakdown.b;
    breakdown.term3 = weights.z * fluctuation_penalty(events);
    breakdown.total = breakdown.term1 + breakdown.term2 - breakdown.term3;
    return breakdown;
}

const char* to_string(CellClass cls) {
    switch (cls) {
        case CellClass::crossed_here: return "crossed_here";
        case CellClass::crossed_earlier: return "crossed_earlier";
        case CellClass::never_crossed: return "never_crossed";
    }
    return "unknown";
}

std::vector<SweepEntry> disca_sweep(const RiskCoverageCurve& curve, const DiscaWeights& weights,
                                    std::span<const double> thresholds) {
    if (thresholds.empty()) throw ValidationError("disca_sweep: empty threshold list");
    for (std::size_t j = 0; j < thresholds.size(); ++j) {
        if (!(thresholds[j] >= 0.5) || !(thresholds[j] <= 1.0)) {
            throw ValidationError("disca_sweep: thresholds must lie in [0.5, 1.0]");
        }
        if (j > 0 && !(thresholds[j] < thresholds[j - 1])) {
            throw ValidationError("disca_sweep: thresholds must be strictly decreasing");
        }
    }

    const double overall = curve.overall_accuracy();
    std::vector<SweepEntry> entries;
    entries.reserve(thresholds.size());
    for (std::size_t j = 0; j < thresholds.size(); ++j) {
        SweepEntry entry;
        entry.threshold = thresholds[j];
        entry.breakdown = disca(curve, weights, thresholds[j]);
        if (!(overall < thresholds[j])) {
            entry.cell_class = CellClass::never_crossed;
        } else if (j + 1 < thresholds.size() && overall < thresholds[j + 1]) {
            entry.cell_class = CellClass::crossed_earlier;
        } else {
            entry.cell_class = CellClass::crossed_here;
        }
        entries.push_back(entry);
    }
    return entries;
}

double computation_score(const ComputationInput& input) {
    if (const auto* energy = std::get_if<EnergyProfile>(&input)) {
        if (!(energy->pue > 0.0)) throw ValidationError("computation: PUE must be > 0");
        if (energy->processes.empty()) {
            throw ValidationError("computation: energy profile has no processes");
        }
        double total = 0.0;
        for (const auto& proc : energy->processes) {
            for (double share : {proc.p_dram, proc.p_cpu, proc.p_gpu}) {
                if (share < 0.0 || share > 1.0) {
                    throw ValidationError("computation: resource shares must be in [0, 1]");
                }
            }
            for (double e : {proc.e_dram, proc.e_cpu, proc.e_gpu}) {
                if (e < 0.0) throw ValidationError("computation: energies must be >= 0");
            }
            total += proc.p_dram * proc.e_dram + proc.p_cpu * proc.e_cpu + proc.p_gpu * proc.e_gpu;
        }
        const double e_total = energy->pue * total;
        if (!(e_total > 0.0)) throw ValidationError("computation: total energy must be > 0");
        return 1.0 / e_total;
    }
    const auto& ratio = std::get<ParamRatio>(input);
    if (ratio.optimal_params <= 0) {
        throw ValidationError("computation: optimal_params must be positive");
    }
    if (ratio.model_params <= 0) {
        throw ValidationError("computation: model_params must be positive");
    }
    return static_cast<double>(ratio.optimal_params) / static_cast<double>(ratio.model_params);
}

double didma(double disca_total, double comp_score, const CompositionWeights& weights) {
    weights.validate();
    return weights.p * disca_total + weights.q * comp_score;
}

double nidma(double didma_score, double disca_ood_total, const CompositionWeights& weights) {
    weights.validate();
    return weights.u * didma_score + weights.v * disca_ood_total;
}

}  // namespace seleval
