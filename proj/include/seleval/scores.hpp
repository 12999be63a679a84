#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "seleval/curve.hpp"
#include "seleval/diagnostics.hpp"

namespace seleval {

// Region-of-interest weights for the three DiSCA terms; x + y + z = 1.
struct DiscaWeights {
    double x = 1.0 / 3.0;
    double y = 1.0 / 3.0;
    double z = 1.0 / 3.0;

    void validate() const;
};

// DiSCA = x/a + y/b - z * weighted fluctuation penalty. The breakdown keeps
// every intermediate so score tables and reports can show where a total
// came from.
struct DiscaBreakdown {
    double a = 0.0;
    bool a_defined = false;
    double b = 0.0;
    bool b_crossed = false;
    double worst_accuracy = 0.0;
    int n_fluctuations = 0;
    double term1 = 0.0;  // x / a
    double term2 = 0.0;  // y / b
    double term3 = 0.0;  // z * penalty, >= 0; 0 iff no fluctuations
    double total = 0.0;  // term1 + term2 - term3
};

// Per-process resource usage and energy for the datacenter energy model.
struct EnergyProcess {
    double p_dram = 0.0;
    double p_cpu = 0.0;
    double p_gpu = 0.0;  // utilization fractions in [0, 1]
    double e_dram = 0.0;
    double e_cpu = 0.0;
    double e_gpu = 0.0;  // energy per resource, >= 0
};

// e_total = pue * sum over processes of (p_dram*e_dram + p_cpu*e_cpu +
// p_gpu*e_gpu). Measurements are supplied by the caller; nothing is metered
// here.
struct EnergyProfile {
    double pue = 1.0;
    std::vector<EnergyProcess> processes;
};

// Deployment-capacity alternative: score = optimal_params / model_params.
struct ParamRatio {
    std::int64_t optimal_params = 0;
    std::int64_t model_params = 0;
};

using ComputationInput = std::variant<EnergyProfile, ParamRatio>;

// p+q weight DiSCA against the computation score; u+v weight DiDMA against
// DiSCA on OOD data. Both sums must equal 1.
struct CompositionWeights {
    double p = 1.0;
    double q = 0.0;
    double u = 0.5;
    double v = 0.5;

    void validate() const;
};

// Weight-independent fluctuation penalty: events ordered by increasing
// coverage, event i of n weighted (n - i + 1) so the rises in the
// high-confidence region (where safety-critical systems operate) count
// most. Returns sum((n-i+1) * (d2_i - d1_i) / c_i) / sum(n-i+1), 0 for no
// events.
double fluctuation_penalty(std::span<const FluctuationEvent> events);

DiscaBreakdown disca(const RiskCoverageCurve& curve, const DiscaWeights& weights,
                     double worst_accuracy);

// Table-2-style cell classes, decided by the model's overall accuracy
// against a descending threshold sweep:
//   never_crossed  - overall accuracy meets the column threshold
//   crossed_here   - falls below this threshold but not the next one
//   crossed_earlier- falls below this threshold and the next one too
enum class CellClass { crossed_here, crossed_earlier, never_crossed };

const char* to_string(CellClass cls);

struct SweepEntry {
    double threshold = 0.0;
    DiscaBreakdown breakdown;
    CellClass cell_class = CellClass::never_crossed;
};

// One breakdown per threshold; thresholds must be strictly decreasing,
// each in [0.5, 1.0].
std::vector<SweepEntry> disca_sweep(const RiskCoverageCurve& curve, const DiscaWeights& weights,
                                    std::span<const double> thresholds);

// 1 / e_total for energy profiles, optimal/model for parameter ratios.
double computation_score(const ComputationInput& input);

// DiDMA = p * DiSCA + q * computation score.
double didma(double disca_total, double comp_score, const CompositionWeights& weights);

// NiDMA = u * DiDMA + v * DiSCA on the OOD curve.
double nidma(double didma_score, double disca_ood_total, const CompositionWeights& weights);

}  // namespace seleval
