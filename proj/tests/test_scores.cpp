#include <doctest.h>

#include <cmath>

#include "seleval/errors.hpp"
#include "seleval/scores.hpp"
#include "testutil.hpp"

using namespace seleval;
using testutil::log_from_pairs;

namespace {

const DiscaWeights kThirds{};

RiskCoverageCurve golden_curve() {
    return build_curve(log_from_pairs(
        {{0.99, true}, {0.95, true}, {0.90, false}, {0.85, true}, {0.80, false}}));
}

}  // namespace

TEST_CASE("disca: worked five-sample example") {
    const auto breakdown = disca(golden_curve(), kThirds, 0.70);
    CHECK(breakdown.a == 0.90);
    CHECK(breakdown.a_defined);
    CHECK(breakdown.b == 0.90);
    CHECK(breakdown.b_crossed);
    CHECK(breakdown.n_fluctuations == 1);
    CHECK(std::abs(breakdown.term3 - 0.5556) < 1e-4);
    CHECK(std::abs(breakdown.total - 5.0 / 27.0) <= 1e-9);
    CHECK(breakdown.total == breakdown.term1 + breakdown.term2 - breakdown.term3);
}

TEST_CASE("disca: perfect model falls back to the lowest maxprob") {
    const auto curve = build_curve(log_from_pairs({{0.95, true}, {0.8, true}, {0.6, true}}));
    const auto breakdown = disca(curve, DiscaWeights{0.5, 0.3, 0.2}, 0.9);
    CHECK_FALSE(breakdown.a_defined);
    CHECK_FALSE(breakdown.b_crossed);
    CHECK(breakdown.a == 0.6);
    CHECK(breakdown.b == 0.6);
    CHECK(breakdown.n_fluctuations == 0);
    CHECK(breakdown.term3 == 0.0);
    CHECK(breakdown.total == doctest::Approx(0.5 / 0.6 + 0.3 / 0.6).epsilon(1e-15));
}

TEST_CASE("disca: single-term projection") {
    const auto breakdown = disca(golden_curve(), DiscaWeights{1.0, 0.0, 0.0}, 0.70);
    CHECK(breakdown.total == 1.0 / 0.9);
    CHECK(std::abs(breakdown.total - 1.1111) < 1e-4);
}

TEST_CASE("disca: weight and tolerance validation") {
    const auto curve = golden_curve();
    CHECK_THROWS_WITH_AS(disca(curve, DiscaWeights{0.5, 0.3, 0.1}, 0.7),
                         doctest::Contains("sum to 1"), ValidationError);
    CHECK_THROWS_AS(disca(curve, DiscaWeights{1.2, -0.2, 0.0}, 0.7), ValidationError);
    CHECK_THROWS_AS(disca(curve, kThirds, 0.3), ValidationError);
}

TEST_CASE("fluctuation penalty: single event is unweighted") {
    const auto events = find_fluctuations(golden_curve());
    REQUIRE(events.size() == 1);
    CHECK(fluctuation_penalty(events) ==
          (events[0].d2 - events[0].d1) / events[0].c_clamped);
}

TEST_CASE("disca: linearity in the weights") {
    std::mt19937_64 rng(99);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto curve = build_curve(testutil::random_log(seed, 120));
        const double t_a = disca(curve, DiscaWeights{1, 0, 0}, 0.8).total;
        const double t_b = disca(curve, DiscaWeights{0, 1, 0}, 0.8).total;
        const double t_f = disca(curve, DiscaWeights{0, 0, 1}, 0.8).total;
        for (int trial = 0; trial < 10; ++trial) {
            double x = testutil::unit_real(rng);
            double y = testutil::unit_real(rng) * (1.0 - x);
            double z = 1.0 - x - y;
            const double direct = disca(curve, DiscaWeights{x, y, z}, 0.8).total;
            const double recombined = x * t_a + y * t_b + z * t_f;
            CHECK(std::abs(direct - recombined) <= 1e-12);
        }
    }
}

TEST_CASE("disca decreases as a or b grows") {
    // two-point curves differing only in the drop threshold
    auto make = [](double drop_threshold, double tail_threshold) {
        RiskCoverageCurve curve;
        curve.n_samples = 10;
        curve.points.push_back(CurvePoint{0.5, 1.0, 0.95, 5, 5});
        curve.points.push_back(CurvePoint{0.8, 0.95, drop_threshold, 8, 7});
        curve.points.push_back(CurvePoint{1.0, 0.7, tail_threshold, 10, 7});
        return curve;
    };
    // a varies (first accuracy < 1), b fixed at the 0.7-accuracy point
    const double lo_a = disca(make(0.80, 0.40), kThirds, 0.9).total;
    const double hi_a = disca(make(0.90, 0.40), kThirds, 0.9).total;
    CHECK(lo_a > hi_a);
    // b varies, a fixed
    const double lo_b = disca(make(0.80, 0.30), kThirds, 0.9).total;
    const double hi_b = disca(make(0.80, 0.60), kThirds, 0.9).total;
    CHECK(lo_b > hi_b);
}

TEST_CASE("disca: term3 bounds hold on random logs") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto curve = build_curve(testutil::random_log(seed, 150));
        const auto breakdown = disca(curve, kThirds, 0.75);
        CHECK(breakdown.term3 >= 0.0);
        CHECK(breakdown.total <= breakdown.term1 + breakdown.term2);
        CHECK((breakdown.term3 == 0.0) == (breakdown.n_fluctuations == 0));
    }
}

TEST_CASE("disca_sweep: cell classes follow the overall accuracy") {
    // overall accuracy 0.93, optimally ordered
    std::vector<std::pair<double, bool>> samples;
    for (int i = 0; i < 100; ++i) samples.emplace_back(0.99 - 0.004 * i, i < 93);
    const auto curve = build_curve(log_from_pairs(samples));
    const auto thresholds = std::vector<double>{0.95, 0.90, 0.85, 0.80, 0.75, 0.70, 0.65, 0.60,
                                                0.55};
    const auto entries = disca_sweep(curve, kThirds, thresholds);
    REQUIRE(entries.size() == 9);
    CHECK(entries[0].cell_class == CellClass::crossed_here);
    for (std::size_t j = 1; j < entries.size(); ++j) {
        CHECK(entries[j].cell_class == CellClass::never_crossed);
    }
}

TEST_CASE("disca_sweep: all-correct model never crosses") {
    const auto curve = build_curve(log_from_pairs({{0.9, true}, {0.7, true}}));
    const std::vector<double> thresholds{0.95, 0.85, 0.75, 0.65, 0.55};
    for (const auto& entry : disca_sweep(curve, kThirds, thresholds)) {
        CHECK(entry.cell_class == CellClass::never_crossed);
    }
}

TEST_CASE("disca_sweep: golden log classes at a three-column sweep") {
    // overall accuracy 0.6: below 0.95 and 0.70, not below 0.55
    const std::vector<double> thresholds{0.95, 0.70, 0.55};
    const auto entries = disca_sweep(golden_curve(), kThirds, thresholds);
    REQUIRE(entries.size() == 3);
    CHECK(entries[0].cell_class == CellClass::crossed_earlier);
    CHECK(entries[1].cell_class == CellClass::crossed_here);
    CHECK(entries[2].cell_class == CellClass::never_crossed);
}

TEST_CASE("disca_sweep: threshold list validation") {
    const auto curve = golden_curve();
    CHECK_THROWS_AS(disca_sweep(curve, kThirds, std::vector<double>{0.7, 0.9}), ValidationError);
    CHECK_THROWS_AS(disca_sweep(curve, kThirds, std::vector<double>{0.9, 0.9}), ValidationError);
    CHECK_THROWS_AS(disca_sweep(curve, kThirds, std::vector<double>{0.9, 0.4}), ValidationError);
    CHECK_THROWS_AS(disca_sweep(curve, kThirds, std::vector<double>{}), ValidationError);
}

TEST_CASE("computation_score: energy profile") {
    EnergyProfile profile;
    profile.pue = 1.58;
    profile.processes.push_back(EnergyProcess{0.0, 1.0, 0.0, 0.0, 2.0, 0.0});
    const double score = computation_score(profile);
    CHECK(score == doctest::Approx(1.0 / 3.16).epsilon(1e-15));
    CHECK(std::abs(score - 0.3165) < 1e-4);

    // several processes accumulate before the PUE multiplier
    profile.processes.push_back(EnergyProcess{0.5, 0.0, 0.25, 4.0, 0.0, 8.0});
    CHECK(computation_score(profile) == doctest::Approx(1.0 / (1.58 * (2.0 + 2.0 + 2.0))));

    EnergyProfile zero;
    zero.pue = 1.58;
    zero.processes.push_back(EnergyProcess{});
    CHECK_THROWS_AS(computation_score(zero), ValidationError);
    EnergyProfile bad_share;
    bad_share.pue = 1.0;
    bad_share.processes.push_back(EnergyProcess{1.5, 0.0, 0.0, 1.0, 0.0, 0.0});
    CHECK_THROWS_AS(computation_score(bad_share), ValidationError);
}

TEST_CASE("computation_score: parameter ratio") {
    CHECK(computation_score(ParamRatio{1000000, 2000000}) == 0.5);
    CHECK(computation_score(ParamRatio{1000000, 500000}) == 2.0);
    CHECK_THROWS_AS(computation_score(ParamRatio{1000000, 0}), ValidationError);
    CHECK_THROWS_AS(computation_score(ParamRatio{0, 1000000}), ValidationError);
}

TEST_CASE("didma and nidma compositions") {
    CHECK(didma(0.7, 4.2, CompositionWeights{1.0, 0.0, 0.5, 0.5}) == 0.7);
    CHECK(didma(0.7, 4.2, CompositionWeights{0.0, 1.0, 0.5, 0.5}) == 4.2);
    CHECK(didma(0.69, 0.5, CompositionWeights{0.5, 0.5, 0.5, 0.5}) ==
          doctest::Approx(0.595).epsilon(1e-12));

    CHECK(nidma(0.55, 0.3, CompositionWeights{0.5, 0.5, 1.0, 0.0}) == 0.55);
    CHECK(nidma(0.55, 0.3, CompositionWeights{0.5, 0.5, 0.0, 1.0}) == 0.3);
    CHECK(nidma(0.595, 0.45, CompositionWeights{0.5, 0.5, 0.5, 0.5}) ==
          doctest::Approx(0.5225).epsilon(1e-12));

    CHECK_THROWS_AS(didma(0.5, 0.5, CompositionWeights{0.6, 0.6, 0.5, 0.5}), ValidationError);
    CHECK_THROWS_AS(nidma(0.5, 0.5, CompositionWeights{0.5, 0.5, 0.9, 0.2}), ValidationError);
}

TEST_CASE("nidma is affine in each input") {
    const CompositionWeights weights{0.7, 0.3, 0.6, 0.4};
    const double base = nidma(didma(0.5, 0.25, weights), 0.8, weights);
    const double bumped_disca = nidma(didma(0.5 + 1.0, 0.25, weights), 0.8, weights);
    CHECK(bumped_disca - base == doctest::Approx(0.6 * 0.7).epsilon(1e-12));
    const double bumped_comp = nidma(didma(0.5, 0.25 + 1.0, weights), 0.8, weights);
    CHECK(bumped_comp - base == doctest::Approx(0.6 * 0.3).epsilon(1e-12));
    const double bumped_ood = nidma(didma(0.5, 0.25, weights), 0.8 + 1.0, weights);
    CHECK(bumped_ood - base == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("scores are permutation invariant") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto log = testutil::random_log(seed, 100);
        const auto base = disca(build_curve(log), kThirds, 0.85);
        const auto shuffled = disca(build_curve(testutil::shuffled(log, seed + 77)), kThirds, 0.85);
        CHECK(base.total == shuffled.total);
        CHECK(base.term3 == shuffled.term3);
        CHECK(base.a == shuffled.a);
        CHECK(base.b == shuffled.b);
    }
}
