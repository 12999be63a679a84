#include <doctest.h>

#include <cmath>

#include "seleval/diagnostics.hpp"
#include "seleval/errors.hpp"
#include "testutil.hpp"

using namespace seleval;
using testutil::Block;
using testutil::log_from_blocks;
using testutil::log_from_pairs;

namespace {

// accuracy sequence [1, 1, 2/3, 3/4, 3/5] at thresholds .99 .95 .90 .85 .80
RiskCoverageCurve example_curve() {
    return build_curve(log_from_pairs(
        {{0.99, true}, {0.95, true}, {0.90, false}, {0.85, true}, {0.80, false}}));
}

}  // namespace

TEST_CASE("first_drop") {
    const auto curve = example_curve();
    const auto drop = first_drop(curve);
    CHECK(drop.a == 0.90);
    CHECK(drop.defined);

    // never drops: falls back to the lowest maxprob, flagged
    const auto perfect = build_curve(log_from_pairs({{0.9, true}, {0.6, true}}));
    const auto none = first_drop(perfect);
    CHECK(none.a == 0.6);
    CHECK_FALSE(none.defined);

    // drop at the very first point
    const auto early = build_curve(log_from_pairs({{0.97, false}, {0.6, true}}));
    CHECK(first_drop(early).a == 0.97);
    CHECK(first_drop(early).defined);
}

TEST_CASE("tolerance_cutoff") {
    const auto curve = example_curve();

    auto cutoff = tolerance_cutoff(curve, 0.70);
    CHECK(cutoff.b == 0.90);  // 2/3 is the first accuracy below 0.70
    CHECK(cutoff.crossed);

    // 3/5 == 0.6 is not strictly below 0.60, so the sweep never crosses
    cutoff = tolerance_cutoff(curve, 0.60);
    CHECK(cutoff.b == 0.80);
    CHECK_FALSE(cutoff.crossed);

    const auto perfect = build_curve(log_from_pairs({{0.9, true}, {0.6, true}}));
    cutoff = tolerance_cutoff(perfect, 0.8);
    CHECK(cutoff.b == 0.6);
    CHECK_FALSE(cutoff.crossed);

    CHECK_THROWS_AS(tolerance_cutoff(curve, 0.4), ValidationError);
    CHECK_THROWS_AS(tolerance_cutoff(curve, 1.1), ValidationError);
}

TEST_CASE("tolerance_cutoff equals first_drop at tolerance 1.0") {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        const auto curve = build_curve(testutil::random_log(seed, 60));
        const auto drop = first_drop(curve);
        const auto cutoff = tolerance_cutoff(curve, 1.0);
        if (drop.defined && cutoff.crossed) CHECK(drop.a == cutoff.b);
        CHECK(drop.a <= curve.points.front().threshold);
    }
}

TEST_CASE("find_fluctuations: monotone curves have none") {
    const auto falling = build_curve(
        log_from_pairs({{0.9, true}, {0.8, true}, {0.7, false}, {0.6, false}}));
    CHECK(find_fluctuations(falling).empty());
}

TEST_CASE("find_fluctuations: one rise") {
    const auto curve = build_curve(log_from_pairs({{0.9, true}, {0.8, false}, {0.7, true}}));
    const auto events = find_fluctuations(curve);
    REQUIRE(events.size() == 1);
    CHECK(events[0].index == 1);
    CHECK(events[0].d1 == 0.5);
    CHECK(events[0].d2 == 2.0 / 3.0);
    CHECK(events[0].c1 == 0.8);
    CHECK(events[0].c2 == 0.7);
    CHECK(events[0].c_clamped == 0.8 - 0.7);
}

TEST_CASE("find_fluctuations: runs merge and flats terminate") {
    // accuracy sequence [1, 0.5, 0.6, 0.7, 0.4, 0.5] via tie blocks
    const auto curve = build_curve(log_from_blocks({{0.95, 1, 1},
                                                    {0.90, 1, 0},
                                                    {0.85, 3, 2},
                                                    {0.80, 5, 4},
                                                    {0.75, 10, 1},
                                                    {0.70, 4, 4}}));
    REQUIRE(curve.points.size() == 6);
    CHECK(curve.points[2].accuracy == 0.6);
    CHECK(curve.points[3].accuracy == 0.7);
    CHECK(curve.points[4].accuracy == 0.4);

    const auto events = find_fluctuations(curve);
    REQUIRE(events.size() == 2);
    CHECK(events[0].d1 == 0.5);
    CHECK(events[0].d2 == 0.7);
    CHECK(events[0].c1 == 0.90);
    CHECK(events[0].c2 == 0.80);
    CHECK(events[1].index == 2);
    CHECK(events[1].d1 == 0.4);
    CHECK(events[1].d2 == 0.5);

    // a flat step inside what would otherwise be one run splits it: the
    // valley of the rise after the flat sits on the flat's last point
    const auto flat = build_curve(
        log_from_blocks({{0.9, 1, 1}, {0.8, 1, 0}, {0.7, 2, 1}, {0.6, 4, 4}}));
    // accuracies: 1, 0.5, 0.5, 0.75
    const auto flat_events = find_fluctuations(flat);
    REQUIRE(flat_events.size() == 1);
    CHECK(flat_events[0].d1 == 0.5);
    CHECK(flat_events[0].c1 == 0.7);  // the flat point, not the first 0.5
    CHECK(flat_events[0].d2 == 0.75);
}

TEST_CASE("find_fluctuations: typed invariants on random logs") {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        const auto curve = build_curve(testutil::random_log(seed, 120));
        const auto events = find_fluctuations(curve);
        int last_index = 0;
        for (const auto& ev : events) {
            CHECK(ev.index == last_index + 1);
            last_index = ev.index;
            CHECK(ev.d1 < ev.d2);
            CHECK(ev.c1 >= ev.c2);
            CHECK(ev.c_clamped >= 0.001);
            CHECK(ev.c_clamped == std::max(ev.c1 - ev.c2, 0.001));
        }
        // empty iff non-increasing
        bool non_increasing = true;
        for (std::size_t k = 1; k < curve.points.size(); ++k) {
            if (curve.points[k].accuracy > curve.points[k - 1].accuracy) non_increasing = false;
        }
        CHECK(events.empty() == non_increasing);
    }
}

TEST_CASE("clamp floors tiny confidence gaps") {
    const auto curve =
        build_curve(log_from_pairs({{0.9995, true}, {0.9994, false}, {0.99935, true}}));
    const auto events = find_fluctuations(curve);
    REQUIRE(events.size() == 1);
    CHECK(events[0].c_clamped == 0.001);
}

TEST_CASE("tail_compare") {
    const auto curve = example_curve();
    const auto same = tail_compare(curve, curve, 0.3);
    CHECK_FALSE(same.disagreement);
    CHECK(same.auc_full_a == same.auc_full_b);

    // constant 0.9 vs constant 0.8: same ordering everywhere
    const auto c9 = build_curve(log_from_blocks({{0.9, 10, 9}, {0.6, 10, 9}}));
    const auto c8 = build_curve(log_from_blocks({{0.9, 10, 8}, {0.6, 10, 8}}));
    for (double limit : {0.1, 0.3, 0.7, 1.0}) {
        const auto finding = tail_compare(c9, c8, limit);
        CHECK_FALSE(finding.disagreement);
        CHECK(finding.mean_acc_tail_a == doctest::Approx(0.9));
        CHECK(finding.mean_acc_tail_b == doctest::Approx(0.8));
    }

    CHECK_THROWS_AS(tail_compare(curve, curve, 0.0), ValidationError);
    CHECK_THROWS_AS(tail_compare(curve, curve, 1.0001), ValidationError);
}

TEST_CASE("tail_compare is antisymmetric") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto a = build_curve(testutil::random_log(seed, 90, "a", "d"));
        const auto b = build_curve(testutil::random_log(seed + 100, 90, "b", "d"));
        const auto ab = tail_compare(a, b, 0.3);
        const auto ba = tail_compare(b, a, 0.3);
        CHECK(ab.disagreement == ba.disagreement);
        CHECK(ab.auc_full_a == ba.auc_full_b);
        CHECK(ab.mean_acc_tail_a == ba.mean_acc_tail_b);
    }
}

TEST_CASE("detect_plateau") {
    // constant 0.95 with high confidence everywhere: found, unacceptable
    const auto high = build_curve(log_from_blocks(
        {{0.99, 20, 19}, {0.97, 20, 19}, {0.95, 20, 19}, {0.93, 20, 19}, {0.91, 20, 19}}));
    auto finding = detect_plateau(high, 0.05, 0.5, 0.5);
    REQUIRE(finding.has_value());
    CHECK(finding->start_coverage == 0.2);
    CHECK(finding->end_coverage == 1.0);
    CHECK(finding->accuracy_band == 0.0);
    CHECK(finding->min_threshold_in_region == 0.91);
    CHECK_FALSE(finding->acceptable);

    // same accuracies but low confidence: acceptable
    const auto low = build_curve(log_from_blocks(
        {{0.40, 20, 19}, {0.35, 20, 19}, {0.30, 20, 19}, {0.25, 20, 19}, {0.20, 20, 19}}));
    finding = detect_plateau(low, 0.05, 0.5, 0.5);
    REQUIRE(finding.has_value());
    CHECK(finding->acceptable);

    // steadily falling accuracy: no wide band
    std::vector<std::pair<double, bool>> falling;
    for (int i = 0; i < 100; ++i) falling.emplace_back(0.99 - 0.005 * i, i < 50);
    finding = detect_plateau(build_curve(log_from_pairs(falling)), 0.05, 0.5, 0.5);
    CHECK_FALSE(finding.has_value());

    const auto curve = example_curve();
    CHECK_THROWS_AS(detect_plateau(curve, 0.0, 0.5, 0.5), ValidationError);
    CHECK_THROWS_AS(detect_plateau(curve, 0.05, 0.0, 0.5), ValidationError);
    CHECK_THROWS_AS(detect_plateau(curve, 0.05, 0.5, 1.0), ValidationError);
}

TEST_CASE("b is monotone in the tolerance") {
    const double sweep[] = {0.95, 0.90, 0.85, 0.80, 0.75, 0.70, 0.65, 0.60, 0.55};
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto curve = build_curve(testutil::random_log(seed, 200));
        double prev = 2.0;
        for (double worst : sweep) {
            const double b = tolerance_cutoff(curve, worst).b;
            CHECK(b <= prev);
            prev = b;
        }
    }
}
