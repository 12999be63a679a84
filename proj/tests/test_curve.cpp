#include <doctest.h>

#include <cmath>
#include <sstream>

#include "seleval/curve.hpp"
#include "seleval/errors.hpp"
#include "reference.hpp"
#include "testutil.hpp"

using namespace seleval;
using testutil::log_from_blocks;
using testutil::log_from_pairs;

TEST_CASE("build_curve: single sample") {
    const auto curve = build_curve(log_from_pairs({{0.9, true}}));
    REQUIRE(curve.points.size() == 1);
    CHECK(curve.points[0].coverage == 1.0);
    CHECK(curve.points[0].accuracy == 1.0);
    CHECK(curve.points[0].threshold == 0.9);
}

TEST_CASE("build_curve: cumulative means") {
    const auto curve = build_curve(log_from_pairs({{0.9, true}, {0.8, false}, {0.7, true}}));
    REQUIRE(curve.points.size() == 3);
    CHECK(curve.points[0].coverage == 1.0 / 3.0);
    CHECK(curve.points[0].accuracy == 1.0);
    CHECK(curve.points[0].threshold == 0.9);
    CHECK(curve.points[1].coverage == 2.0 / 3.0);
    CHECK(curve.points[1].accuracy == 0.5);
    CHECK(curve.points[1].threshold == 0.8);
    CHECK(curve.points[2].coverage == 1.0);
    CHECK(curve.points[2].accuracy == 2.0 / 3.0);
    CHECK(curve.points[2].threshold == 0.7);
}

TEST_CASE("build_curve: equal maxprobs form one atomic block") {
    const auto curve = build_curve(log_from_pairs({{0.9, true}, {0.9, false}}));
    REQUIRE(curve.points.size() == 1);
    CHECK(curve.points[0].coverage == 1.0);
    CHECK(curve.points[0].accuracy == 0.5);
    CHECK(curve.points[0].threshold == 0.9);
    CHECK(curve.points[0].answered == 2);
    CHECK(curve.points[0].correct == 1);
}

TEST_CASE("build_curve: invariants on random logs") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto log = testutil::random_log(seed, 150);
        const auto curve = build_curve(log);
        CHECK(curve.n_samples == 150);
        CHECK(curve.points.back().coverage == 1.0);
        CHECK(curve.overall_accuracy() == curve.points.back().accuracy);
        for (std::size_t k = 0; k < curve.points.size(); ++k) {
            const auto& p = curve.points[k];
            CHECK(p.accuracy ==
                  static_cast<double>(p.correct) / static_cast<double>(p.answered));
            if (k > 0) {
                CHECK(p.coverage > curve.points[k - 1].coverage);
                CHECK(p.threshold < curve.points[k - 1].threshold);
            }
        }
    }
}

TEST_CASE("build_curve: permutation invariance") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto log = testutil::random_log(seed, 80);
        const auto base = build_curve(log);
        for (std::uint64_t s = 0; s < 3; ++s) {
            const auto other = build_curve(testutil::shuffled(log, 100 + s));
            CHECK(base.points == other.points);
        }
    }
}

TEST_CASE("auc: constant curves are exact") {
    // all correct / all wrong at any size
    std::vector<std::pair<double, bool>> all_c, all_w;
    for (int i = 0; i < 57; ++i) {
        all_c.emplace_back(0.99 - 0.001 * i, true);
        all_w.emplace_back(0.99 - 0.001 * i, false);
    }
    CHECK(auc(build_curve(log_from_pairs(all_c))) == 1.0);
    CHECK(auc(build_curve(log_from_pairs(all_w))) == 0.0);

    // tie blocks holding accuracy at exactly one half
    const auto half = build_curve(log_from_blocks({{0.9, 2, 1}, {0.7, 2, 1}, {0.5, 2, 1}}));
    CHECK(auc(half) == 0.5);

    // generic constant accuracy equals that accuracy exactly
    const auto two_thirds = build_curve(log_from_blocks({{0.9, 3, 2}, {0.6, 3, 2}, {0.3, 3, 2}}));
    CHECK(auc(two_thirds) == two_thirds.points[0].accuracy);
}

TEST_CASE("auc: hand trapezoid value") {
    RiskCoverageCurve curve;
    curve.model_id = "m";
    curve.dataset_id = "d";
    curve.n_samples = 5;
    const double cov[] = {0.2, 0.4, 0.6, 0.8, 1.0};
    const double acc[] = {1.0, 1.0, 0.667, 0.75, 0.6};
    const double thr[] = {0.99, 0.95, 0.90, 0.85, 0.80};
    for (int k = 0; k < 5; ++k) {
        curve.points.push_back(CurvePoint{cov[k], acc[k], thr[k], k + 1, 0});
    }
    CHECK(std::abs(auc(curve) - 0.8433) < 1e-3);
}

TEST_CASE("auc matches the counting oracle on small exhaustive logs") {
    for (int n = 1; n <= 8; ++n) {
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
            std::vector<std::pair<double, bool>> samples;
            for (int i = 0; i < n; ++i) {
                samples.emplace_back(0.97 - 0.05 * i, (mask >> i & 1u) != 0);
            }
            const auto log = log_from_pairs(samples);
            const auto ref = refimpl::curve(log);
            CHECK(std::abs(auc(build_curve(log)) - refimpl::auc(ref)) <= 1e-12);
        }
    }
}

TEST_CASE("auc is maximized by the optimally ordered assignment") {
    // all assignments of k corrects over n fixed distinct maxprobs
    for (int n : {4, 7, 10}) {
        std::vector<double> maxprobs;
        for (int i = 0; i < n; ++i) maxprobs.push_back(0.95 - 0.04 * i);
        std::vector<double> best_by_count(static_cast<std::size_t>(n) + 1, -1.0);
        std::vector<double> optimal_by_count(static_cast<std::size_t>(n) + 1, -1.0);
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
            std::vector<std::pair<double, bool>> samples;
            int k = 0;
            for (int i = 0; i < n; ++i) {
                const bool correct = (mask >> i & 1u) != 0;
                samples.emplace_back(maxprobs[static_cast<std::size_t>(i)], correct);
                k += correct ? 1 : 0;
            }
            const double value = auc(build_curve(log_from_pairs(samples)));
            best_by_count[static_cast<std::size_t>(k)] =
                std::max(best_by_count[static_cast<std::size_t>(k)], value);
            // corrects occupying the k highest maxprobs
            const bool optimal = mask == ((1u << k) - 1u);
            if (optimal) optimal_by_count[static_cast<std::size_t>(k)] = value;
        }
        for (int k = 0; k <= n; ++k) {
            CHECK(optimal_by_count[static_cast<std::size_t>(k)] ==
                  best_by_count[static_cast<std::size_t>(k)]);
        }
    }
}

TEST_CASE("auc_upto: restriction and consistency") {
    const auto curve = build_curve(log_from_pairs({{0.9, true}, {0.8, false}, {0.7, true}}));
    CHECK(auc_upto(curve, 1.0) == doctest::Approx(auc(curve)).epsilon(1e-15));
    // below the first point: constant extension
    CHECK(auc_upto(curve, 0.2) == doctest::Approx(0.2 * 1.0).epsilon(1e-15));
    CHECK_THROWS_AS(auc_upto(curve, 0.0), ValidationError);
    CHECK_THROWS_AS(auc_upto(curve, 1.5), ValidationError);
}

TEST_CASE("resample: grid identity on tie-free logs") {
    const auto log = testutil::random_log(5, 40);
    const auto curve = build_curve(log);
    if (curve.points.size() == 40) {  // tie-free
        const auto grid = resample(curve, 40);
        REQUIRE(grid.points.size() == 40);
        for (std::size_t k = 0; k < 40; ++k) {
            CHECK(grid.points[k].accuracy == curve.points[k].accuracy);
            CHECK(grid.points[k].threshold == curve.points[k].threshold);
        }
    }
}

TEST_CASE("resample: step rule and single bin") {
    const auto curve = build_curve(log_from_pairs({{0.9, true}, {0.8, false}, {0.7, true}}));

    const auto two = resample(curve, 2);
    REQUIRE(two.points.size() == 2);
    CHECK(two.points[0].coverage == 0.5);
    CHECK(two.points[0].accuracy == 1.0);  // carried from the 1/3 block
    CHECK(two.points[0].threshold == 0.9);
    CHECK(two.points[1].coverage == 1.0);
    CHECK(two.points[1].accuracy == 2.0 / 3.0);

    const auto one = resample(curve, 1);
    REQUIRE(one.points.size() == 1);
    CHECK(one.points[0].coverage == 1.0);
    CHECK(one.points[0].accuracy == curve.overall_accuracy());

    CHECK_THROWS_AS(resample(curve, 0), ValidationError);
}

TEST_CASE("curve csv export") {
    const auto curve = build_curve(log_from_pairs({{0.9, true}, {0.8, false}, {0.7, true}}));
    std::ostringstream out;
    write_curve_csv(curve, out);
    const std::string text = out.str();
    CHECK(text.rfind("coverage,accuracy,threshold\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 4);
    CHECK(text.find("0.333333333333,1,0.9") != std::string::npos);
    CHECK(text.find("0.666666666667,0.5,0.8") != std::string::npos);
}
