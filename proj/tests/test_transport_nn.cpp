#include <cmath>

#include "helpers.hpp"
#include "genmetrics/nn_test.hpp"
#include "genmetrics/parallel.hpp"
#include "genmetrics/transport.hpp"

using namespace genmetrics;
using testutil::normal_set;
using testutil::points;

// --- EMD ------------------------------------------------------------------------------

TEST(Emd, Examples) {
    SeededRng rng(1);
    const auto a = normal_set(12, 3, rng);
    EXPECT_NEAR(emd(a, a).score, 0.0, 1e-12);
    EXPECT_NEAR(emd(points({{0.0}}), points({{1.0}})).score, 1.0, 1e-12);
    const std::vector<double> wa{1.0};
    const std::vector<double> wb{0.5, 0.5};
    EXPECT_NEAR(emd(points({{0.0}}), points({{-1.0}, {1.0}}), wa, wb).score, 1.0, 1e-12);
}

TEST(Emd, MatchesBruteForceOracle) {
    for (std::uint64_t s = 0; s < 100; ++s) {
        SeededRng rng(s);
        const auto n = static_cast<std::size_t>(rng.between(1, 8));
        const auto d = static_cast<std::size_t>(rng.between(1, 4));
        const auto a = normal_set(n, d, rng);
        const auto b = normal_set(n, d, rng, 0.3);
        ASSERT_NEAR(emd(a, b).score, brute_force_emd(a, b), 1e-9) << "seed " << s;
    }
}

TEST(Emd, BruteForceExamples) {
    const auto a = points({{0, 0}, {1, 0}});
    EXPECT_EQ(brute_force_emd(a, a), 0.0);
    EXPECT_EQ(brute_force_emd(a, points({{1, 0}, {0, 0}})), 0.0);
    EXPECT_ERROR_CODE(brute_force_emd(a, points({{1, 0}})), ErrorCode::unsupported);
}

TEST(Emd, MetricAxioms) {
    SeededRng rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        const auto a = normal_set(15, 3, rng);
        const auto b = normal_set(15, 3, rng, 0.5);
        const auto c = normal_set(15, 3, rng, -0.5, 2.0);
        const double ab = emd(a, b).score, bc = emd(b, c).score, ac = emd(a, c).score;
        EXPECT_NEAR(ab, emd(b, a).score, 1e-9);
        EXPECT_LE(ac, ab + bc + 1e-8);
        EXPECT_GE(ab, 0.0);
    }
}

TEST(Emd, PlanIsFeasibleAndPricesToScore) {
    SeededRng rng(3);
    const auto a = normal_set(23, 4, rng);
    const auto b = normal_set(17, 4, rng, 1.0);
    const auto r = emd(a, b);
    const auto dist = pairwise_distances(a, b);
    double cost = 0;
    for (std::size_t i = 0; i < 23; ++i) {
        double row = 0;
        for (std::size_t j = 0; j < 17; ++j) {
            ASSERT_GE(r.plan(i, j), 0.0);
            row += r.plan(i, j);
            cost += r.plan(i, j) * dist(i, j);
        }
        EXPECT_NEAR(row, 1.0 / 23, 1e-12);
    }
    for (std::size_t j = 0; j < 17; ++j) {
        double col = 0;
        for (std::size_t i = 0; i < 23; ++i) col += r.plan(i, j);
        EXPECT_NEAR(col, 1.0 / 17, 1e-12);
    }
    EXPECT_NEAR(cost, r.score, 1e-9);
}

TEST(Emd, WeightedAgreesWithUniformWhenWeightsAreUniform) {
    SeededRng rng(4);
    const auto a = normal_set(9, 2, rng);
    const auto b = normal_set(6, 2, rng, 0.7);
    const std::vector<double> wa(9, 1.0 / 9), wb(6, 1.0 / 6);
    EXPECT_NEAR(emd(a, b, wa, wb).score, emd(a, b).score, 1e-9);
}

TEST(Emd, DuplicatePointsAreDegenerateButExact) {
    // Many zero-cost ties: stresses the degenerate-pivot handling.
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < 8; ++i) rows.push_back({static_cast<double>(i % 2)});
    const auto a = points(rows);
    EXPECT_NEAR(emd(a, a).score, 0.0, 1e-12);
    EXPECT_NEAR(emd(a, a).score, brute_force_emd(a, a), 1e-12);
}

TEST(Emd, InvalidWeights) {
    const auto a = points({{0.0}, {1.0}});
    const std::vector<double> bad_sum{0.5, 0.6};
    const std::vector<double> negative{1.5, -0.5};
    const std::vector<double> wrong_len{1.0};
    EXPECT_ERROR_CODE(emd(a, a, bad_sum), ErrorCode::validation);
    EXPECT_ERROR_CODE(emd(a, a, negative), ErrorCode::validation);
    EXPECT_ERROR_CODE(emd(a, a, wrong_len), ErrorCode::validation);
}

TEST(Emd, PivotCapRaisesSolverFailure) {
    SeededRng rng(5);
    const auto a = normal_set(40, 3, rng);
    const auto b = normal_set(40, 3, rng, 1.0);
    EmdOptions opts;
    opts.max_pivots = 3;
    EXPECT_ERROR_CODE(emd(a, b, std::nullopt, std::nullopt, opts), ErrorCode::solver_failure);
}

// --- 1-NN two-sample test -----------------------------------------------------------------

TEST(OneNn, ExactCopyIsZero) {
    SeededRng rng(1);
    const auto a = normal_set(100, 4, rng);
    const auto r = one_nn_accuracy(a, a);
    EXPECT_EQ(r.overall, 0.0);
    EXPECT_EQ(r.real_acc, 0.0);
    EXPECT_EQ(r.fake_acc, 0.0);
}

TEST(OneNn, SeparatedClustersAreOne) {
    SeededRng rng(2);
    const auto a = normal_set(50, 3, rng, 0.0, 0.1);
    const auto b = normal_set(50, 3, rng, 100.0, 0.1);
    EXPECT_EQ(one_nn_accuracy(a, b).overall, 1.0);
}

TEST(OneNn, SameDistributionNearHalf) {
    SeededRng rng(3);
    const auto a = normal_set(2000, 32, rng);
    const auto b = normal_set(2000, 32, rng);
    const auto r = one_nn_accuracy(a, b);
    EXPECT_GE(r.overall, 0.45);
    EXPECT_LE(r.overall, 0.55);
}

TEST(OneNn, SwappingRolesSwapsClassAccuracies) {
    SeededRng rng(4);
    const auto a = normal_set(120, 5, rng);
    const auto b = normal_set(120, 5, rng, 0.4);
    const auto ab = one_nn_accuracy(a, b);
    const auto ba = one_nn_accuracy(b, a);
    EXPECT_EQ(ab.overall, ba.overall);
    EXPECT_EQ(ab.real_acc, ba.fake_acc);
    EXPECT_EQ(ab.fake_acc, ba.real_acc);
}

TEST(OneNn, ScaleInvariant) {
    SeededRng rng(5);
    const auto a = normal_set(80, 3, rng);
    const auto b = normal_set(80, 3, rng, 0.5);
    const auto scaled = [](const FeatureSet& s) {
        std::vector<double> v(s.values().begin(), s.values().end());
        for (auto& x : v) x *= 2.0;
        return FeatureSet(std::move(v), s.rows(), s.cols());
    };
    const auto r1 = one_nn_accuracy(a, b);
    const auto r2 = one_nn_accuracy(scaled(a), scaled(b));
    EXPECT_EQ(r1.overall, r2.overall);
    EXPECT_EQ(r1.real_acc, r2.real_acc);
}

TEST(OneNn, StrategiesAndThreadCountsAgree) {
    SeededRng rng(6);
    const auto a = normal_set(300, 6, rng);
    const auto b = normal_set(300, 6, rng, 0.2);
    const auto full = one_nn_accuracy(a, b, NnStrategy::full_matrix);
    set_thread_count(1);
    const auto blocked1 = one_nn_accuracy(a, b, NnStrategy::blocked);
    set_thread_count(3);
    const auto blocked3 = one_nn_accuracy(a, b, NnStrategy::blocked);
    set_thread_count(0);
    EXPECT_EQ(full.overall, blocked1.overall);
    EXPECT_EQ(full.real_acc, blocked1.real_acc);
    EXPECT_EQ(blocked1.overall, blocked3.overall);
    EXPECT_EQ(blocked1.fake_acc, blocked3.fake_acc);
}

TEST(OneNn, UnequalSizesRejected) {
    SeededRng rng(7);
    try {
        one_nn_accuracy(normal_set(10, 2, rng), normal_set(9, 2, rng));
        ADD_FAILURE() << "expected an error";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::validation);
        EXPECT_NE(std::string(e.what()).find("equal set sizes"), std::string::npos);
    }
}
