#include <gtest/gtest.h>

#include "smerisk/metrics.hpp"
#include "smerisk/random.hpp"

namespace smerisk {
namespace {

TEST(ConfusionMatrix, Examples) {
    const std::vector<int> t{1, 1, 0, 0}, p{1, 0, 0, 1};
    EXPECT_EQ(confusion_matrix(t, p), (ConfusionMatrix{1, 1, 1, 1}));
    const auto same = confusion_matrix(t, t);
    EXPECT_EQ(same.fp, 0u);
    EXPECT_EQ(same.fn, 0u);
    const std::vector<int> inv{0, 0, 1, 1};
    const auto flipped = confusion_matrix(t, inv);
    EXPECT_EQ(flipped.tp, 0u);
    EXPECT_EQ(flipped.tn, 0u);
}

TEST(ConfusionMatrix, Errors) {
    EXPECT_THROW(confusion_matrix(std::vector<int>{1}, std::vector<int>{1, 0}), ParameterError);
    EXPECT_THROW(confusion_matrix(std::vector<int>{}, std::vector<int>{}), ParameterError);
    EXPECT_THROW(confusion_matrix(std::vector<int>{2}, std::vector<int>{1}), ParameterError);
}

TEST(ComputeMetrics, BalancedMatrix) {
    const auto m = compute_metrics({1, 1, 1, 1});
    EXPECT_EQ(m.accuracy, 0.5);
    EXPECT_EQ(m.precision, 0.5);
    EXPECT_EQ(m.recall, 0.5);
    EXPECT_EQ(m.f1, 0.5);
}

TEST(ComputeMetrics, NoPositivePredictions) {
    const auto m = compute_metrics({0, 0, 10, 2});
    EXPECT_EQ(m.precision, 0.0);
    EXPECT_TRUE(m.precision_undefined);
    EXPECT_EQ(m.recall, 0.0);
    EXPECT_FALSE(m.recall_undefined);
    EXPECT_EQ(m.f1, 0.0);
    EXPECT_TRUE(m.f1_undefined);
    EXPECT_EQ(m.accuracy, 10.0 / 12.0);
}

TEST(ComputeMetrics, NoPositiveLabels) {
    const auto m = compute_metrics({0, 3, 7, 0});
    EXPECT_TRUE(m.recall_undefined);
    EXPECT_FALSE(m.precision_undefined);
    EXPECT_EQ(m.precision, 0.0);
    EXPECT_TRUE(m.f1_undefined);
}

TEST(ComputeMetrics, EmptyMatrixRejected) { EXPECT_THROW(compute_metrics({}), ParameterError); }

TEST(ComputeMetrics, PropertiesOnRandomMatrices) {
    Stream rng(42);
    for (int trial = 0; trial < 2000; ++trial) {
        ConfusionMatrix cm{rng.index(50), rng.index(50), rng.index(50), rng.index(50)};
        if (cm.total() == 0) continue;
        const auto m = compute_metrics(cm);
        for (double v : {m.accuracy, m.precision, m.recall, m.f1}) {
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 1.0);
        }
        EXPECT_EQ(m.accuracy, static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total()));
        if (!m.f1_undefined && !m.precision_undefined && !m.recall_undefined) {
            EXPECT_NEAR(m.f1, 2 * m.precision * m.recall / (m.precision + m.recall), 1e-12);
        }
    }
}

TEST(ConfusionMatrix, SwappingPositiveClassSwapsCells) {
    Stream rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<int> t(30), p(30), tf(30), pf(30);
        for (std::size_t i = 0; i < t.size(); ++i) {
            t[i] = rng.bernoulli(0.4);
            p[i] = rng.bernoulli(0.5);
            tf[i] = 1 - t[i];
            pf[i] = 1 - p[i];
        }
        const auto a = confusion_matrix(t, p), b = confusion_matrix(tf, pf);
        EXPECT_EQ(a.tp, b.tn);
        EXPECT_EQ(a.tn, b.tp);
        EXPECT_EQ(a.fp, b.fn);
        EXPECT_EQ(a.fn, b.fp);
    }
}

} // namespace
} // namespace smerisk
