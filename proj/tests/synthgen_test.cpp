#include <cmath>

#include <gtest/gtest.h>

#include "smerisk/forest.hpp"
#include "smerisk/metrics.hpp"
#include "smerisk/numeric.hpp"
#include "smerisk/synthgen.hpp"

namespace smerisk {
namespace {

TEST(Generate, DefaultConfigMatchesReferenceShape) {
    const auto d = generate(GeneratorConfig{});
    ASSERT_EQ(d.size(), 1000u);
    EXPECT_TRUE(d.labeled());
    EXPECT_GE(d.default_rate(), 0.15);
    EXPECT_LE(d.default_rate(), 0.25);
}

TEST(Generate, Deterministic) {
    GeneratorConfig c;
    c.seed = 7;
    EXPECT_EQ(generate(c), generate(c));
    GeneratorConfig other = c;
    other.seed = 8;
    EXPECT_NE(generate(c), generate(other));
}

TEST(Generate, ValuesInsideHalfOpenRanges) {
    GeneratorConfig c;
    c.n_samples = 5000;
    const auto d = generate(c);
    for (const auto& r : d.records()) {
        const auto x = r.features();
        for (std::size_t j = 0; j < kNumericFeatureCount; ++j) {
            EXPECT_GE(x[j], c.ranges[j].low);
            EXPECT_LT(x[j], c.ranges[j].high);
        }
        EXPECT_TRUE(r.industry_sector == 0 || r.industry_sector == 1);
    }
}

TEST(Generate, ConstantRangeAllowed) {
    GeneratorConfig c;
    c.ranges[profit_margin] = {0.1, 0.1};
    for (const auto& r : generate(c).records()) EXPECT_EQ(r.profit_margin, 0.1);
}

TEST(Generate, ColumnsUseIndependentStreams) {
    // Changing one column's range leaves every other column untouched.
    GeneratorConfig a, b;
    b.ranges[debt_equity_ratio] = {0.0, 10.0};
    const auto da = generate(a), db = generate(b);
    for (std::size_t i = 0; i < da.size(); ++i) {
        EXPECT_EQ(da[i].revenue_growth, db[i].revenue_growth);
        EXPECT_EQ(da[i].profit_margin, db[i].profit_margin);
        EXPECT_EQ(da[i].industry_sector, db[i].industry_sector);
    }
}

TEST(Generate, InvalidConfigRejected) {
    GeneratorConfig c;
    c.n_samples = 0;
    EXPECT_THROW(generate(c), ParameterError);
    c = {};
    c.base_default_rate = 1.0;
    EXPECT_THROW(generate(c), ParameterError);
    c = {};
    c.signal_strength = -1;
    EXPECT_THROW(generate(c), ParameterError);
    c = {};
    c.ranges[0] = {0.3, 0.1};
    EXPECT_THROW(generate(c), ParameterError);
    c = {};
    c.ranges[commodity_price_dependency] = {0.5, 1.5};  // correlations are bounded
    EXPECT_THROW(generate(c), ParameterError);
}

TEST(LatentProbability, ZeroSignalIsBaseRateExactly) {
    GeneratorConfig c;
    c.signal_strength = 0.0;
    const DefaultModel m(c);
    for (const auto& r : generate(c).records()) EXPECT_EQ(latent_default_probability(r, m), 0.2);
}

TEST(LatentProbability, MonotoneInLeverage) {
    const DefaultModel m(GeneratorConfig{});
    SmeRecord lo, hi;
    lo.debt_equity_ratio = 0.5;
    hi.debt_equity_ratio = 2.5;
    EXPECT_GT(m.probability(hi), m.probability(lo));
}

TEST(LatentProbability, FormulaEvaluation) {
    const DefaultModel m(GeneratorConfig{});
    // Every centered term vanishes; only the sector interaction 0.6 * 0.8 * 1 remains.
    const SmeRecord r{0.0, 0.3, 1.6, 0.15, 0.8, 1, std::nullopt};
    EXPECT_NEAR(m.probability(r), 1.0 / (1.0 + std::exp(-(m.intercept() + 0.48))), 1e-15);
    // Step term active: (2.5 - 1.6)/1.4 * 1.2 + 1.0.
    const SmeRecord s{0.0, 0.3, 2.5, 0.15, 0.8, 0, std::nullopt};
    EXPECT_NEAR(m.probability(s), 1.0 / (1.0 + std::exp(-(m.intercept() + 1.2 * 0.9 / 1.4 + 1.0))), 1e-15);
}

TEST(LatentProbability, CalibratedToBaseRate) {
    for (double strength : {0.5, 1.0, 3.0}) {
        GeneratorConfig c;
        c.signal_strength = strength;
        const DefaultModel m(c);
        EXPECT_NEAR(m.calibrated_rate(), 0.2, 0.01);
        // Independent Monte Carlo over a different sample.
        c.n_samples = 200000;
        c.seed = 12345;
        double sum = 0;
        const auto d = generate(c);
        for (const auto& r : d.records()) sum += m.probability(r);
        EXPECT_NEAR(sum / static_cast<double>(d.size()), 0.2, 0.01) << "strength " << strength;
    }
}

TEST(Generate, MarginalRateConverges) {
    GeneratorConfig c;
    c.n_samples = 10000;
    const auto d = generate(c);
    const double se = std::sqrt(0.2 * 0.8 / 10000.0);
    EXPECT_NEAR(d.default_rate(), 0.2, 3 * se + 0.01);  // calibration tolerance plus sampling error
}

TEST(Generate, NullSignalForestStaysAtMajorityRate) {
    double gap = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        GeneratorConfig c;
        c.signal_strength = 0.0;
        c.seed = seed;
        const auto d = generate(c);
        const auto [train, test] = split_train_test(d, 0.3, seed);
        ForestParams p;
        p.n_trees = 50;
        const auto m = train_forest(train, p);
        const auto y = test.labels();
        const double acc = evaluate(y, predict_labels(m, test)).accuracy;
        const double ones = static_cast<double>(std::count(y.begin(), y.end(), 1)) / static_cast<double>(y.size());
        gap += acc - std::max(ones, 1.0 - ones);
    }
    EXPECT_LE(std::abs(gap / 10.0), 0.05);
}

} // namespace
} // namespace smerisk
