#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "smerisk/forest.hpp"
#include "smerisk/serialize.hpp"
#include "smerisk/synthgen.hpp"
#include "test_util.hpp"

namespace smerisk {
namespace {

TEST(Bootstrap, SingleRow) {
    Stream rng(1);
    EXPECT_EQ(bootstrap_indices(1, rng), std::vector<std::size_t>{0});
}

TEST(Bootstrap, RangeAndLength) {
    Stream rng(2);
    for (std::size_t n : {2u, 7u, 100u, 1234u}) {
        const auto idx = bootstrap_indices(n, rng);
        EXPECT_EQ(idx.size(), n);
        for (auto i : idx) EXPECT_LT(i, n);
    }
    EXPECT_THROW(bootstrap_indices(0, rng), ParameterError);
}

TEST(Bootstrap, UniqueFractionFollowsOneMinusInverseE) {
    Stream rng(3);
    double sum = 0;
    for (int draw = 0; draw < 1000; ++draw) {
        const auto idx = bootstrap_indices(1000, rng);
        sum += static_cast<double>(std::set<std::size_t>(idx.begin(), idx.end()).size()) / 1000.0;
    }
    EXPECT_NEAR(sum / 1000.0, 1.0 - std::exp(-1.0), 0.02);
}

Dataset default_data() { return generate(GeneratorConfig{}); }

TEST(TrainForest, DefaultParamsGiveHundredTrees) {
    const auto m = train_forest(default_data());
    EXPECT_EQ(m.trees.size(), 100u);
    EXPECT_EQ(m.feature_names.size(), kFeatureCount);
}

TEST(TrainForest, EnsembleOfOneEqualsBareTree) {
    const auto d = default_data();
    ForestParams p;
    p.n_trees = 1;
    p.bootstrap = false;
    p.tree_params.features_per_split = kFeatureCount;
    const auto forest = train_forest(d, p);
    Stream sampler(tree_seed(p.seed, 0), kFeatureSamplerStream);
    const auto tree = grow_tree(to_table(d), p.tree_params, sampler);
    EXPECT_EQ(forest.trees[0], tree);
    Stream rng(5);
    for (int i = 0; i < 500; ++i) {
        const auto r = testing::random_record(rng, false);
        EXPECT_EQ(predict_forest(forest, r), predict_tree(tree, r));
    }
}

TEST(TrainForest, IndependentOfThreadCount) {
    const auto d = default_data();
    ForestParams p;
    p.n_trees = 24;
    const auto serial = to_json(train_forest(d, p, 1)).dump();
    EXPECT_EQ(to_json(train_forest(d, p, 4)).dump(), serial);
    EXPECT_EQ(to_json(train_forest(d, p, 7)).dump(), serial);
}

TEST(TrainForest, PrefixStable) {
    const auto d = default_data();
    ForestParams small, large;
    small.n_trees = 5;
    large.n_trees = 12;
    const auto a = train_forest(d, small);
    const auto b = train_forest(d, large);
    for (std::size_t t = 0; t < a.trees.size(); ++t) EXPECT_EQ(a.trees[t], b.trees[t]);
}

TEST(TrainForest, Errors) {
    std::vector<SmeRecord> rs(4);
    for (auto& r : rs) r.default_status = 0;
    EXPECT_THROW(train_forest(Dataset(rs)), DegenerateLabelsError);
    ForestParams p;
    p.n_trees = 0;
    EXPECT_THROW(train_forest(default_data(), p), ParameterError);
}

DecisionTree leaf(std::uint64_t c0, std::uint64_t c1) {
    DecisionTree t;
    t.n_features = kFeatureCount;
    t.nodes.push_back({});
    t.nodes[0].counts = {c0, c1};
    t.importance.assign(kFeatureCount, 0.0);
    return t;
}

ForestModel forest_of(std::vector<DecisionTree> trees) {
    ForestModel m;
    m.params.n_trees = trees.size();
    m.trees = std::move(trees);
    m.feature_names.assign(kFeatureNames.begin(), kFeatureNames.end());
    return m;
}

TEST(PredictForest, SoftVote) {
    const SmeRecord r;
    EXPECT_EQ(predict_forest(forest_of({leaf(0, 1), leaf(0, 1)}), r), (Prediction{1, 1.0}));
    EXPECT_EQ(predict_forest(forest_of({leaf(4, 1), leaf(1, 4)}), r), (Prediction{1, 0.5}));
}

TEST(PredictForest, MeanOfLeafFractions) {
    const auto m = train_forest(default_data());
    Stream rng(6);
    for (int i = 0; i < 200; ++i) {
        const auto r = testing::random_record(rng, false);
        const auto x = r.features();
        double sum = 0;
        for (const auto& t : m.trees) sum += predict_tree(t, x).prob_1;
        const auto p = predict_forest(m, r);
        EXPECT_NEAR(p.prob_1, sum / static_cast<double>(m.trees.size()), 1e-12);
        EXPECT_GE(p.prob_1, 0.0);
        EXPECT_LE(p.prob_1, 1.0);
    }
}

TEST(Importances, NormalizedAndNonNegative) {
    const auto imp = feature_importances(train_forest(default_data()));
    EXPECT_FALSE(imp.degenerate);
    double sum = 0;
    for (double v : imp.values) {
        EXPECT_GE(v, 0.0);
        sum += v;
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
}

TEST(Importances, SingleSignalFeatureRanksFirst) {
    GeneratorConfig c;
    c.coefficients = {1.2, 0.0, 0.0, 0.0, 0.0, 0.0};
    c.signal_strength = 3.0;
    const auto imp = feature_importances(train_forest(generate(c)));
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        if (j != debt_equity_ratio) {
            EXPECT_GT(imp.values[debt_equity_ratio], imp.values[j]);
        }
    }
}

TEST(Importances, PureLeafForestIsDegenerate) {
    const auto imp = feature_importances(forest_of({leaf(3, 0), leaf(0, 2)}));
    EXPECT_TRUE(imp.degenerate);
    for (double v : imp.values) EXPECT_EQ(v, 0.0);
}

} // namespace
} // namespace smerisk
