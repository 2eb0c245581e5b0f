#pragma once

// Random forest: bootstrap-sampled CART trees, soft-vote prediction and
// mean-decrease-in-impurity feature importance.
//
// Tree t draws all of its randomness from mix64(seed, t), so a forest is a
// pure function of (data, params): independent of thread count, scheduling,
// and of how many trees follow it.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include "smerisk/cart.hpp"
#include "smerisk/dataset.hpp"
#include "smerisk/error.hpp"
#include "smerisk/random.hpp"

namespace smerisk {

struct ForestParams {
    std::uint64_t n_trees = 100;
    TreeParams tree_params;
    bool bootstrap = true;
    std::uint64_t seed = 42;

    bool operator==(const ForestParams&) const = default;
};

inline void validate(const ForestParams& p, std::size_t n_features) {
    if (p.n_trees < 1) throw ParameterError("n_trees must be >= 1");
    validate(p.tree_params, n_features);
}

struct ForestModel {
    std::vector<DecisionTree> trees;
    ForestParams params;
    std::vector<std::string> feature_names;

    bool operator==(const ForestModel&) const = default;
};

inline constexpr std::uint64_t kBootstrapStream = 0;
inline constexpr std::uint64_t kFeatureSamplerStream = 1;

inline std::uint64_t tree_seed(std::uint64_t master_seed, std::uint64_t tree_index) {
    return mix64(master_seed, tree_index);
}

// n uniform draws with replacement from [0, n).
inline std::vector<std::size_t> bootstrap_indices(std::size_t n, Stream& rng) {
    if (n < 1) throw ParameterError("bootstrap_indices: n must be >= 1");
    std::vector<std::size_t> idx(n);
    for (auto& i : idx) i = static_cast<std::size_t>(rng.index(n));
    return idx;
}

inline DecisionTree train_forest_tree(const FeatureTable& table, const ForestParams& params, std::uint64_t t) {
    const std::uint64_t s = tree_seed(params.seed, t);
    std::vector<std::size_t> rows;
    if (params.bootstrap) {
        Stream boot(s, kBootstrapStream);
        rows = bootstrap_indices(table.rows(), boot);
    } else {
        rows.resize(table.rows());
        std::iota(rows.begin(), rows.end(), std::size_t{0});
    }
    Stream sampler(s, kFeatureSamplerStream);
    return grow_tree(table, std::move(rows), params.tree_params, sampler);
}

// threads == 0 uses the hardware concurrency.
inline ForestModel train_forest(const FeatureTable& table, const ForestParams& params,
                                std::vector<std::string> feature_names, unsigned threads = 1) {
    validate(params, table.n_features);
    detail::require_both_classes(table.labels, "train_forest");
    if (feature_names.size() != table.n_features)
        throw ParameterError("train_forest: one feature name per column required");

    ForestModel model;
    model.params = params;
    model.feature_names = std::move(feature_names);
    model.trees.resize(params.n_trees);

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, params.n_trees));
    if (threads <= 1) {
        for (std::uint64_t t = 0; t < params.n_trees; ++t) model.trees[t] = train_forest_tree(table, params, t);
        return model;
    }
    std::atomic<std::uint64_t> next{0};
    {
        std::vector<std::jthread> workers;
        for (unsigned w = 0; w < threads; ++w)
            workers.emplace_back([&] {
                for (std::uint64_t t = next++; t < params.n_trees; t = next++)
                    model.trees[t] = train_forest_tree(table, params, t);
            });
    }
    return model;
}

inline ForestModel train_forest(const Dataset& train, const ForestParams& params = {}, unsigned threads = 1) {
    if (!train.labeled()) throw ParameterError("train_forest requires a labeled dataset");
    return train_forest(to_table(train), params, {kFeatureNames.begin(), kFeatureNames.end()}, threads);
}

// Mean of the per-tree leaf fractions; label 1 iff the mean is >= 0.5.
inline Prediction predict_forest(const ForestModel& m, std::span<const double> x) {
    double sum = 0.0;
    for (const auto& tree : m.trees) sum += tree.leaf_for(x).counts.prob_1();
    const double p = sum / static_cast<double>(m.trees.size());
    return {p >= 0.5 ? 1 : 0, p};
}

inline Prediction predict_forest(const ForestModel& m, const SmeRecord& r) {
    const FeatureVector x = r.features();
    return predict_forest(m, x);
}

inline std::vector<int> predict_labels(const ForestModel& m, const Dataset& d) {
    std::vector<int> out;
    out.reserve(d.size());
    for (const auto& r : d.records()) out.push_back(predict_forest(m, r).label);
    return out;
}

struct FeatureImportances {
    std::vector<double> values;
    bool degenerate = false;  // every tree is a single leaf; values are all zero

    bool operator==(const FeatureImportances&) const = default;
};

// Mean over trees of the impurity-decrease totals, normalized to sum to 1.
inline FeatureImportances feature_importances(const ForestModel& m) {
    const std::size_t d = m.feature_names.size();
    FeatureImportances out;
    out.values.assign(d, 0.0);
    for (const auto& tree : m.trees)
        for (std::size_t j = 0; j < d; ++j) out.values[j] += tree.importance[j];
    const double total = std::accumulate(out.values.begin(), out.values.end(), 0.0);
    if (!(total > 0.0)) {
        std::fill(out.values.begin(), out.values.end(), 0.0);
        out.degenerate = true;
        return out;
    }
    // Dividing by the tree count and then by the total is the same as
    // dividing by the total once.
    for (double& v : out.values) v /= total;
    return out;
}

} // namespace smerisk
