#pragma once

// Binary classification trees grown greedily on gini impurity.
//
// Conventions:
//  * candidate thresholds are midpoints between consecutive distinct values;
//  * a row goes left iff value <= threshold;
//  * among equally good splits the lowest feature index wins, then the
//    lowest threshold;
//  * a split is taken only if it strictly lowers the weighted impurity.
//
// Split quality is compared in exact integer arithmetic, so the choice of
// split never depends on floating-point rounding.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smerisk/dataset.hpp"
#include "smerisk/error.hpp"
#include "smerisk/random.hpp"

namespace smerisk {

struct ClassCounts {
    std::uint64_t count_0 = 0;
    std::uint64_t count_1 = 0;

    std::uint64_t total() const noexcept { return count_0 + count_1; }
    double prob_1() const { return static_cast<double>(count_1) / static_cast<double>(total()); }
    void add(int label) { (label == 1 ? count_1 : count_0) += 1; }

    bool operator==(const ClassCounts&) const = default;
};

inline double gini_impurity(const ClassCounts& c) {
    if (c.total() == 0) throw ParameterError("gini_impurity of an empty node");
    const double n = static_cast<double>(c.total());
    const double p0 = static_cast<double>(c.count_0) / n;
    const double p1 = static_cast<double>(c.count_1) / n;
    return 1.0 - p0 * p0 - p1 * p1;
}

struct TreeParams {
    std::optional<std::uint32_t> max_depth;           // unlimited when empty
    std::uint64_t min_samples_split = 2;
    std::optional<std::uint32_t> features_per_split;  // floor(sqrt(feature count)) when empty

    bool operator==(const TreeParams&) const = default;

    std::size_t resolved_features_per_split(std::size_t n_features) const {
        if (features_per_split) return *features_per_split;
        const auto k = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n_features))));
        return std::max<std::size_t>(1, k);
    }
};

inline void validate(const TreeParams& p, std::size_t n_features) {
    if (p.max_depth && *p.max_depth < 1) throw ParameterError("max_depth must be >= 1");
    if (p.min_samples_split < 1) throw ParameterError("min_samples_split must be >= 1");
    const std::size_t k = p.resolved_features_per_split(n_features);
    if (k < 1 || k > n_features)
        throw ParameterError("features_per_split must lie in [1, " + std::to_string(n_features) + "]");
}

// Flat node. Leaves have feature == kLeaf. Internal nodes also keep the class
// counts of the rows that reached them.
struct TreeNode {
    static constexpr std::int32_t kLeaf = -1;

    std::int32_t feature = kLeaf;
    double threshold = 0.0;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    ClassCounts counts;

    bool is_leaf() const noexcept { return feature == kLeaf; }
    bool operator==(const TreeNode&) const = default;
};

// Nodes are stored in pre-order; nodes[0] is the root.
struct DecisionTree {
    std::size_t n_features = 0;
    std::vector<TreeNode> nodes;
    // Sum over splits of (node rows / root rows) * impurity decrease, by feature.
    std::vector<double> importance;

    bool operator==(const DecisionTree&) const = default;

    const TreeNode& leaf_for(std::span<const double> x) const {
        const TreeNode* node = &nodes.front();
        while (!node->is_leaf())
            node = &nodes[x[static_cast<std::size_t>(node->feature)] <= node->threshold ? node->left : node->right];
        return *node;
    }

    std::size_t depth() const { return depth_from(0); }

private:
    std::size_t depth_from(std::uint32_t i) const {
        const TreeNode& n = nodes[i];
        return n.is_leaf() ? 0 : 1 + std::max(depth_from(n.left), depth_from(n.right));
    }
};

struct Split {
    std::size_t feature = 0;
    double threshold = 0.0;
    double weighted_child_impurity = 0.0;
};

namespace detail {

__extension__ typedef unsigned __int128 u128;

// n * (1 - weighted child gini) for a binary split, held as num / den with
// num = (l0^2 + l1^2) * nr + (r0^2 + r1^2) * nl and den = nl * nr.
// Larger is better. Exact for node sizes below ~5e7.
struct SplitScore {
    u128 num = 0;
    u128 den = 1;

    static SplitScore of(const ClassCounts& l, const ClassCounts& r) {
        const u128 nl = l.total(), nr = r.total();
        const u128 sl = u128(l.count_0) * l.count_0 + u128(l.count_1) * l.count_1;
        const u128 sr = u128(r.count_0) * r.count_0 + u128(r.count_1) * r.count_1;
        return {sl * nr + sr * nl, nl * nr};
    }

    // The unsplit node expressed on the same scale: (p0^2 + p1^2) / n.
    static SplitScore parent(const ClassCounts& c) {
        return {u128(c.count_0) * c.count_0 + u128(c.count_1) * c.count_1, c.total()};
    }

    bool better_than(const SplitScore& o) const { return num * o.den > o.num * den; }
};

// Threshold between two consecutive distinct values a < b that routes a left
// and b right.
inline double midpoint_threshold(double a, double b) {
    const double t = a + (b - a) / 2.0;
    return (t >= a && t < b) ? t : a;
}

} // namespace detail

// Best gini split of `rows` (indices into `table`, repeats allowed) over
// `candidate_features`, or nullopt if no split strictly lowers impurity.
inline std::optional<Split> best_split(const FeatureTable& table, std::span<const std::size_t> rows,
                                       std::span<const std::size_t> candidate_features) {
    if (rows.empty()) return std::nullopt;
    ClassCounts total;
    for (std::size_t i : rows) total.add(table.labels[i]);
    if (total.count_0 == 0 || total.count_1 == 0) return std::nullopt;

    std::vector<std::size_t> features(candidate_features.begin(), candidate_features.end());
    std::sort(features.begin(), features.end());

    detail::SplitScore best = detail::SplitScore::parent(total);
    std::optional<Split> result;
    std::vector<std::pair<double, int>> column(rows.size());
    for (std::size_t f : features) {
        for (std::size_t k = 0; k < rows.size(); ++k) column[k] = {table.at(rows[k], f), table.labels[rows[k]]};
        std::sort(column.begin(), column.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        ClassCounts left;
        for (std::size_t k = 0; k + 1 < column.size(); ++k) {
            left.add(column[k].second);
            if (column[k].first == column[k + 1].first) continue;
            const ClassCounts right{total.count_0 - left.count_0, total.count_1 - left.count_1};
            const auto score = detail::SplitScore::of(left, right);
            if (score.better_than(best)) {
                best = score;
                const double n = static_cast<double>(total.total());
                const double purity = static_cast<double>(score.num) / static_cast<double>(score.den);
                result = Split{f, detail::midpoint_threshold(column[k].first, column[k + 1].first),
                               (n - purity) / n};
            }
        }
    }
    return result;
}

namespace detail {

class TreeGrower {
public:
    TreeGrower(const FeatureTable& table, const TreeParams& params, Stream& sampler)
        : table_(table), params_(params), sampler_(sampler),
          k_(params.resolved_features_per_split(table.n_features)) {
        tree_.n_features = table.n_features;
        tree_.importance.assign(table.n_features, 0.0);
    }

    DecisionTree grow(std::vector<std::size_t> rows) {
        root_rows_ = static_cast<double>(rows.size());
        build(rows, 0);
        return std::move(tree_);
    }

private:
    std::vector<std::size_t> sample_features() {
        std::vector<std::size_t> all(table_.n_features);
        std::iota(all.begin(), all.end(), std::size_t{0});
        if (k_ >= all.size()) return all;
        for (std::size_t i = 0; i < k_; ++i) std::swap(all[i], all[i + sampler_.index(all.size() - i)]);
        all.resize(k_);
        std::sort(all.begin(), all.end());
        return all;
    }

    std::uint32_t build(std::span<std::size_t> rows, std::uint32_t depth) {
        const auto id = static_cast<std::uint32_t>(tree_.nodes.size());
        tree_.nodes.emplace_back();
        ClassCounts counts;
        for (std::size_t i : rows) counts.add(table_.labels[i]);
        tree_.nodes[id].counts = counts;

        const bool pure = counts.count_0 == 0 || counts.count_1 == 0;
        const bool too_small = rows.size() < params_.min_samples_split;
        const bool too_deep = params_.max_depth && depth >= *params_.max_depth;
        if (pure || too_small || too_deep) return id;

        const auto features = sample_features();
        const auto split = best_split(table_, rows, features);
        if (!split) return id;

        const auto mid = std::partition(rows.begin(), rows.end(), [&](std::size_t i) {
            return table_.at(i, split->feature) <= split->threshold;
        });
        const auto n_left = static_cast<std::size_t>(mid - rows.begin());

        const double n = static_cast<double>(rows.size());
        const double decrease = std::max(0.0, gini_impurity(counts) - split->weighted_child_impurity);
        tree_.importance[split->feature] += n / root_rows_ * decrease;

        const std::uint32_t left = build(rows.first(n_left), depth + 1);
        const std::uint32_t right = build(rows.subspan(n_left), depth + 1);
        TreeNode& node = tree_.nodes[id];
        node.feature = static_cast<std::int32_t>(split->feature);
        node.threshold = split->threshold;
        node.left = left;
        node.right = right;
        return id;
    }

    const FeatureTable& table_;
    const TreeParams& params_;
    Stream& sampler_;
    std::size_t k_;
    double root_rows_ = 0.0;
    DecisionTree tree_;
};

} // namespace detail

// Grows a tree on the given rows of `table` (indices, repeats allowed).
// The per-node feature subsets are drawn from `sampler`.
inline DecisionTree grow_tree(const FeatureTable& table, std::vector<std::size_t> rows, const TreeParams& params,
                              Stream& sampler) {
    if (rows.empty()) throw EmptyInputError("grow_tree: no rows");
    validate(params, table.n_features);
    return detail::TreeGrower(table, params, sampler).grow(std::move(rows));
}

inline DecisionTree grow_tree(const FeatureTable& table, const TreeParams& params, Stream& sampler) {
    std::vector<std::size_t> rows(table.rows());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return grow_tree(table, std::move(rows), params, sampler);
}

struct Prediction {
    int label = 0;
    double prob_1 = 0.0;

    bool operator==(const Prediction&) const = default;
};

// Leaf ties (prob_1 == 0.5) go to class 1.
inline Prediction predict_tree(const DecisionTree& tree, std::span<const double> x) {
    const double p = tree.leaf_for(x).counts.prob_1();
    return {p >= 0.5 ? 1 : 0, p};
}

inline Prediction predict_tree(const DecisionTree& tree, const SmeRecord& r) {
    const FeatureVector x = r.features();
    return predict_tree(tree, x);
}

} // namespace smerisk
