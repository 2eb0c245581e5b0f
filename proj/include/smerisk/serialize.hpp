#pragma once

// JSON encoding of configurations and trained models.
//
// Configuration decoders are lenient about absent keys (they take defaults)
// and strict about unknown keys. Model documents carry format_version and
// model_type and are rejected when either is unsupported.

#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "smerisk/cart.hpp"
#include "smerisk/dataset.hpp"
#include "smerisk/error.hpp"
#include "smerisk/forest.hpp"
#include "smerisk/logit.hpp"
#include "smerisk/metrics.hpp"
#include "smerisk/synthgen.hpp"

namespace smerisk {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kModelFormatVersion = "1";

namespace detail {

inline void reject_unknown_keys(const Json& j, std::initializer_list<std::string_view> known, const char* what) {
    if (!j.is_object()) throw ParameterError(std::string(what) + " must be a JSON object");
    for (const auto& item : j.items()) {
        bool ok = false;
        for (auto k : known) ok = ok || item.key() == k;
        if (!ok) throw ParameterError(std::string(what) + ": unknown key '" + item.key() + "'");
    }
}

template <class T>
void read_opt(const Json& j, const char* key, T& out, const char* what) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ParameterError(std::string(what) + "." + key + ": " + e.what());
    }
}

inline std::string_view range_key(std::size_t j) {
    static constexpr std::array<std::string_view, kNumericFeatureCount> keys = {
        "revenue_growth", "cash_flow_variability", "debt_equity_ratio", "profit_margin",
        "commodity_price_dependency"};
    return keys[j];
}

} // namespace detail

// ---------------------------------------------------------------------------
// Configurations

inline Json to_json(const GeneratorConfig& c) {
    Json ranges = Json::object();
    for (std::size_t j = 0; j < kNumericFeatureCount; ++j)
        ranges[std::string(detail::range_key(j))] = {c.ranges[j].low, c.ranges[j].high};
    const auto& k = c.coefficients;
    return Json{{"n_samples", c.n_samples},
                {"seed", c.seed},
                {"base_default_rate", c.base_default_rate},
                {"signal_strength", c.signal_strength},
                {"ranges", ranges},
                {"coefficients",
                 {{"debt_equity", k.debt_equity},
                  {"cash_flow_variability", k.cash_flow_variability},
                  {"revenue_growth", k.revenue_growth},
                  {"profit_margin", k.profit_margin},
                  {"commodity_sector", k.commodity_sector},
                  {"leverage_step", k.leverage_step}}}};
}

inline GeneratorConfig generator_config_from_json(const Json& j) {
    const char* what = "generator";
    detail::reject_unknown_keys(
        j, {"n_samples", "seed", "base_default_rate", "signal_strength", "ranges", "coefficients"}, what);
    GeneratorConfig c;
    detail::read_opt(j, "n_samples", c.n_samples, what);
    detail::read_opt(j, "seed", c.seed, what);
    detail::read_opt(j, "base_default_rate", c.base_default_rate, what);
    detail::read_opt(j, "signal_strength", c.signal_strength, what);
    if (j.contains("ranges")) {
        const Json& r = j.at("ranges");
        detail::reject_unknown_keys(r,
                                    {"revenue_growth", "cash_flow_variability", "debt_equity_ratio",
                                     "profit_margin", "commodity_price_dependency"},
                                    "generator.ranges");
        for (std::size_t f = 0; f < kNumericFeatureCount; ++f) {
            const std::string key(detail::range_key(f));
            if (!r.contains(key)) continue;
            const Json& pair = r.at(key);
            if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number())
                throw ParameterError("generator.ranges." + key + " must be [low, high]");
            c.ranges[f] = {pair[0].get<double>(), pair[1].get<double>()};
        }
    }
    if (j.contains("coefficients")) {
        const Json& k = j.at("coefficients");
        const char* cw = "generator.coefficients";
        detail::reject_unknown_keys(k,
                                    {"debt_equity", "cash_flow_variability", "revenue_growth", "profit_margin",
                                     "commodity_sector", "leverage_step"},
                                    cw);
        auto& co = c.coefficients;
        detail::read_opt(k, "debt_equity", co.debt_equity, cw);
        detail::read_opt(k, "cash_flow_variability", co.cash_flow_variability, cw);
        detail::read_opt(k, "revenue_growth", co.revenue_growth, cw);
        detail::read_opt(k, "profit_margin", co.profit_margin, cw);
        detail::read_opt(k, "commodity_sector", co.commodity_sector, cw);
        detail::read_opt(k, "leverage_step", co.leverage_step, cw);
    }
    validate(c);
    return c;
}

inline Json to_json(const LogitHyperparams& h) {
    return Json{{"learning_rate", h.learning_rate},
                {"l2_lambda", h.l2_lambda},
                {"max_iterations", h.max_iterations},
                {"tolerance", h.tolerance}};
}

inline LogitHyperparams logit_hyper_from_json(const Json& j) {
    const char* what = "logit_hyper";
    detail::reject_unknown_keys(j, {"learning_rate", "l2_lambda", "max_iterations", "tolerance"}, what);
    LogitHyperparams h;
    detail::read_opt(j, "learning_rate", h.learning_rate, what);
    detail::read_opt(j, "l2_lambda", h.l2_lambda, what);
    detail::read_opt(j, "max_iterations", h.max_iterations, what);
    detail::read_opt(j, "tolerance", h.tolerance, what);
    validate(h);
    return h;
}

inline Json to_json(const TreeParams& p) {
    Json j;
    j["max_depth"] = p.max_depth ? Json(*p.max_depth) : Json(nullptr);
    j["min_samples_split"] = p.min_samples_split;
    j["features_per_split"] = p.features_per_split ? Json(*p.features_per_split) : Json(nullptr);
    return j;
}

inline TreeParams tree_params_from_json(const Json& j) {
    const char* what = "tree_params";
    detail::reject_unknown_keys(j, {"max_depth", "min_samples_split", "features_per_split"}, what);
    TreeParams p;
    auto read_optional = [&](const char* key, std::optional<std::uint32_t>& out) {
        if (!j.contains(key) || j.at(key).is_null()) return;
        std::uint32_t v = 0;
        detail::read_opt(j, key, v, what);
        out = v;
    };
    read_optional("max_depth", p.max_depth);
    detail::read_opt(j, "min_samples_split", p.min_samples_split, what);
    read_optional("features_per_split", p.features_per_split);
    return p;
}

inline Json to_json(const ForestParams& p) {
    return Json{{"n_trees", p.n_trees},
                {"tree_params", to_json(p.tree_params)},
                {"bootstrap", p.bootstrap},
                {"seed", p.seed}};
}

inline ForestParams forest_params_from_json(const Json& j) {
    const char* what = "forest_params";
    detail::reject_unknown_keys(j, {"n_trees", "tree_params", "bootstrap", "seed"}, what);
    ForestParams p;
    detail::read_opt(j, "n_trees", p.n_trees, what);
    if (j.contains("tree_params")) p.tree_params = tree_params_from_json(j.at("tree_params"));
    detail::read_opt(j, "bootstrap", p.bootstrap, what);
    detail::read_opt(j, "seed", p.seed, what);
    validate(p, kFeatureCount);
    return p;
}

inline Json to_json(const MetricsReport& m) {
    return Json{{"accuracy", m.accuracy},
                {"precision", m.precision},
                {"recall", m.recall},
                {"f1", m.f1},
                {"precision_undefined", m.precision_undefined},
                {"recall_undefined", m.recall_undefined},
                {"f1_undefined", m.f1_undefined}};
}

inline MetricsReport metrics_from_json(const Json& j) {
    MetricsReport m;
    m.accuracy = j.at("accuracy").get<double>();
    m.precision = j.at("precision").get<double>();
    m.recall = j.at("recall").get<double>();
    m.f1 = j.at("f1").get<double>();
    m.precision_undefined = j.at("precision_undefined").get<bool>();
    m.recall_undefined = j.at("recall_undefined").get<bool>();
    m.f1_undefined = j.at("f1_undefined").get<bool>();
    return m;
}

inline Json to_json(const ConfusionMatrix& cm) {
    return Json{{"tp", cm.tp}, {"fp", cm.fp}, {"tn", cm.tn}, {"fn", cm.fn}};
}

inline ConfusionMatrix confusion_from_json(const Json& j) {
    return {j.at("tp").get<std::uint64_t>(), j.at("fp").get<std::uint64_t>(), j.at("tn").get<std::uint64_t>(),
            j.at("fn").get<std::uint64_t>()};
}

// ---------------------------------------------------------------------------
// Models

using Model = std::variant<LogisticModel, ForestModel>;

namespace detail {

inline Json feature_name_list() { return Json(std::vector<std::string>(kFeatureNames.begin(), kFeatureNames.end())); }

inline Json node_to_json(const DecisionTree& tree, std::uint32_t i) {
    const TreeNode& n = tree.nodes[i];
    if (n.is_leaf()) return Json{{"count_0", n.counts.count_0}, {"count_1", n.counts.count_1}};
    return Json{{"feature", n.feature},
                {"threshold", n.threshold},
                {"left", node_to_json(tree, n.left)},
                {"right", node_to_json(tree, n.right)}};
}

// Appends the subtree in pre-order and returns its index. Internal node
// counts are the sums of their children's.
inline std::uint32_t node_from_json(const Json& j, DecisionTree& tree) {
    const auto id = static_cast<std::uint32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    if (j.contains("count_0")) {
        ClassCounts c{j.at("count_0").get<std::uint64_t>(), j.at("count_1").get<std::uint64_t>()};
        if (c.total() == 0) throw ParseError("tree leaf with no samples");
        tree.nodes[id].counts = c;
        return id;
    }
    const auto feature = j.at("feature").get<std::int32_t>();
    if (feature < 0 || static_cast<std::size_t>(feature) >= tree.n_features)
        throw ParseError("tree node feature index out of range");
    const double threshold = j.at("threshold").get<double>();
    const std::uint32_t left = node_from_json(j.at("left"), tree);
    const std::uint32_t right = node_from_json(j.at("right"), tree);
    TreeNode& n = tree.nodes[id];
    n.feature = feature;
    n.threshold = threshold;
    n.left = left;
    n.right = right;
    n.counts = {tree.nodes[left].counts.count_0 + tree.nodes[right].counts.count_0,
                tree.nodes[left].counts.count_1 + tree.nodes[right].counts.count_1};
    return id;
}

inline void check_header(const Json& j, std::string_view expected_type) {
    if (!j.is_object() || !j.contains("format_version") || !j.contains("model_type"))
        throw ParseError("model document lacks format_version or model_type");
    const Json& v = j.at("format_version");
    const bool ok = (v.is_string() && v.get<std::string>() == kModelFormatVersion) ||
                    (v.is_number_integer() && v.get<long long>() == 1);
    if (!ok) throw FormatVersionError("unsupported model format_version " + v.dump());
    if (!expected_type.empty() && j.at("model_type") != expected_type)
        throw FormatVersionError("expected model_type '" + std::string(expected_type) + "', found " +
                                 j.at("model_type").dump());
}

} // namespace detail

inline Json to_json(const StandardizationParams& p) {
    return Json{{"mean", p.mean}, {"sd", p.sd}, {"constant", p.constant}};
}

inline StandardizationParams standardization_from_json(const Json& j) {
    StandardizationParams p;
    p.mean = j.at("mean").get<decltype(p.mean)>();
    p.sd = j.at("sd").get<decltype(p.sd)>();
    p.constant = j.at("constant").get<decltype(p.constant)>();
    return p;
}

inline Json to_json(const LogisticModel& m) {
    return Json{{"format_version", kModelFormatVersion},
                {"model_type", "logistic"},
                {"feature_names", detail::feature_name_list()},
                {"weights", m.weights},
                {"bias", m.bias},
                {"standardization", to_json(m.standardization)},
                {"training_meta",
                 {{"iterations", m.training_meta.iterations}, {"final_loss", m.training_meta.final_loss}}}};
}

inline Json to_json(const ForestModel& m) {
    Json trees = Json::array();
    Json per_tree = Json::array();
    for (const auto& t : m.trees) {
        trees.push_back(detail::node_to_json(t, 0));
        per_tree.push_back(t.importance);
    }
    const auto imp = feature_importances(m);
    return Json{{"format_version", kModelFormatVersion},
                {"model_type", "random_forest"},
                {"params", to_json(m.params)},
                {"feature_names", m.feature_names},
                {"trees", std::move(trees)},
                {"tree_importances", std::move(per_tree)},
                {"importances", imp.values},
                {"importances_degenerate", imp.degenerate}};
}

inline Json to_json(const Model& m) {
    return std::visit([](const auto& v) { return to_json(v); }, m);
}

inline Model model_from_json(const Json& j) {
    detail::check_header(j, "");
    const Json& type = j.at("model_type");
    try {
        if (type == "logistic") {
            LogisticModel m;
            m.weights = j.at("weights").get<decltype(m.weights)>();
            m.bias = j.at("bias").get<double>();
            m.standardization = standardization_from_json(j.at("standardization"));
            m.training_meta.iterations = j.at("training_meta").at("iterations").get<std::uint64_t>();
            m.training_meta.final_loss = j.at("training_meta").at("final_loss").get<double>();
            return m;
        }
        if (type == "random_forest") {
            ForestModel m;
            m.params = forest_params_from_json(j.at("params"));
            m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
            const Json& trees = j.at("trees");
            const Json& per_tree = j.at("tree_importances");
            if (!trees.is_array() || trees.size() != m.params.n_trees || per_tree.size() != trees.size())
                throw ParseError("forest document tree count does not match params.n_trees");
            for (std::size_t t = 0; t < trees.size(); ++t) {
                DecisionTree tree;
                tree.n_features = m.feature_names.size();
                detail::node_from_json(trees[t], tree);
                tree.importance = per_tree[t].get<std::vector<double>>();
                if (tree.importance.size() != tree.n_features)
                    throw ParseError("tree importance vector has the wrong length");
                m.trees.push_back(std::move(tree));
            }
            return m;
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed model document: ") + e.what());
    }
    throw FormatVersionError("unsupported model_type " + type.dump());
}

inline void save_model(const Model& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << to_json(m).dump(2) << '\n';
    out.flush();
    if (!out) throw IoError("write to '" + path + "' failed");
}

inline Json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("'" + path + "' is not valid JSON: " + e.what());
    }
}

inline Model load_model(const std::string& path) { return model_from_json(read_json_file(path)); }

} // namespace smerisk
