#pragma once

// End-to-end comparison of the logistic baseline and the random forest on a
// single shared train/test split, and the Table-1-style report.

#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "smerisk/dataset.hpp"
#include "smerisk/error.hpp"
#include "smerisk/forest.hpp"
#include "smerisk/logit.hpp"
#include "smerisk/metrics.hpp"
#include "smerisk/serialize.hpp"
#include "smerisk/synthgen.hpp"

namespace smerisk {

struct CsvSource {
    std::string path;
    bool operator==(const CsvSource&) const = default;
};

using DataSource = std::variant<GeneratorConfig, CsvSource>;

struct ExperimentConfig {
    DataSource data_source = GeneratorConfig{};
    double test_fraction = 0.3;
    std::uint64_t split_seed = 42;
    LogitHyperparams logit_hyper;
    ForestParams forest_params;

    bool operator==(const ExperimentConfig&) const = default;
};

struct DatasetSummary {
    std::uint64_t n = 0;
    std::uint64_t n_train = 0;
    std::uint64_t n_test = 0;
    double default_rate = 0.0;
    std::string source;

    bool operator==(const DatasetSummary&) const = default;
};

struct NamedImportance {
    std::string feature;
    double importance = 0.0;

    bool operator==(const NamedImportance&) const = default;
};

struct ComparisonReport {
    MetricsReport delphi_metrics;
    MetricsReport forest_metrics;
    ConfusionMatrix delphi_confusion;
    ConfusionMatrix forest_confusion;
    std::vector<NamedImportance> feature_importances;  // empty when degenerate
    bool importances_degenerate = false;
    DatasetSummary dataset_summary;
    ExperimentConfig config_echo;

    bool operator==(const ComparisonReport&) const = default;
};

// Observes the row indices (into the full dataset) each model was trained
// and scored on.
using SplitProbe = std::function<void(std::string_view model, std::span<const std::size_t> train_rows,
                                      std::span<const std::size_t> test_rows)>;

struct RunOptions {
    unsigned threads = 1;  // forest training threads; 0 = hardware concurrency
    SplitProbe probe;
};

inline std::string describe(const DataSource& source) {
    if (const auto* g = std::get_if<GeneratorConfig>(&source)) {
        std::ostringstream s;
        s << "generator(n=" << g->n_samples << ", seed=" << g->seed
          << ", base_rate=" << detail::format_double(g->base_default_rate)
          << ", signal=" << detail::format_double(g->signal_strength) << ")";
        return s.str();
    }
    return "csv:" + std::get<CsvSource>(source).path;
}

inline Dataset load_source(const DataSource& source) {
    if (const auto* g = std::get_if<GeneratorConfig>(&source)) return generate(*g);
    return load_csv(std::get<CsvSource>(source).path);
}

inline ComparisonReport run_comparison(const ExperimentConfig& config, const RunOptions& options = {}) {
    validate(config.logit_hyper);
    validate(config.forest_params, kFeatureCount);
    const Dataset data = load_source(config.data_source);
    if (!data.labeled()) throw ParameterError("comparison requires a labeled dataset");

    const SplitIndices split = split_indices(data.size(), config.test_fraction, config.split_seed);
    const Dataset train = data.subset(split.train);
    const Dataset test = data.subset(split.test);
    const auto y_train = train.labels();
    try {
        detail::require_both_classes(y_train, "run_comparison");
    } catch (const DegenerateLabelsError&) {
        throw DegenerateLabelsError("training split for split_seed " + std::to_string(config.split_seed) +
                                    " contains a single class");
    }
    const auto y_test = test.labels();

    if (options.probe) options.probe("logistic", split.train, split.test);
    const LogisticModel logistic = train_logistic(train, config.logit_hyper);
    if (options.probe) options.probe("random_forest", split.train, split.test);
    const ForestModel forest = train_forest(train, config.forest_params, options.threads);

    ComparisonReport report;
    report.delphi_confusion = confusion_matrix(y_test, predict_labels(logistic, test));
    report.forest_confusion = confusion_matrix(y_test, predict_labels(forest, test));
    report.delphi_metrics = compute_metrics(report.delphi_confusion);
    report.forest_metrics = compute_metrics(report.forest_confusion);

    const auto imp = feature_importances(forest);
    report.importances_degenerate = imp.degenerate;
    if (!imp.degenerate)
        for (std::size_t j = 0; j < imp.values.size(); ++j)
            report.feature_importances.push_back({forest.feature_names[j], imp.values[j]});

    report.dataset_summary = {data.size(), train.size(), test.size(), data.default_rate(),
                              describe(config.data_source)};
    report.config_echo = config;
    return report;
}

// ---------------------------------------------------------------------------
// JSON

inline Json to_json(const ExperimentConfig& c) {
    Json source;
    if (const auto* g = std::get_if<GeneratorConfig>(&c.data_source))
        source["generator"] = to_json(*g);
    else
        source["csv_path"] = std::get<CsvSource>(c.data_source).path;
    return Json{{"data_source", source},
                {"test_fraction", c.test_fraction},
                {"split_seed", c.split_seed},
                {"logit_hyper", to_json(c.logit_hyper)},
                {"forest_params", to_json(c.forest_params)}};
}

inline ExperimentConfig experiment_config_from_json(const Json& j) {
    const char* what = "config";
    detail::reject_unknown_keys(j, {"data_source", "test_fraction", "split_seed", "logit_hyper", "forest_params"},
                                what);
    ExperimentConfig c;
    if (j.contains("data_source")) {
        const Json& s = j.at("data_source");
        detail::reject_unknown_keys(s, {"generator", "csv_path"}, "config.data_source");
        if (s.size() != 1) throw ParameterError("config.data_source needs exactly one of 'generator' or 'csv_path'");
        if (s.contains("generator"))
            c.data_source = generator_config_from_json(s.at("generator"));
        else if (s.at("csv_path").is_string())
            c.data_source = CsvSource{s.at("csv_path").get<std::string>()};
        else
            throw ParameterError("config.data_source.csv_path must be a string");
    }
    detail::read_opt(j, "test_fraction", c.test_fraction, what);
    if (!(c.test_fraction > 0.0 && c.test_fraction < 1.0)) throw ParameterError("test_fraction must lie in (0, 1)");
    detail::read_opt(j, "split_seed", c.split_seed, what);
    if (j.contains("logit_hyper")) c.logit_hyper = logit_hyper_from_json(j.at("logit_hyper"));
    if (j.contains("forest_params")) c.forest_params = forest_params_from_json(j.at("forest_params"));
    return c;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
    try {
        return experiment_config_from_json(read_json_file(path));
    } catch (const ParseError& e) {
        throw ParameterError(e.what());
    }
}

inline Json to_json(const ComparisonReport& r) {
    Json importances = Json::array();
    for (const auto& fi : r.feature_importances) importances.push_back({{"feature", fi.feature}, {"importance", fi.importance}});
    const auto& s = r.dataset_summary;
    return Json{{"delphi_metrics", to_json(r.delphi_metrics)},
                {"forest_metrics", to_json(r.forest_metrics)},
                {"delphi_confusion", to_json(r.delphi_confusion)},
                {"forest_confusion", to_json(r.forest_confusion)},
                {"feature_importances", std::move(importances)},
                {"importances_degenerate", r.importances_degenerate},
                {"dataset_summary",
                 {{"n", s.n},
                  {"n_train", s.n_train},
                  {"n_test", s.n_test},
                  {"default_rate", s.default_rate},
                  {"source", s.source}}},
                {"config_echo", to_json(r.config_echo)}};
}

inline ComparisonReport comparison_report_from_json(const Json& j) {
    try {
        ComparisonReport r;
        r.delphi_metrics = metrics_from_json(j.at("delphi_metrics"));
        r.forest_metrics = metrics_from_json(j.at("forest_metrics"));
        r.delphi_confusion = confusion_from_json(j.at("delphi_confusion"));
        r.forest_confusion = confusion_from_json(j.at("forest_confusion"));
        for (const auto& fi : j.at("feature_importances"))
            r.feature_importances.push_back({fi.at("feature").get<std::string>(), fi.at("importance").get<double>()});
        r.importances_degenerate = j.at("importances_degenerate").get<bool>();
        const Json& s = j.at("dataset_summary");
        r.dataset_summary = {s.at("n").get<std::uint64_t>(), s.at("n_train").get<std::uint64_t>(),
                             s.at("n_test").get<std::uint64_t>(), s.at("default_rate").get<double>(),
                             s.at("source").get<std::string>()};
        r.config_echo = experiment_config_from_json(j.at("config_echo"));
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed comparison report: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Text rendering

enum class ReportFormat { text, json };

namespace detail {

inline std::string two_decimals(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline void undefined_notes(std::ostream& out, const char* model, const MetricsReport& m) {
    if (m.precision_undefined) out << "note: " << model << " precision undefined (no positive predictions), shown as 0\n";
    if (m.recall_undefined) out << "note: " << model << " recall undefined (no positive labels), shown as 0\n";
    if (m.f1_undefined) out << "note: " << model << " F-1 undefined (precision + recall = 0), shown as 0\n";
}

} // namespace detail

inline std::string render_text(const ComparisonReport& r) {
    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof line, "%-20s %-14s %s\n", "Performance metric", "Delphi model",
                  "Random forest (AI model)");
    out << line;
    const std::pair<const char*, double MetricsReport::*> rows[] = {
        {"Accuracy", &MetricsReport::accuracy},
        {"Precision", &MetricsReport::precision},
        {"Recall", &MetricsReport::recall},
        {"F-1", &MetricsReport::f1},
    };
    for (const auto& [name, field] : rows) {
        std::snprintf(line, sizeof line, "%-20s %-14s %s\n", name, detail::two_decimals(r.delphi_metrics.*field).c_str(),
                      detail::two_decimals(r.forest_metrics.*field).c_str());
        out << line;
    }
    detail::undefined_notes(out, "Delphi model", r.delphi_metrics);
    detail::undefined_notes(out, "Random forest", r.forest_metrics);

    out << "\nFeature importance (mean decrease in impurity)\n";
    if (r.importances_degenerate || r.feature_importances.empty()) {
        out << "  degenerate: every tree is a single leaf\n";
    } else {
        for (const auto& fi : r.feature_importances) {
            std::snprintf(line, sizeof line, "  %-28s %s\n", fi.feature.c_str(), detail::two_decimals(fi.importance).c_str());
            out << line;
        }
    }
    const auto& s = r.dataset_summary;
    out << "\nData: " << s.source << ", n=" << s.n << " (train " << s.n_train << ", test " << s.n_test
        << "), default rate " << detail::two_decimals(s.default_rate) << "\n";
    return out.str();
}

inline std::string render_report(const ComparisonReport& r, ReportFormat format) {
    if (format == ReportFormat::json) return to_json(r).dump(2) + "\n";
    return render_text(r);
}

} // namespace smerisk
