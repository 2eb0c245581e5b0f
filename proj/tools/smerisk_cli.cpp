// smerisk: command-line driver for dataset generation, model training,
// scoring and the logistic-vs-forest comparison.
//
// Exit codes: 0 success, 2 configuration error, 3 data error,
// 4 training degeneracy.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "smerisk/smerisk.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitDegenerate = 4;

int exit_code_for(smerisk::ErrorKind kind) {
    using smerisk::ErrorKind;
    switch (kind) {
    case ErrorKind::parameter:
        return kExitConfig;
    case ErrorKind::degenerate_labels:
        return kExitDegenerate;
    default:
        return kExitData;
    }
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw smerisk::IoError("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw smerisk::IoError("write to '" + path + "' failed");
}

struct GenerateArgs {
    std::optional<std::string> config;
    std::optional<std::uint64_t> n, seed;
    std::optional<double> signal, base_rate;
    std::string out;
};

struct CompareArgs {
    std::optional<std::string> config, data, json;
    std::optional<double> test_fraction;
    std::optional<std::uint64_t> seed, trees;
    unsigned threads = 1;
};

struct TrainArgs {
    std::string model = "forest";
    std::string data, out;
    std::optional<std::uint64_t> seed, trees;
    unsigned threads = 1;
};

struct ScoreArgs {
    std::string model, data, out;
    double threshold = 0.5;
};

int run_generate(const GenerateArgs& a) {
    smerisk::GeneratorConfig c;
    if (a.config) {
        try {
            c = smerisk::generator_config_from_json(smerisk::read_json_file(*a.config));
        } catch (const smerisk::ParseError& e) {
            throw smerisk::ParameterError(e.what());
        }
    }
    if (a.n) c.n_samples = *a.n;
    if (a.seed) c.seed = *a.seed;
    if (a.signal) c.signal_strength = *a.signal;
    if (a.base_rate) c.base_default_rate = *a.base_rate;
    const auto data = smerisk::generate(c);
    smerisk::write_csv(data, a.out);
    std::cerr << "wrote " << data.size() << " records to " << a.out << " (default rate "
              << data.default_rate() << ")\n";
    return kExitOk;
}

int run_compare(const CompareArgs& a) {
    smerisk::ExperimentConfig c;
    if (a.config) c = smerisk::load_experiment_config(*a.config);
    if (a.data) c.data_source = smerisk::CsvSource{*a.data};
    if (a.test_fraction) c.test_fraction = *a.test_fraction;
    if (a.seed) {
        c.split_seed = *a.seed;
        c.forest_params.seed = *a.seed;
    }
    if (a.trees) c.forest_params.n_trees = *a.trees;

    smerisk::RunOptions opts;
    opts.threads = a.threads;
    const auto report = smerisk::run_comparison(c, opts);
    std::cout << smerisk::render_report(report, smerisk::ReportFormat::text);
    if (a.json) write_text(*a.json, smerisk::render_report(report, smerisk::ReportFormat::json));
    return kExitOk;
}

int run_train(const TrainArgs& a) {
    const auto data = smerisk::load_csv(a.data);
    if (a.model == "logistic") {
        const auto m = smerisk::train_logistic(data);
        smerisk::save_model(m, a.out);
        std::cerr << "logistic model: " << m.training_meta.iterations << " iterations, final loss "
                  << m.training_meta.final_loss << "\n";
    } else {
        smerisk::ForestParams p;
        if (a.seed) p.seed = *a.seed;
        if (a.trees) p.n_trees = *a.trees;
        const auto m = smerisk::train_forest(data, p, a.threads);
        smerisk::save_model(m, a.out);
        std::cerr << "random forest: " << m.trees.size() << " trees\n";
    }
    return kExitOk;
}

int run_score(const ScoreArgs& a) {
    smerisk::check_threshold(a.threshold);
    const auto model = smerisk::load_model(a.model);
    const auto data = smerisk::load_csv(a.data);
    std::ofstream out(a.out, std::ios::binary | std::ios::trunc);
    if (!out) throw smerisk::IoError("cannot open '" + a.out + "' for writing");
    out << "row,prob_default,predicted_default\n";
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto& r = data[i];
        const double p = std::holds_alternative<smerisk::LogisticModel>(model)
                             ? smerisk::predict_proba(std::get<smerisk::LogisticModel>(model), r)
                             : smerisk::predict_forest(std::get<smerisk::ForestModel>(model), r).prob_1;
        out << i << ',' << smerisk::detail::format_double(p) << ',' << (p >= a.threshold ? 1 : 0) << '\n';
    }
    if (!out) throw smerisk::IoError("write to '" + a.out + "' failed");
    return kExitOk;
}

int run_importance(const std::string& path) {
    const auto model = smerisk::load_model(path);
    const auto* forest = std::get_if<smerisk::ForestModel>(&model);
    if (!forest) throw smerisk::ParameterError("importance is defined for random_forest models only");
    const auto imp = smerisk::feature_importances(*forest);
    if (imp.degenerate) {
        std::cout << "degenerate: every tree is a single leaf\n";
        return kExitOk;
    }
    for (std::size_t j = 0; j < imp.values.size(); ++j)
        std::cout << forest->feature_names[j] << ',' << smerisk::detail::format_double(imp.values[j]) << '\n';
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"SME credit-risk scoring: logistic baseline vs random forest"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "Write a synthetic SME dataset as CSV");
    generate->add_option("--config", gen.config, "Generator configuration (JSON)")->check(CLI::ExistingFile);
    generate->add_option("--n", gen.n, "Number of records");
    generate->add_option("--seed", gen.seed, "Master seed");
    generate->add_option("--signal", gen.signal, "Signal strength (0 = labels independent of features)");
    generate->add_option("--base-rate", gen.base_rate, "Marginal default rate");
    generate->add_option("--out", gen.out, "Output CSV")->required();

    CompareArgs cmp;
    auto* compare = app.add_subcommand("compare", "Train both models on one split and print the comparison");
    compare->add_option("--config", cmp.config, "Experiment configuration (JSON)")->check(CLI::ExistingFile);
    compare->add_option("--data", cmp.data, "Labeled CSV (overrides the configured source)");
    compare->add_option("--test-fraction", cmp.test_fraction, "Held-out fraction");
    compare->add_option("--seed", cmp.seed, "Split and forest seed");
    compare->add_option("--trees", cmp.trees, "Number of trees");
    compare->add_option("--threads", cmp.threads, "Forest training threads (0 = all cores)");
    compare->add_option("--json", cmp.json, "Also write the full report as JSON");

    TrainArgs trn;
    auto* train = app.add_subcommand("train", "Train one model and save it as JSON");
    train->add_option("--model", trn.model, "Model type")->check(CLI::IsMember({"logistic", "forest"}))->required();
    train->add_option("--data", trn.data, "Labeled CSV")->required();
    train->add_option("--out", trn.out, "Output model file")->required();
    train->add_option("--seed", trn.seed, "Forest seed");
    train->add_option("--trees", trn.trees, "Number of trees");
    train->add_option("--threads", trn.threads, "Forest training threads (0 = all cores)");

    ScoreArgs scr;
    auto* score = app.add_subcommand("score", "Score a CSV with a saved model");
    score->add_option("--model", scr.model, "Model file")->required();
    score->add_option("--data", scr.data, "CSV to score (label column optional)")->required();
    score->add_option("--out", scr.out, "Output CSV")->required();
    score->add_option("--threshold", scr.threshold, "Decision threshold");

    std::string importance_model;
    auto* importance = app.add_subcommand("importance", "Print forest feature importances");
    importance->add_option("--model", importance_model, "Forest model file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*generate) return run_generate(gen);
        if (*compare) return run_compare(cmp);
        if (*train) return run_train(trn);
        if (*score) return run_score(scr);
        if (*importance) return run_importance(importance_model);
    } catch (const smerisk::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.kind());
    }
    return kExitConfig;
}
