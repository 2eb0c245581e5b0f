#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "smerisk/experiment.hpp"
#include "test_util.hpp"

namespace smerisk {
namespace {

using testing::TempDir;

int run(const std::string& args, const std::string& stdout_file = "/dev/null") {
    const std::string cmd = std::string(SMERISK_CLI) + " " + args + " > " + stdout_file + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

TEST(Cli, GenerateMatchesLibrary) {
    TempDir dir("cli");
    ASSERT_EQ(run("generate --n 300 --seed 9 --signal 1.5 --base-rate 0.3 --out " + dir.file("g.csv")), 0);
    GeneratorConfig c;
    c.n_samples = 300;
    c.seed = 9;
    c.signal_strength = 1.5;
    c.base_default_rate = 0.3;
    EXPECT_EQ(load_csv(dir.file("g.csv")), generate(c));
}

TEST(Cli, CompareIsByteDeterministic) {
    TempDir dir("cli");
    ASSERT_EQ(run("generate --out " + dir.file("g.csv")), 0);
    ASSERT_EQ(run("compare --data " + dir.file("g.csv") + " --trees 20 --json " + dir.file("a.json"),
                  dir.file("a.txt")),
              0);
    ASSERT_EQ(run("compare --data " + dir.file("g.csv") + " --trees 20 --threads 4 --json " + dir.file("b.json")), 0);
    EXPECT_EQ(slurp(dir.file("a.json")), slurp(dir.file("b.json")));
    EXPECT_NE(slurp(dir.file("a.txt")).find("Accuracy"), std::string::npos);
}

TEST(Cli, CompareWithConfigFile) {
    TempDir dir("cli");
    std::ofstream(dir.file("c.json")) << R"({"data_source": {"generator": {"n_samples": 400}},
                                          "forest_params": {"n_trees": 10}})";
    ASSERT_EQ(run("compare --config " + dir.file("c.json") + " --json " + dir.file("r.json")), 0);
    const auto report = comparison_report_from_json(Json::parse(slurp(dir.file("r.json"))));
    EXPECT_EQ(report.dataset_summary.n, 400u);
    EXPECT_EQ(report.config_echo.forest_params.n_trees, 10u);
}

TEST(Cli, TrainScoreImportance) {
    TempDir dir("cli");
    ASSERT_EQ(run("generate --n 400 --out " + dir.file("g.csv")), 0);
    ASSERT_EQ(run("train --model forest --trees 15 --data " + dir.file("g.csv") + " --out " + dir.file("f.json")), 0);
    ASSERT_EQ(run("train --model logistic --data " + dir.file("g.csv") + " --out " + dir.file("l.json")), 0);
    ASSERT_EQ(run("score --model " + dir.file("f.json") + " --data " + dir.file("g.csv") + " --out " +
                  dir.file("s.csv")),
              0);
    const std::string scores = slurp(dir.file("s.csv"));
    EXPECT_EQ(std::count(scores.begin(), scores.end(), '\n'), 401);

    const auto forest = std::get<ForestModel>(load_model(dir.file("f.json")));
    const auto data = load_csv(dir.file("g.csv"));
    std::istringstream lines(scores);
    std::string line;
    std::getline(lines, line);
    for (std::size_t i = 0; std::getline(lines, line); ++i) {
        const auto p = predict_forest(forest, data[i]);
        EXPECT_EQ(line, std::to_string(i) + "," + detail::format_double(p.prob_1) + "," + std::to_string(p.label));
    }

    ASSERT_EQ(run("importance --model " + dir.file("f.json"), dir.file("imp.txt")), 0);
    EXPECT_NE(slurp(dir.file("imp.txt")).find("Debt_Equity_Ratio,"), std::string::npos);
    EXPECT_EQ(run("importance --model " + dir.file("l.json")), 2);
}

TEST(Cli, ExitCodes) {
    TempDir dir("cli");
    EXPECT_EQ(run("compare --test-fraction 1.5"), 2);
    EXPECT_EQ(run("frobnicate"), 2);
    std::ofstream(dir.file("bad.json")) << "{\"unknown_key\": 1}";
    EXPECT_EQ(run("compare --config " + dir.file("bad.json")), 2);

    std::ofstream(dir.file("bad.csv")) << "Revenue_Growth,DebtEquity\n0.1,2\n";
    EXPECT_EQ(run("compare --data " + dir.file("bad.csv")), 3);
    EXPECT_EQ(run("compare --data " + dir.file("missing.csv")), 3);

    std::vector<SmeRecord> rs(20);
    for (auto& r : rs) r.default_status = 1;
    write_csv(Dataset(rs), dir.file("flat.csv"));
    EXPECT_EQ(run("compare --data " + dir.file("flat.csv")), 4);
    EXPECT_EQ(run("train --model logistic --data " + dir.file("flat.csv") + " --out " + dir.file("m.json")), 4);

    auto doc = to_json(LogisticModel{});
    doc["format_version"] = "999";
    std::ofstream(dir.file("v.json")) << doc.dump();
    EXPECT_EQ(run("score --model " + dir.file("v.json") + " --data " + dir.file("flat.csv") + " --out " +
                  dir.file("o.csv")),
              3);
}

} // namespace
} // namespace smerisk
