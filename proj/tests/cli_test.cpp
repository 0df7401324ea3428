#include "immunotrack/commands.hpp"
#include "immunotrack/report.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <sstream>

using namespace immunotrack;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / ("immunotrack_cli_" + std::string(info->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    int run(CliOptions o) {
        out_.str("");
        err_.str("");
        return run_command(o, out_, err_);
    }

    void write_synthetic(const std::string& name, std::size_t length = 160) {
        CliOptions o;
        o.command = Command::gen_synthetic;
        o.output = path(name);
        o.sets = {"synth_kind=periodic", "synth_pattern=1,1,-1,2,-3",
                  "synth_length=" + std::to_string(length)};
        ASSERT_EQ(run(o), 0) << err_.str();
    }

    CliOptions evaluate_on(const std::string& input, const std::string& output) const {
        CliOptions o;
        o.command = Command::evaluate;
        o.input = path(input);
        o.output = path(output);
        o.sets = {"pool_cap=80", "warmup=40"};
        return o;
    }

    fs::path dir_;
    std::ostringstream out_;
    std::ostringstream err_;
};

}  // namespace

TEST_F(CliTest, GenerateThenEvaluate) {
    write_synthetic("series.csv");
    ASSERT_EQ(run(evaluate_on("series.csv", "report.json")), 0) << err_.str();
    const auto doc = nlohmann::ordered_json::parse(read_file(path("report.json")));
    std::vector<std::string> keys;
    for (const auto& [k, v] : doc.items()) keys.push_back(k);
    EXPECT_EQ(keys, (std::vector<std::string>{"config", "metrics", "sequence", "patterns",
                                              "pool_summary", "forecasts"}));
    EXPECT_EQ(doc["config"]["pool_cap"], 80);
    EXPECT_TRUE(doc["metrics"].contains("persistence"));
    EXPECT_TRUE(doc["metrics"]["tracker"].contains("dir_acc"));
    EXPECT_EQ(doc["forecasts"].size(), doc["metrics"]["steps"].get<std::size_t>());
    EXPECT_TRUE(err_.str().empty());
}

TEST_F(CliTest, MissingInputNamesThePath) {
    const std::string missing = path("nope.csv");
    EXPECT_NE(run(evaluate_on("nope.csv", "report.json")), 0);
    EXPECT_NE(err_.str().find(missing), std::string::npos) << err_.str();
    const std::string diag = err_.str();
    EXPECT_EQ(std::count(diag.begin(), diag.end(), '\n'), 1);
    EXPECT_FALSE(fs::exists(path("report.json")));
}

TEST_F(CliTest, BadOverrideIsReported) {
    write_synthetic("series.csv");
    CliOptions o = evaluate_on("series.csv", "report.json");
    o.sets.push_back("no_such_key=1");
    EXPECT_EQ(run(o), 1);
    EXPECT_NE(err_.str().find("cli.UnknownKey"), std::string::npos);
}

TEST_F(CliTest, ReportsAreByteIdentical) {
    write_synthetic("series.csv");
    CliOptions a = evaluate_on("series.csv", "a.json");
    a.threads = 4;
    CliOptions b = evaluate_on("series.csv", "b.json");
    b.threads = 4;
    CliOptions c = evaluate_on("series.csv", "c.json");
    c.threads = 1;
    ASSERT_EQ(run(a), 0);
    ASSERT_EQ(run(b), 0);
    ASSERT_EQ(run(c), 0);
    const std::string ra = read_file(path("a.json"));
    EXPECT_EQ(ra, read_file(path("b.json")));
    EXPECT_EQ(ra, read_file(path("c.json")));
}

TEST_F(CliTest, StdoutWhenNoOutput) {
    write_synthetic("series.csv");
    CliOptions o = evaluate_on("series.csv", "unused.json");
    o.output.reset();
    ASSERT_EQ(run(o), 0);
    EXPECT_FALSE(fs::exists(path("unused.json")));
    EXPECT_TRUE(nlohmann::json::accept(out_.str()));
}

TEST_F(CliTest, RunThenForecastAndInspect) {
    write_synthetic("series.csv", 200);
    CliOptions r;
    r.command = Command::run;
    r.input = path("series.csv");
    r.output = path("run.json");
    r.sets = {"pool_cap=80", "warmup=40"};
    ASSERT_EQ(run(r), 0) << err_.str();
    const auto artifact = load_run_artifact(read_file(path("run.json")));
    EXPECT_EQ(artifact.generations, 160u);
    EXPECT_FALSE(artifact.sequence.entries.empty());
    EXPECT_EQ(artifact.config.engine.pool_cap, 80u);

    CliOptions f;
    f.command = Command::forecast;
    f.artifact = path("run.json");
    f.input = path("series.csv");
    f.horizon = 4;
    f.output = path("forecast.json");
    ASSERT_EQ(run(f), 0) << err_.str();
    const auto fc = nlohmann::json::parse(read_file(path("forecast.json")));
    EXPECT_EQ(fc["predicted"].size(), 4u);
    EXPECT_EQ(fc["price_path"].size(), 4u);
    EXPECT_EQ(fc["anchor"], 199);

    CliOptions i;
    i.command = Command::inspect;
    i.artifact = path("run.json");
    ASSERT_EQ(run(i), 0) << err_.str();
    EXPECT_NE(out_.str().find("pool"), std::string::npos);

    for (const auto& entry : fs::directory_iterator(dir_)) {
        EXPECT_EQ(entry.path().string().find(".tmp"), std::string::npos) << entry.path();
    }
}

TEST_F(CliTest, ForecastRejectsBrokenArtifact) {
    write_synthetic("series.csv");
    CliOptions f;
    f.command = Command::forecast;
    f.artifact = path("series.csv");
    f.input = path("series.csv");
    EXPECT_EQ(run(f), 1);
    EXPECT_NE(err_.str().find("cli.BadArtifact"), std::string::npos);
}

TEST_F(CliTest, GenSyntheticNeedsKind) {
    CliOptions o;
    o.command = Command::gen_synthetic;
    EXPECT_EQ(run(o), 1);
    EXPECT_NE(err_.str().find("synth_kind"), std::string::npos);
}
