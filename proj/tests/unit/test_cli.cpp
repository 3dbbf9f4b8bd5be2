#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "npspec/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "npspec");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out;
    std::ostringstream err;
    const int code = npspec::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("npspec_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    std::string write(const std::string& name, const std::string& content) const {
        std::ofstream(path(name), std::ios::binary) << content;
        return path(name);
    }

    static std::string read(const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    }

    fs::path dir_;
};

}  // namespace

TEST_F(CliTest, ExactLinearDataIsDegenerate) {
    std::string csv = "y,x1\n";
    for (int t = 0; t < 30; ++t) {
        const double x = -1.5 + 0.1 * t;
        csv += std::to_string(1.0 + x) + "," + std::to_string(x) + "\n";
    }
    const auto r = run({"test", "--data", write("line.csv", csv)});
    EXPECT_EQ(r.code, npspec::cli::kExitDegenerate) << r.err;
    EXPECT_FALSE(r.err.empty());
}

TEST_F(CliTest, MissingColumnIsDataError) {
    const auto r = run({"test", "--data", write("bad.csv", "y,x2\n1,2\n3,4\n")});
    EXPECT_EQ(r.code, npspec::cli::kExitData);
    EXPECT_NE(r.err.find("x1"), std::string::npos) << r.err;
    EXPECT_EQ(run({"test", "--data", path("absent.csv")}).code, npspec::cli::kExitData);
}

TEST_F(CliTest, UsageErrors) {
    EXPECT_EQ(run({"test"}).code, npspec::cli::kExitUsage);
    EXPECT_EQ(run({"frobnicate"}).code, npspec::cli::kExitUsage);
    EXPECT_EQ(run({"are", "--omega", "0.9"}).code, npspec::cli::kExitUsage);
    EXPECT_EQ(run({"test", "--data", "x.csv", "--kernel", "gaussian"}).code, npspec::cli::kExitUsage);
    EXPECT_EQ(run({"--help"}).code, npspec::cli::kExitOk);
}

TEST_F(CliTest, GenThenTestIsDeterministic) {
    const auto csv = path("p1.csv");
    ASSERT_EQ(run({"gen", "--dgp", "p1", "--theta", "1", "--n", "500", "--seed", "7", "--out", csv}).code, 0);
    const std::vector<std::string> args{"test", "--data", csv, "--tests", "q,glr", "--bootstrap", "99",
                                        "--seed", "3", "--format", "json"};
    const auto a = run(args);
    const auto b = run(args);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    const auto doc = nlohmann::json::parse(a.out);
    EXPECT_EQ(doc["n"], 500);
    EXPECT_EQ(doc["calibration"], "both");
    ASSERT_EQ(doc["results"].size(), 2u);
    for (const auto& r : doc["results"]) EXPECT_EQ(r["bootstrap"]["p_star"].get<double>(), 0.0);

    auto threaded = args;
    threaded.insert(threaded.end(), {"--threads", "4"});
    EXPECT_EQ(run(threaded).out, a.out);
}

TEST_F(CliTest, GenIsByteIdentical) {
    const auto a = run({"gen", "--dgp", "p2", "--theta", "0.5", "--dist", "lognormal", "--n", "50", "--seed", "11"});
    const auto b = run({"gen", "--dgp", "p2", "--theta", "0.5", "--dist", "lognormal", "--n", "50", "--seed", "11"});
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(a.out.substr(0, 5), "y,x1\n");
}

TEST_F(CliTest, ResidualMode) {
    const auto csv = path("null.csv");
    ASSERT_EQ(run({"gen", "--n", "80", "--seed", "2", "--out", csv}).code, 0);
    std::istringstream in(read(csv));
    std::string line;
    std::getline(in, line);
    std::string resid = "resid,x1\n";
    while (std::getline(in, line)) {
        const auto comma = line.find(',');
        const double y = std::stod(line.substr(0, comma));
        const double x = std::stod(line.substr(comma + 1));
        resid += std::to_string(y - 1.0 - x) + "," + line.substr(comma + 1) + "\n";
    }
    const auto r = run({"test", "--residuals", write("resid.csv", resid), "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(nlohmann::json::parse(r.out)["null_model"], "residuals");
}

TEST_F(CliTest, LossExpansionAndTextReport) {
    const auto csv = path("s.csv");
    ASSERT_EQ(run({"gen", "--n", "100", "--seed", "4", "--out", csv}).code, 0);
    const auto r = run({"test", "--data", csv, "--tests", "q,glr", "--loss", "quadratic", "--loss", "linex:0.5,1",
                        "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto doc = nlohmann::json::parse(r.out);
    ASSERT_EQ(doc["results"].size(), 3u);
    EXPECT_EQ(doc["results"][1]["test"], "q[linex:0.5,1]");
    const auto text = run({"test", "--data", csv});
    EXPECT_NE(text.out.find("glr"), std::string::npos);
}

TEST_F(CliTest, McShardsAndMerge) {
    const auto cfg = write("grid.cfg",
                           "models = s_null, p1\nthetas.p1 = 0.5\nerrors = normal\nn = 40\nreps = 4\n"
                           "bootstrap = 9\nseed = 5\n");
    const auto full = path("full.json");
    ASSERT_EQ(run({"mc", "--config", cfg, "--out", full, "--threads", "1"}).code, 0);
    const auto s0 = path("s0.json");
    const auto s1 = path("s1.json");
    ASSERT_EQ(run({"mc", "--config", cfg, "--shard", "0/2", "--out", s0}).code, 0);
    ASSERT_EQ(run({"mc", "--config", cfg, "--shard", "1/2", "--out", s1}).code, 0);
    const auto merged = run({"mc", "--merge", s0, "--merge", s1, "--format", "csv"});
    ASSERT_EQ(merged.code, 0) << merged.err;
    const auto direct = run({"mc", "--merge", full, "--format", "csv"});
    EXPECT_EQ(merged.out, direct.out);
    EXPECT_EQ(run({"mc", "table9"}).code, npspec::cli::kExitUsage);
    EXPECT_EQ(run({"mc", "--merge", write("junk.json", "{ nope")}).code, npspec::cli::kExitData);
}

TEST_F(CliTest, EfficiencyCommands) {
    const auto c = run({"constants", "--kernel", "epanechnikov"});
    ASSERT_EQ(c.code, 0);
    const auto doc = nlohmann::json::parse(c.out);
    EXPECT_NEAR(doc["b"].get<double>(), 167.0 / 385.0, 1e-9);
    const auto are = run({"are", "--kernel", "uniform", "--omega", "1/5", "--convention", "table1"});
    ASSERT_EQ(are.code, 0);
    EXPECT_NE(are.out.find("ARE        = 2.7679"), std::string::npos) << are.out;
    EXPECT_NE(are.out.find("note:"), std::string::npos);
    const auto table = run({"are-table"});
    ASSERT_EQ(table.code, 0);
    EXPECT_NE(table.out.find("triweight"), std::string::npos);
}
