// Drives the built manetsim binary end to end.

#include "manetsim/metrics.hpp"
#include "manetsim/trace.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir = fs::temp_directory_path() /
              ("manetsim_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }

    int run(const std::string& args) {
        std::string cmd = std::string(MANETSIM_CLI) + " " + args + " >" + (dir / "stdout").string() + " 2>" +
                          (dir / "stderr").string();
        int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    std::string read(const fs::path& p) const {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream out;
        out << in.rdbuf();
        return out.str();
    }

    std::string out() const { return read(dir / "stdout"); }
    std::string err() const { return read(dir / "stderr"); }
    std::string path(const char* name) const { return (dir / name).string(); }

    fs::path dir;
};

}  // namespace

TEST_F(CliTest, RunWritesTraceAndMetrics) {
    ASSERT_EQ(run("run --scenario paper-5node.scn --out-trace " + path("t.tsv") + " --metrics " + path("m.txt")), 0)
        << err();
    auto trace_text = read(dir / "t.tsv");
    std::istringstream in(trace_text);
    auto trace = manet::read_trace(in);
    ASSERT_FALSE(trace.empty());
    EXPECT_EQ(trace.back().kind, manet::TraceKind::End);
    auto kv = read(dir / "m.txt");
    EXPECT_NE(kv.find("delivery_ratio="), std::string::npos);
    EXPECT_NE(kv.find("cluster_formed_at=8.000000"), std::string::npos) << kv;
}

TEST_F(CliTest, SameSeedGivesByteIdenticalTraces) {
    ASSERT_EQ(run("run --scenario static-grid --seed 5 --out-trace " + path("a.tsv") + " --metrics " + path("m1")), 0);
    ASSERT_EQ(run("run --scenario static-grid --seed 5 --out-trace " + path("b.tsv") + " --metrics " + path("m2")), 0);
    EXPECT_EQ(read(dir / "a.tsv"), read(dir / "b.tsv"));
}

TEST_F(CliTest, JsonMetricsParse) {
    ASSERT_EQ(run("run --scenario static-grid --until 10 --format json"), 0) << err();
    auto j = nlohmann::json::parse(out());
    EXPECT_GT(j["sent"].get<int>(), 0);
}

TEST_F(CliTest, MetricsSubcommandReproducesRunMetrics) {
    ASSERT_EQ(run("run --scenario static-grid --out-trace " + path("t.tsv") + " --metrics " + path("m.txt")), 0);
    ASSERT_EQ(run("metrics --trace " + path("t.tsv")), 0) << err();
    EXPECT_EQ(out(), read(dir / "m.txt"));
}

TEST_F(CliTest, DistancesCsv) {
    ASSERT_EQ(run("distances --scenario paper-5node --ref-node 4 --sample-dt 10 --until 30"), 0) << err();
    auto csv = out();
    EXPECT_EQ(csv.rfind("time,node,ref,distance_m\n", 0), 0u);
    EXPECT_NE(csv.find("\n30.000000,"), std::string::npos);
}

TEST_F(CliTest, SweepSerialAndParallelAgree) {
    ASSERT_EQ(run("sweep --scenario static-grid --seeds 1..4 --serial --out " + path("s.csv")), 0) << err();
    ASSERT_EQ(run("sweep --scenario static-grid --seeds 4,3,2,1 --threads 3 --out " + path("p.csv")), 0) << err();
    EXPECT_EQ(read(dir / "s.csv"), read(dir / "p.csv"));
}

TEST_F(CliTest, ValidateAcceptsBundledScenario) {
    EXPECT_EQ(run("validate --scenario paper-5node"), 0);
    EXPECT_EQ(out().rfind("ok: ", 0), 0u);
}

TEST_F(CliTest, BadScenarioExitsWithOne) {
    std::ofstream(dir / "bad.json") << R"({"name": "x", "sim_end": 5, "nodes": [{"id": 0, "x": 0, "y": 0}],
        "flows": [{"id": 1, "src": 0, "dst": 9, "start": 1, "stop": 2}]})";
    EXPECT_EQ(run("validate --scenario " + path("bad.json")), 1);
    EXPECT_NE(err().find("flows[0].dst"), std::string::npos) << err();
    EXPECT_EQ(run("run --scenario " + path("missing.json")), 1);
}

TEST_F(CliTest, UsageErrorsExitWithOne) {
    EXPECT_EQ(run("run --scenario paper-5node --format yaml"), 1);
    EXPECT_EQ(run("frobnicate"), 1);
    EXPECT_EQ(run("sweep --scenario static-grid --seeds 3..1"), 1);
}

TEST_F(CliTest, UnwritableOutputExitsWithTwo) {
    EXPECT_EQ(run("run --scenario static-grid --out-trace /nonexistent/dir/t.tsv"), 2);
    EXPECT_FALSE(err().empty());
}

TEST_F(CliTest, MalformedTraceExitsWithOne) {
    std::ofstream(dir / "t.tsv") << "1.000000\tSEND\t0\n0.5\tBOGUS\t1\n";
    EXPECT_EQ(run("metrics --trace " + path("t.tsv")), 1);
    EXPECT_NE(err().find("line"), std::string::npos) << err();
}
