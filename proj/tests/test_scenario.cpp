#include "manetsim/scenario.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace manet;

namespace {

const char* kMinimal = R"({
  "name": "pair",
  "sim_end": 10,
  "nodes": [{"id": 0, "x": 0, "y": 0}, {"id": 1, "x": 100, "y": 0}],
  "flows": [{"id": 1, "src": 0, "dst": 1, "start": 1, "stop": 9, "interval": 0.5}]
})";

std::string with(std::string_view from, std::string_view to) {
    std::string s = kMinimal;
    auto p = s.find(from);
    EXPECT_NE(p, std::string::npos) << from;
    s.replace(p, from.size(), to);
    return s;
}

ScenarioError::Kind kind_of(const std::string& text, std::string* message = nullptr) {
    try {
        parse_scenario_text(text);
    } catch (const ScenarioError& e) {
        if (message != nullptr) *message = e.what();
        return e.kind;
    }
    ADD_FAILURE() << "parsed without error";
    return ScenarioError::Kind::Io;
}

}  // namespace

TEST(ScenarioTest, MinimalScenarioGetsDefaults) {
    auto s = parse_scenario_text(kMinimal);
    EXPECT_EQ(s.nodes.size(), 2u);
    EXPECT_EQ(s.seed, 1u);
    EXPECT_EQ(s.cluster_mode, ClusterMode::Overlay);
    EXPECT_EQ(s.radio, RadioParams{});
    EXPECT_EQ(s.aodv, AodvConfig{});
    EXPECT_EQ(s.flows[0].interval, SimTime::from_micros(500'000));
}

TEST(ScenarioTest, BundledFiveNodeScenarioLoadsByName) {
    auto s = parse_scenario(resolve_scenario("paper-5node"));
    EXPECT_EQ(s.nodes.size(), 5u);
    EXPECT_EQ(s.cluster_mode, ClusterMode::Overlay);
    EXPECT_EQ(s.radio.range, 250.0);
    ASSERT_EQ(s.flows.size(), 1u);
    EXPECT_EQ(s.flows[0].src, 4u);
    EXPECT_EQ(s.flows[0].dst, 1u);
}

TEST(ScenarioTest, EmitThenParseIsIdentity) {
    for (const char* name : {"paper-5node", "static-grid"}) {
        auto s = parse_scenario(resolve_scenario(name));
        EXPECT_EQ(parse_scenario_text(emit_scenario(s)), s) << name;
    }
    auto s = parse_scenario_text(kMinimal);
    s.aodv.intermediate_reply = false;
    s.radio.loss_probability = 0.125;
    s.cluster_mode = ClusterMode::Forwarding;
    EXPECT_EQ(parse_scenario_text(emit_scenario(s)), s);
}

TEST(ScenarioTest, SyntaxErrorReportsLineAndColumn) {
    std::string msg;
    EXPECT_EQ(kind_of("{\n  \"name\": \"x\",\n  oops\n}", &msg), ScenarioError::Kind::Syntax);
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("column"), std::string::npos) << msg;
}

TEST(ScenarioTest, UnknownKeyIsRejected) {
    std::string msg;
    EXPECT_EQ(kind_of(with("\"sim_end\"", "\"colour\": 1, \"sim_end\""), &msg), ScenarioError::Kind::Semantic);
    EXPECT_NE(msg.find("colour"), std::string::npos) << msg;
}

TEST(ScenarioTest, FlowToUnknownNodeNamesTheField) {
    std::string msg;
    EXPECT_EQ(kind_of(with("\"dst\": 1", "\"dst\": 9"), &msg), ScenarioError::Kind::Semantic);
    EXPECT_NE(msg.find("flows[0].dst"), std::string::npos) << msg;
    EXPECT_NE(msg.find("9"), std::string::npos) << msg;
}

TEST(ScenarioTest, SemanticChecks) {
    EXPECT_EQ(kind_of(R"({"name": "e", "sim_end": 5, "nodes": []})"), ScenarioError::Kind::Semantic);
    EXPECT_EQ(kind_of(with("\"id\": 1, \"x\": 100", "\"id\": 0, \"x\": 100")), ScenarioError::Kind::Semantic);
    EXPECT_EQ(kind_of(with("\"dst\": 1", "\"dst\": 0")), ScenarioError::Kind::Semantic);
    EXPECT_EQ(kind_of(with("\"interval\": 0.5", "\"interval\": 0")), ScenarioError::Kind::Semantic);
    EXPECT_EQ(kind_of(with("\"sim_end\": 10", "\"sim_end\": -1")), ScenarioError::Kind::Semantic);
    EXPECT_EQ(kind_of(with("\"sim_end\": 10", "\"sim_end\": 10, \"cluster_mode\": \"maybe\"")),
              ScenarioError::Kind::Semantic);
    EXPECT_EQ(kind_of(with("\"sim_end\": 10",
                           "\"sim_end\": 10, \"waypoints\": [{\"node\": 0, \"legs\": "
                           "[{\"at\": 1, \"x\": 5, \"y\": 5, \"speed\": -3}]}]")),
              ScenarioError::Kind::Semantic);
    EXPECT_EQ(kind_of(with("\"sim_end\": 10", "\"sim_end\": 10, \"radio\": {\"loss_probability\": 1.5}")),
              ScenarioError::Kind::Semantic);
}

TEST(ScenarioTest, MissingFileIsAnIoError) {
    try {
        parse_scenario("/nonexistent/scenario.json");
        FAIL();
    } catch (const ScenarioError& e) {
        EXPECT_EQ(e.kind, ScenarioError::Kind::Io);
        EXPECT_NE(std::string(e.what()).find("/nonexistent/scenario.json"), std::string::npos);
    }
}

TEST(ScenarioTest, BundledNameResolvesWithAnyExtension) {
    EXPECT_EQ(resolve_scenario("paper-5node.scn"), resolve_scenario("paper-5node"));
    EXPECT_EQ(resolve_scenario("paper-5node.json"), resolve_scenario("paper-5node"));
}

TEST(ScenarioTest, ResolvePrefersExistingPath) {
    auto dir = std::filesystem::temp_directory_path() / "manetsim_scenario_test";
    std::filesystem::create_directories(dir);
    auto file = dir / "custom.json";
    std::ofstream(file) << kMinimal;
    EXPECT_EQ(resolve_scenario(file.string()), file);
    EXPECT_EQ(parse_scenario(file).name, "pair");
    std::filesystem::remove_all(dir);
}
