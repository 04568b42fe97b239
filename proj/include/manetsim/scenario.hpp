#pragma once

#include "manetsim/aodv.hpp"
#include "manetsim/clustering.hpp"
#include "manetsim/mobility.hpp"
#include "manetsim/radio.hpp"
#include "manetsim/traffic.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace manet {

struct NodeSpec {
    NodeId id = 0;
    Position initial;

    bool operator==(const NodeSpec&) const = default;
};

struct Scenario {
    std::string name;
    std::string description;
    SimTime sim_end;
    std::uint64_t seed = 1;
    RadioParams radio;
    AodvConfig aodv;
    ClusterMode cluster_mode = ClusterMode::Overlay;
    SimTime cluster_interval = SimTime::from_micros(2'000'000);
    std::vector<NodeSpec> nodes;
    std::vector<WaypointScript> waypoints;
    std::vector<FlowSpec> flows;

    bool operator==(const Scenario&) const = default;
};

class ScenarioError : public std::runtime_error {
public:
    enum class Kind { Io, Syntax, Semantic };

    ScenarioError(Kind kind, const std::string& message) : std::runtime_error(message), kind(kind) {}

    Kind kind;
};

/// Parses and validates a JSON scenario. Unknown keys are rejected; omitted
/// radio and protocol constants keep their defaults. Syntax errors carry the
/// line and column, semantic errors the path of the offending field
/// (e.g. "flows[0].dst").
Scenario parse_scenario_text(std::string_view text);
Scenario parse_scenario(const std::filesystem::path& path);

/// Throws ScenarioError(Semantic) naming the first invalid field.
void validate_scenario(const Scenario& scenario);

/// Serializes every field, defaults included, so that
/// parse_scenario_text(emit_scenario(s)) == s.
std::string emit_scenario(const Scenario& scenario);

/// An existing file path is returned as is. Otherwise a bare name such as
/// "paper-5node" is looked up among the bundled scenarios.
std::filesystem::path resolve_scenario(std::string_view name_or_path);

}  // namespace manet
