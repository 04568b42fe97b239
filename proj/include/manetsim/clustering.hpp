#pragma once

#include "manetsim/mobility.hpp"
#include "manetsim/sim_time.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace manet {

enum class ClusterMode { Off, Overlay, Forwarding };

std::string_view to_string(ClusterMode mode);
std::optional<ClusterMode> cluster_mode_from_string(std::string_view text);

struct ClusterRole {
    enum class Kind { Undecided, Head, Member, Gateway };

    Kind kind = Kind::Undecided;
    std::set<NodeId> heads;  // Member: exactly its head; Gateway: adjacent heads

    static ClusterRole undecided() { return {}; }
    static ClusterRole head() { return {Kind::Head, {}}; }
    static ClusterRole member(NodeId h) { return {Kind::Member, {h}}; }
    static ClusterRole gateway(std::set<NodeId> hs) { return {Kind::Gateway, std::move(hs)}; }

    bool is_backbone() const { return kind == Kind::Head || kind == Kind::Gateway; }

    /// "head", "member:3", "gateway:0+3", "undecided".
    std::string str() const;

    bool operator==(const ClusterRole&) const = default;
};

struct ClusterView {
    std::map<NodeId, ClusterRole> roles;
    std::optional<SimTime> formed_at;

    std::set<NodeId> heads() const;
    const ClusterRole& role(NodeId node) const;

    bool operator==(const ClusterView&) const = default;
};

/// Lowest-ID election. Incumbent heads are reinstated first, in ascending id
/// order, whenever no already-reinstated head is adjacent. Then, repeatedly,
/// every Undecided node whose id is smallest among its Undecided neighbors
/// becomes Head and claims its Undecided neighbors as Members.
ClusterView elect_clusters(const NeighborGraph& graph, const std::set<NodeId>& incumbents = {});

/// Promotes non-Head nodes to Gateway: first those adjacent to two or more
/// Heads; then, to a fixpoint, those with exactly one Head neighbor that are
/// adjacent to a node of a different cluster which is itself a Gateway or a
/// single-head node (two adjacent members of disjoint clusters bridge them).
ClusterView identify_gateways(ClusterView view, const NeighborGraph& graph);

/// Shortest path from src to dst whose interior nodes are all Heads or
/// Gateways. Two consecutive interior Gateways are allowed only when they
/// share no Head (a bridge between disjoint clusters). Returns the full node
/// sequence including both endpoints, or nullopt when unreachable.
std::optional<std::vector<NodeId>> cluster_route(NodeId src, NodeId dst, const ClusterView& view,
                                                 const NeighborGraph& graph);

bool is_connected(const NeighborGraph& graph);

}  // namespace manet
