#pragma once

#include "manetsim/sim_time.hpp"

#include <map>
#include <set>
#include <stdexcept>
#include <vector>

namespace manet {

struct Position {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Position&) const = default;
};

double euclidean(Position a, Position b);

/// One straight-line movement: starting at depart_at from wherever the node
/// is, head for target at constant speed and stop there.
struct Leg {
    SimTime depart_at;
    Position target;
    double speed = 1.0;  // m/s, > 0

    bool operator==(const Leg&) const = default;
};

struct WaypointScript {
    NodeId node = 0;
    std::vector<Leg> legs;  // strictly increasing depart_at

    bool operator==(const WaypointScript&) const = default;
};

class UnknownNodeError : public std::out_of_range {
public:
    explicit UnknownNodeError(NodeId node);
    NodeId node;
};

/// Symmetric adjacency keyed by node id.
using NeighborGraph = std::map<NodeId, std::set<NodeId>>;

/// Piecewise-linear kinematics for every node of a scenario.
///
/// A leg that departs before the previous one has arrived interrupts it; the
/// node turns toward the new target from its position at that instant.
class Mobility {
public:
    Mobility() = default;

    /// Throws std::invalid_argument on duplicate nodes, unsorted legs or
    /// non-positive speeds.
    void add_node(NodeId node, Position initial, std::vector<Leg> legs = {});

    bool contains(NodeId node) const { return nodes_.contains(node); }
    std::vector<NodeId> node_ids() const;
    std::size_t size() const { return nodes_.size(); }

    Position position_at(NodeId node, SimTime t) const;
    double distance(NodeId a, NodeId b, SimTime t) const;

    /// Nodes within range of node at t, ascending by id.
    std::vector<NodeId> neighbors(NodeId node, SimTime t, double range) const;
    NeighborGraph graph_at(SimTime t, double range) const;

private:
    struct Track {
        Position initial;
        std::vector<Leg> legs;
        std::vector<Position> leg_start;  // position when each leg departs
    };

    static Position advance(Position from, const Leg& leg, SimTime t);

    std::map<NodeId, Track> nodes_;
};

}  // namespace manet
