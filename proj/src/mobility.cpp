#include "manetsim/mobility.hpp"

#include <cmath>
#include <string>

namespace manet {

double euclidean(Position a, Position b) { return std::hypot(a.x - b.x, a.y - b.y); }

UnknownNodeError::UnknownNodeError(NodeId n) : std::out_of_range("unknown node " + std::to_string(n)), node(n) {}

void Mobility::add_node(NodeId node, Position initial, std::vector<Leg> legs) {
    if (nodes_.contains(node)) {
        throw std::invalid_argument("duplicate node " + std::to_string(node));
    }
    if (!std::isfinite(initial.x) || !std::isfinite(initial.y)) {
        throw std::invalid_argument("node " + std::to_string(node) + " has a non-finite position");
    }
    Track track{initial, std::move(legs), {}};
    Position here = initial;
    for (std::size_t i = 0; i < track.legs.size(); ++i) {
        const Leg& leg = track.legs[i];
        if (!(leg.speed > 0.0) || !std::isfinite(leg.speed)) {
            throw std::invalid_argument("node " + std::to_string(node) + " leg " + std::to_string(i) +
                                        ": speed must be positive");
        }
        if (!std::isfinite(leg.target.x) || !std::isfinite(leg.target.y)) {
            throw std::invalid_argument("node " + std::to_string(node) + " leg " + std::to_string(i) +
                                        ": non-finite target");
        }
        if (i > 0) {
            if (leg.depart_at <= track.legs[i - 1].depart_at) {
                throw std::invalid_argument("node " + std::to_string(node) +
                                            ": legs must have strictly increasing depart_at");
            }
            here = advance(track.leg_start[i - 1], track.legs[i - 1], leg.depart_at);
        }
        track.leg_start.push_back(here);
    }
    nodes_.emplace(node, std::move(track));
}

std::vector<NodeId> Mobility::node_ids() const {
    std::vector<NodeId> ids;
    ids.reserve(nodes_.size());
    for (const auto& [id, _] : nodes_) {
        ids.push_back(id);
    }
    return ids;
}

Position Mobility::advance(Position from, const Leg& leg, SimTime t) {
    double elapsed = (t - leg.depart_at).seconds();
    if (elapsed <= 0.0) {
        return from;
    }
    double total = euclidean(from, leg.target);
    double travelled = leg.speed * elapsed;
    if (travelled >= total) {
        return leg.target;
    }
    double f = travelled / total;
    return {from.x + (leg.target.x - from.x) * f, from.y + (leg.target.y - from.y) * f};
}

Position Mobility::position_at(NodeId node, SimTime t) const {
    auto it = nodes_.find(node);
    if (it == nodes_.end()) {
        throw UnknownNodeError(node);
    }
    const Track& track = it->second;
    // last leg whose departure is not after t
    std::size_t active = track.legs.size();
    for (std::size_t i = track.legs.size(); i-- > 0;) {
        if (track.legs[i].depart_at <= t) {
            active = i;
            break;
        }
    }
    if (active == track.legs.size()) {
        return track.initial;
    }
    return advance(track.leg_start[active], track.legs[active], t);
}

double Mobility::distance(NodeId a, NodeId b, SimTime t) const {
    return euclidean(position_at(a, t), position_at(b, t));
}

std::vector<NodeId> Mobility::neighbors(NodeId node, SimTime t, double range) const {
    Position here = position_at(node, t);
    std::vector<NodeId> out;
    for (const auto& [id, _] : nodes_) {
        if (id != node && euclidean(here, position_at(id, t)) <= range) {
            out.push_back(id);
        }
    }
    return out;
}

NeighborGraph Mobility::graph_at(SimTime t, double range) const {
    std::map<NodeId, Position> pos;
    for (const auto& [id, _] : nodes_) {
        pos.emplace(id, position_at(id, t));
    }
    NeighborGraph g;
    for (const auto& [a, pa] : pos) {
        auto& row = g[a];
        for (const auto& [b, pb] : pos) {
            if (a != b && euclidean(pa, pb) <= range) {
                row.insert(b);
            }
        }
    }
    return g;
}

}  // namespace manet
