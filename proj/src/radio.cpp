#include "manetsim/radio.hpp"

#include <memory>

namespace manet {

std::string_view payload_label(const Payload& p) {
    struct Visitor {
        std::string_view operator()(const Hello&) const { return "hello"; }
        std::string_view operator()(const Rreq&) const { return "rreq"; }
        std::string_view operator()(const Rrep&) const { return "rrep"; }
        std::string_view operator()(const Rerr&) const { return "rerr"; }
        std::string_view operator()(const DataPacket&) const { return "data"; }
    };
    return std::visit(Visitor{}, p);
}

std::string join_nodes(const std::vector<NodeId>& nodes) {
    std::string out;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (i) {
            out += ',';
        }
        out += std::to_string(nodes[i]);
    }
    return out;
}

Channel::Channel(Kernel& kernel, const Mobility& mobility, RadioParams params)
    : kernel_(kernel), mobility_(mobility), params_(params), loss_rng_(kernel.stream("radio.loss")) {}

std::vector<NodeId> Channel::neighbors(NodeId node) const {
    return mobility_.neighbors(node, kernel_.now(), params_.range);
}

bool Channel::in_range(NodeId a, NodeId b) const {
    return a != b && mobility_.distance(a, b, kernel_.now()) <= params_.range;
}

std::size_t Channel::queue_occupancy(NodeId node) {
    auto& q = outbound_[node];
    while (!q.empty() && q.front() <= kernel_.now()) {
        q.pop_front();
    }
    return q.size();
}

bool Channel::admit(NodeId from) {
    if (queue_occupancy(from) >= params_.queue_capacity) {
        return false;
    }
    outbound_[from].push_back(kernel_.now() + params_.per_hop_latency);
    return true;
}

SendResult Channel::broadcast(NodeId from, Payload payload) {
    if (!admit(from)) {
        return SendResult::QueueOverflow;
    }
    auto frame = std::make_shared<const Frame>(Frame{from, std::move(payload)});
    for (NodeId to : neighbors(from)) {
        if (params_.loss_probability > 0.0 && loss_rng_.uniform() < params_.loss_probability) {
            continue;
        }
        kernel_.schedule_in(params_.per_hop_latency, [this, to, frame]() {
            if (receiver_) {
                receiver_(to, *frame);
            }
        });
    }
    return SendResult::Scheduled;
}

SendResult Channel::unicast(NodeId from, NodeId next_hop, Payload payload) {
    if (queue_occupancy(from) >= params_.queue_capacity) {
        return SendResult::QueueOverflow;
    }
    if (!in_range(from, next_hop)) {
        return SendResult::LinkFailure;
    }
    admit(from);
    bool is_data = std::holds_alternative<DataPacket>(payload);
    if (is_data) {
        ++data_in_flight_;
    }
    kernel_.schedule_in(params_.per_hop_latency,
                        [this, next_hop, is_data, frame = Frame{from, std::move(payload)}]() {
                            if (is_data) {
                                --data_in_flight_;
                            }
                            if (receiver_) {
                                receiver_(next_hop, frame);
                            }
                        });
    return SendResult::Scheduled;
}

}  // namespace manet
