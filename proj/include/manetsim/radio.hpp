#pragma once

#include "manetsim/kernel.hpp"
#include "manetsim/messages.hpp"
#include "manetsim/mobility.hpp"

#include <deque>
#include <functional>
#include <map>

namespace manet {

struct RadioParams {
    double range = 250.0;                   // meters
    SimTime per_hop_latency = SimTime::from_micros(10'000);
    std::uint32_t queue_capacity = 50;      // frames per node
    double loss_probability = 0.0;          // broadcast receptions only

    bool operator==(const RadioParams&) const = default;
};

enum class SendResult {
    Scheduled,
    LinkFailure,    // unicast next hop not in range at transmission time
    QueueOverflow,  // sender's outbound queue full; frame discarded
};

/// Unit-disk channel. Connectivity is evaluated when a frame is handed to the
/// channel; every reception happens exactly per_hop_latency later.
///
/// The outbound queue of a node holds the frames it has transmitted whose
/// receptions are still pending. A frame that would push the queue past
/// queue_capacity is refused.
class Channel {
public:
    using Receiver = std::function<void(NodeId to, const Frame& frame)>;

    Channel(Kernel& kernel, const Mobility& mobility, RadioParams params);

    void set_receiver(Receiver r) { receiver_ = std::move(r); }

    const RadioParams& params() const { return params_; }

    SendResult broadcast(NodeId from, Payload payload);
    SendResult unicast(NodeId from, NodeId next_hop, Payload payload);

    std::vector<NodeId> neighbors(NodeId node) const;
    bool in_range(NodeId a, NodeId b) const;

    std::size_t queue_occupancy(NodeId node);

    /// Data packets handed to the channel whose reception is still pending.
    std::size_t data_in_flight() const { return data_in_flight_; }

private:
    bool admit(NodeId from);

    Kernel& kernel_;
    const Mobility& mobility_;
    RadioParams params_;
    Rng loss_rng_;
    Receiver receiver_;
    std::map<NodeId, std::deque<SimTime>> outbound_;  // completion times
    std::size_t data_in_flight_ = 0;
};

}  // namespace manet
