#pragma once

#include "manetsim/kernel.hpp"
#include "manetsim/messages.hpp"
#include "manetsim/radio.hpp"
#include "manetsim/routing_table.hpp"

#include <deque>
#include <functional>
#include <map>
#include <string_view>
#include <utility>

namespace manet {

/// Protocol constants. Defaults are the commonly published AODV values.
struct AodvConfig {
    SimTime hello_interval = SimTime::from_micros(1'000'000);
    std::uint32_t allowed_hello_loss = 2;
    SimTime active_route_timeout = SimTime::from_micros(3'000'000);
    std::uint32_t ttl_start = 1;
    std::uint32_t ttl_increment = 2;
    std::uint32_t ttl_threshold = 7;
    std::uint32_t net_diameter = 35;
    std::uint32_t rreq_retries = 2;  // attempts after the first
    std::uint32_t traversal_factor = 20;
    SimTime seen_cache_lifetime = SimTime::from_micros(3'000'000);
    std::uint32_t pending_buffer_capacity = 64;
    SimTime buffer_timeout = SimTime::from_micros(30'000'000);
    bool intermediate_reply = true;

    SimTime neighbor_timeout() const { return hello_interval * allowed_hello_loss; }

    /// Expanding ring: ttl_start, +ttl_increment while <= ttl_threshold, then
    /// net_diameter.
    std::uint32_t ttl_for_attempt(std::uint32_t attempt) const;

    SimTime reply_wait(std::uint32_t ttl, SimTime per_hop_latency) const {
        return per_hop_latency * (2LL * ttl * traversal_factor);
    }

    bool operator==(const AodvConfig&) const = default;
};

enum class DropCause {
    NoRoute,
    NoRouteForwarding,
    LinkBreak,
    QueueOverflow,
    TtlExpired,
    BufferTimeout,
    LoopDetected,
};

std::string_view to_string(DropCause cause);

/// Per-node AODV state machine.
///
/// All inputs arrive through the kernel: frame receptions, timer expiries and
/// data originations. Every observable step is written to the kernel trace.
class AodvAgent {
public:
    /// Decides whether this node may relay discovery traffic (rebroadcast a
    /// request or answer one from its cache). Always true unless clustering
    /// constrains forwarding.
    using RelayPolicy = std::function<bool()>;

    AodvAgent(NodeId self, AodvConfig config, Kernel& kernel, Channel& channel);

    AodvAgent(const AodvAgent&) = delete;
    AodvAgent& operator=(const AodvAgent&) = delete;

    /// Starts periodic hellos with a seeded phase offset.
    void start();

    void set_relay_policy(RelayPolicy policy) { relay_policy_ = std::move(policy); }

    /// Sends packet from this node. Throws std::invalid_argument when
    /// addressed to self.
    void originate_data(DataPacket packet);

    void receive(const Frame& frame);

    NodeId id() const { return self_; }
    SeqNum own_seq() const { return own_seq_; }
    const RoutingTable& routes() const { return routes_; }
    const AodvConfig& config() const { return config_; }
    bool discovery_pending(NodeId destination) const;
    std::size_t buffered_packets() const;
    std::vector<NodeId> neighbor_ids() const;

private:
    struct NeighborRecord {
        SimTime last_heard;
        EventHandle timeout;
    };

    struct Buffered {
        std::uint64_t token;
        DataPacket packet;
        EventHandle timeout;
    };

    struct Discovery {
        bool active = false;
        std::uint32_t attempt = 0;
        EventHandle wait;
        std::deque<Buffered> queue;
    };

    SimTime now() const { return kernel_.now(); }
    void trace(TraceRecord record) { kernel_.emit(std::move(record)); }
    bool may_relay() const { return !relay_policy_ || relay_policy_(); }

    void expire_routes();
    UpdateOutcome offer_route(const RouteOffer& offer);
    void invalidate(RouteEntry& entry, SeqNum seq, std::string_view reason);

    bool broadcast(Payload payload);
    void on_hello_timer();
    void note_neighbor(NodeId neighbor);
    void on_neighbor_timeout(NodeId neighbor);

    void handle_hello(const Hello& hello, NodeId from);
    void handle_rreq(const Rreq& rreq, NodeId from);
    void handle_rrep(const Rrep& rrep, NodeId from);
    void handle_rerr(const Rerr& rerr, NodeId from);
    void handle_data(DataPacket packet, NodeId from);

    void send_data(DataPacket packet, bool relay);
    void send_rrep(const Rrep& rrep, NodeId next_hop, std::string_view ev, std::string_view extra_key = {},
                   std::string_view extra_value = {});
    void send_rerr(const std::vector<std::pair<NodeId, SeqNum>>& unreachable, std::string_view ev);

    void buffer_packet(DataPacket packet);
    void start_route_discovery(NodeId destination);
    void send_rreq(NodeId destination, Discovery& d);
    void on_discovery_timeout(NodeId destination);
    void flush_buffer(NodeId destination);
    void on_buffer_timeout(NodeId destination, std::uint64_t token);

    void detect_link_break(NodeId lost);
    void drop(const DataPacket& packet, DropCause cause);
    void drop_control(std::string_view pkt, DropCause cause);

    NodeId self_;
    AodvConfig config_;
    Kernel& kernel_;
    Channel& channel_;
    RelayPolicy relay_policy_;

    SeqNum own_seq_;
    std::uint32_t rreq_counter_ = 0;
    std::uint64_t buffer_token_ = 0;
    RoutingTable routes_;
    std::map<NodeId, NeighborRecord> neighbors_;
    std::map<std::pair<NodeId, std::uint32_t>, SimTime> seen_;
    std::map<NodeId, Discovery> discoveries_;
    std::optional<SimTime> last_broadcast_;
    EventHandle hello_timer_;
};

std::string format_unreachable(const std::vector<std::pair<NodeId, SeqNum>>& list);

}  // namespace manet
