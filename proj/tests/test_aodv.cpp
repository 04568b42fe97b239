#include "manetsim/aodv.hpp"
#include "manetsim/mobility.hpp"
#include "manetsim/radio.hpp"

#include <gtest/gtest.h>

#include <map>
#include <memory>

using namespace manet;

namespace {

SimTime s(double v) { return SimTime::from_seconds(v); }

// Static nodes on a line, 200 m apart, wired straight to their agents.
struct Line {
    explicit Line(int n, AodvConfig cfg = {}, std::uint64_t seed = 1) : kernel(seed) {
        for (int i = 0; i < n; ++i) mobility.add_node(static_cast<NodeId>(i), {200.0 * i, 0});
        channel = std::make_unique<Channel>(kernel, mobility, RadioParams{});
        channel->set_receiver([this](NodeId to, const Frame& f) { agents.at(to)->receive(f); });
        for (int i = 0; i < n; ++i) {
            auto id = static_cast<NodeId>(i);
            agents[id] = std::make_unique<AodvAgent>(id, cfg, kernel, *channel);
        }
    }

    void start() {
        for (auto& [_, a] : agents) a->start();
    }

    void send(NodeId src, NodeId dst, std::uint64_t seq = 1) {
        DataPacket p;
        p.flow_id = 1;
        p.packet_seq = seq;
        p.src = src;
        p.dst = dst;
        p.payload_bytes = 64;
        p.created_at = kernel.now();
        agents.at(src)->originate_data(p);
    }

    std::vector<TraceRecord> select(TraceKind kind, std::string_view ev = {}) const {
        std::vector<TraceRecord> out;
        for (const auto& r : kernel.trace()) {
            if (r.kind == kind && (ev.empty() || r.get("ev") == ev)) out.push_back(r);
        }
        return out;
    }

    Kernel kernel;
    Mobility mobility;
    std::unique_ptr<Channel> channel;
    std::map<NodeId, std::unique_ptr<AodvAgent>> agents;
};

}  // namespace

TEST(AodvConfigTest, ExpandingRingSchedule) {
    AodvConfig c;
    std::vector<std::uint32_t> ttls;
    for (std::uint32_t a = 0; a < 6; ++a) ttls.push_back(c.ttl_for_attempt(a));
    EXPECT_EQ(ttls, (std::vector<std::uint32_t>{1, 3, 5, 7, 35, 35}));
}

TEST(AodvConfigTest, ReplyWaitScalesWithTtl) {
    AodvConfig c;
    EXPECT_EQ(c.reply_wait(1, s(0.01)), s(0.4));
    EXPECT_EQ(c.reply_wait(3, s(0.01)), s(1.2));
    EXPECT_EQ(c.neighbor_timeout(), s(2));
}

TEST(AodvTest, SelfAddressedPacketIsRejected) {
    Line net(2);
    EXPECT_THROW(net.send(0, 0), std::invalid_argument);
}

TEST(AodvTest, NeighborLearnedFromHelloNeedsNoDiscovery) {
    Line net(2);
    net.start();
    net.kernel.run_until(s(3));
    ASSERT_NE(net.agents[0]->routes().lookup(1, net.kernel.now()), nullptr);
    net.send(0, 1);
    net.kernel.run_until(s(4));
    EXPECT_TRUE(net.select(TraceKind::Rreq).empty());
    auto recv = net.select(TraceKind::Recv);
    ASSERT_EQ(recv.size(), 1u);
    EXPECT_EQ(recv[0].node, 1u);
    EXPECT_EQ(recv[0].get("path"), "0");
}

TEST(AodvTest, MissingRouteBuffersAndStartsRingAtTtlOne) {
    Line net(3);
    net.send(0, 2);
    EXPECT_EQ(net.agents[0]->buffered_packets(), 1u);
    EXPECT_TRUE(net.agents[0]->discovery_pending(2));
    auto orig = net.select(TraceKind::Rreq, "orig");
    ASSERT_EQ(orig.size(), 1u);
    EXPECT_EQ(orig[0].get("ttl"), "1");
    EXPECT_EQ(orig[0].get("dst"), "2");
}

TEST(AodvTest, SecondPacketJoinsPendingDiscovery) {
    Line net(3);
    net.send(0, 2, 1);
    net.send(0, 2, 2);
    EXPECT_EQ(net.agents[0]->buffered_packets(), 2u);
    EXPECT_EQ(net.select(TraceKind::Rreq, "orig").size(), 1u);
}

TEST(AodvTest, DiscoveryDeliversBufferedPacketsOverTwoHops) {
    Line net(3);
    net.send(0, 2, 1);
    net.send(0, 2, 2);
    net.kernel.run_until(s(5));
    auto orig = net.select(TraceKind::Rreq, "orig");
    ASSERT_EQ(orig.size(), 2u);
    EXPECT_EQ(orig[1].get("ttl"), "3");
    auto recv = net.select(TraceKind::Recv);
    ASSERT_EQ(recv.size(), 2u);
    EXPECT_EQ(recv[0].get("path"), "0,1");
    EXPECT_EQ(net.agents[0]->buffered_packets(), 0u);
    EXPECT_EQ(net.agents[0]->routes().find(2)->hop_count, 2u);
}

TEST(AodvTest, UnreachableDestinationExhaustsRetriesThenDrops) {
    Line net(2);
    net.mobility.add_node(9, {5000, 0});
    net.agents[9] = std::make_unique<AodvAgent>(9, AodvConfig{}, net.kernel, *net.channel);
    net.send(0, 9);
    net.kernel.run_until(s(20));
    auto orig = net.select(TraceKind::Rreq, "orig");
    ASSERT_EQ(orig.size(), 3u);
    EXPECT_EQ(orig[0].get("ttl"), "1");
    EXPECT_EQ(orig[1].get("ttl"), "3");
    EXPECT_EQ(orig[2].get("ttl"), "5");
    auto drops = net.select(TraceKind::Drop);
    ASSERT_EQ(drops.size(), 1u);
    EXPECT_EQ(drops[0].get("cause"), "NO_ROUTE");
    EXPECT_FALSE(net.agents[0]->discovery_pending(9));
}

TEST(AodvTest, BufferTimeoutDropsWaitingPacket) {
    AodvConfig cfg;
    cfg.buffer_timeout = s(0.1);
    Line net(2, cfg);
    net.mobility.add_node(9, {5000, 0});
    net.agents[9] = std::make_unique<AodvAgent>(9, cfg, net.kernel, *net.channel);
    net.send(0, 9);
    net.kernel.run_until(s(1));
    auto drops = net.select(TraceKind::Drop);
    ASSERT_EQ(drops.size(), 1u);
    EXPECT_EQ(drops[0].get("cause"), "BUFFER_TIMEOUT");
    EXPECT_EQ(drops[0].time, s(0.1));
}

TEST(AodvTest, EachNodeRelaysARequestAtMostOnce) {
    Line net(6);
    net.start();
    net.kernel.run_until(s(0.05));
    net.send(0, 5);
    net.kernel.run_until(s(10));
    std::map<std::tuple<NodeId, std::string, std::string>, int> relays;
    for (const auto& r : net.select(TraceKind::Rreq, "fwd")) {
        ++relays[{r.node, std::string(r.at("orig")), std::string(r.at("id"))}];
    }
    ASSERT_FALSE(relays.empty());
    for (const auto& [key, n] : relays) EXPECT_EQ(n, 1);
}

TEST(AodvTest, IntermediateReplyFromCacheCanBeDisabled) {
    for (bool enabled : {true, false}) {
        AodvConfig cfg;
        cfg.intermediate_reply = enabled;
        Line net(4, cfg);
        net.start();
        net.kernel.run_until(s(3));
        net.send(1, 3, 1);  // node 1 learns a route to 3
        net.kernel.run_until(s(4));
        net.send(0, 3, 2);  // node 1 can now answer for 3
        net.kernel.run_until(s(6));
        int cache = 0;
        for (const auto& r : net.select(TraceKind::Rrep, "send")) cache += r.get("src") == "cache";
        EXPECT_EQ(cache > 0, enabled) << "intermediate_reply=" << enabled;
        EXPECT_EQ(net.select(TraceKind::Recv).size(), 2u);
    }
}

TEST(AodvTest, LostNeighborInvalidatesRouteAndRaisesError) {
    Line net(3);
    net.start();
    net.kernel.run_until(s(0.05));
    net.send(0, 2);
    net.kernel.run_until(s(3));
    ASSERT_EQ(net.select(TraceKind::Recv).size(), 1u);
    // Pull node 2 out of range; node 1 stops hearing it.
    net.mobility = Mobility{};
    net.mobility.add_node(0, {0, 0});
    net.mobility.add_node(1, {200, 0});
    net.mobility.add_node(2, {4000, 0});
    net.kernel.run_until(s(8));
    const RouteEntry* at1 = net.agents[1]->routes().find(2);
    ASSERT_NE(at1, nullptr);
    EXPECT_EQ(at1->state, RouteState::Invalid);
    EXPECT_FALSE(net.select(TraceKind::Rerr).empty());
}
