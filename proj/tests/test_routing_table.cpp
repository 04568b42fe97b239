#include "oracles.hpp"

#include "manetsim/routing_table.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace manet;

namespace {

const SimTime kNow = SimTime::from_micros(10'000'000);
const SimTime kLater = SimTime::from_micros(15'000'000);

RouteOffer offer(std::uint32_t seq, std::uint32_t hops, NodeId next, SimTime until = kLater) {
    return {7, SeqNum(seq), hops, next, until};
}

}  // namespace

TEST(SeqNumTest, NewerUsesSignedDifference) {
    EXPECT_TRUE(SeqNum(5).newer_than(SeqNum(4)));
    EXPECT_FALSE(SeqNum(4).newer_than(SeqNum(4)));
    EXPECT_TRUE(SeqNum(0).newer_than(SeqNum(0xFFFFFFFF)));
    EXPECT_FALSE(SeqNum(0xFFFFFFFF).newer_than(SeqNum(0)));
    EXPECT_EQ(newest(SeqNum(0xFFFFFFFE), SeqNum(1)), SeqNum(1));
}

TEST(SeqNumTest, AgreesWithRingDistanceOracle) {
    std::mt19937 rng(3);
    for (int i = 0; i < 100'000; ++i) {
        std::uint32_t a = rng(), b = rng();
        ASSERT_EQ(SeqNum(a).newer_than(SeqNum(b)), oracle::seq_newer(a, b)) << a << " " << b;
    }
}

TEST(RoutingTableTest, FirstOfferInstalls) {
    RoutingTable t;
    EXPECT_EQ(t.update(offer(3, 2, 1), kNow), UpdateOutcome::Installed);
    const RouteEntry* e = t.lookup(7, kNow);
    ASSERT_NE(e, nullptr);
    EXPECT_EQ(e->next_hop, 1u);
    EXPECT_EQ(e->hop_count, 2u);
    EXPECT_TRUE(e->seq_known);
}

TEST(RoutingTableTest, NewerSequenceWinsDespiteMoreHops) {
    RoutingTable t;
    t.update(offer(10, 2, 1), kNow);
    EXPECT_EQ(t.update(offer(12, 5, 2), kNow), UpdateOutcome::Replaced);
    EXPECT_EQ(t.find(7)->next_hop, 2u);
}

TEST(RoutingTableTest, EqualSequenceFewerHopsWins) {
    RoutingTable t;
    t.update(offer(10, 3, 1), kNow);
    EXPECT_EQ(t.update(offer(10, 2, 2), kNow), UpdateOutcome::Replaced);
    EXPECT_EQ(t.update(offer(10, 2, 3), kNow), UpdateOutcome::Rejected);
    EXPECT_EQ(t.find(7)->next_hop, 2u);
}

TEST(RoutingTableTest, OlderSequenceIsStale) {
    RoutingTable t;
    t.update(offer(10, 3, 1), kNow);
    EXPECT_EQ(t.update(offer(9, 1, 2), kNow), UpdateOutcome::Stale);
    EXPECT_EQ(t.find(7)->next_hop, 1u);
}

TEST(RoutingTableTest, WrappedSequenceCountsAsNewer) {
    RoutingTable t;
    t.update(offer(0xFFFFFFFF, 3, 1), kNow);
    EXPECT_EQ(t.update(offer(0, 4, 2), kNow), UpdateOutcome::Replaced);
}

TEST(RoutingTableTest, InvalidEntryAcceptsOfferThatIsNotOlder) {
    RoutingTable t;
    t.update(offer(10, 2, 1), kNow);
    t.find(7)->state = RouteState::Invalid;
    EXPECT_EQ(t.update(offer(9, 1, 2), kNow), UpdateOutcome::Stale);
    EXPECT_EQ(t.update(offer(10, 6, 3), kNow), UpdateOutcome::Replaced);
    EXPECT_EQ(t.find(7)->state, RouteState::Valid);
}

TEST(RoutingTableTest, InvalidEntryAcceptsDirectRouteToDestination) {
    RoutingTable t;
    t.update(offer(10, 2, 1), kNow);
    t.find(7)->state = RouteState::Invalid;
    EXPECT_EQ(t.update(offer(4, 1, 7), kNow), UpdateOutcome::Replaced);
}

TEST(RoutingTableTest, ExpiredEntryBehavesLikeInvalid) {
    RoutingTable t;
    t.update(offer(10, 2, 1, kNow + SimTime::from_micros(1)), kNow);
    SimTime after = kNow + SimTime::from_micros(5);
    EXPECT_EQ(t.lookup(7, after), nullptr);
    EXPECT_EQ(t.update(offer(10, 4, 2, after + SimTime::from_micros(100)), after), UpdateOutcome::Replaced);
}

TEST(RoutingTableTest, PrecursorsSurviveReplacement) {
    RoutingTable t;
    t.update(offer(10, 2, 1), kNow);
    t.find(7)->precursors.insert(4);
    t.update(offer(11, 2, 2), kNow);
    EXPECT_EQ(t.find(7)->precursors, (std::set<NodeId>{4}));
}

TEST(RoutingTableTest, RefreshOnlyExtends) {
    RoutingTable t;
    t.update(offer(10, 2, 1, kLater), kNow);
    t.refresh(7, kNow + SimTime::from_micros(1), kNow);
    EXPECT_EQ(t.find(7)->expires_at, kLater);
    t.refresh(7, kLater + SimTime::from_micros(1), kNow);
    EXPECT_EQ(t.find(7)->expires_at, kLater + SimTime::from_micros(1));
}

// Whatever order a fixed set of offers arrives in, the surviving entry is the
// lexicographic maximum under (newer sequence, fewer hops).
TEST(RoutingTableTest, FinalEntryIsArgmaxUnderAnyPermutation) {
    std::mt19937_64 rng(21);
    for (int round = 0; round < 300; ++round) {
        std::vector<RouteOffer> offers;
        std::uint32_t base = static_cast<std::uint32_t>(rng());
        for (int i = 0; i < 6; ++i) {
            offers.push_back(offer(base + static_cast<std::uint32_t>(rng() % 4),
                                   1 + static_cast<std::uint32_t>(rng() % 6), static_cast<NodeId>(i + 1)));
        }
        auto better = [](const RouteOffer& a, const RouteOffer& b) {
            return oracle::seq_newer(a.seq.value(), b.seq.value()) ||
                   (a.seq == b.seq && a.hop_count < b.hop_count);
        };
        RouteOffer best = offers[0];
        for (const auto& o : offers) {
            if (better(o, best)) best = o;
        }
        for (int perm = 0; perm < 10; ++perm) {
            std::shuffle(offers.begin(), offers.end(), rng);
            RoutingTable t;
            for (const auto& o : offers) t.update(o, kNow);
            const RouteEntry* e = t.find(7);
            ASSERT_EQ(e->dest_seq, best.seq);
            ASSERT_EQ(e->hop_count, best.hop_count);
        }
    }
}
