#include "manetsim/kernel.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace manet;

namespace {

SimTime s(double v) { return SimTime::from_seconds(v); }

}  // namespace

TEST(SimTimeTest, FormatsSixDecimals) {
    EXPECT_EQ(SimTime::from_micros(10'491'251).str(), "10.491251");
    EXPECT_EQ(SimTime{}.str(), "0.000000");
    EXPECT_EQ(SimTime::from_micros(-1'500'000).str(), "-1.500000");
}

TEST(SimTimeTest, ParsesWithoutFloatingPoint) {
    EXPECT_EQ(SimTime::parse("7.325251").micros(), 7'325'251);
    EXPECT_EQ(SimTime::parse("12.5").micros(), 12'500'000);
    EXPECT_EQ(SimTime::parse("3").micros(), 3'000'000);
    EXPECT_EQ(SimTime::parse("0.000001").micros(), 1);
    for (const char* bad : {"", "abc", "1.2.3", "1.0000001", "-", "."}) {
        EXPECT_THROW(SimTime::parse(bad), std::invalid_argument) << bad;
    }
}

TEST(SimTimeTest, FormatParseRoundTrip) {
    for (std::int64_t us : {0LL, 1LL, 999'999LL, 1'000'000LL, 123'456'789LL}) {
        auto t = SimTime::from_micros(us);
        EXPECT_EQ(SimTime::parse(t.str()), t);
    }
}

TEST(KernelTest, SimultaneousEventsFireInInsertionOrder) {
    Kernel k;
    std::vector<char> order;
    k.schedule(s(1.0), [&] { order.push_back('a'); });
    k.schedule(s(1.0), [&] { order.push_back('b'); });
    k.schedule(s(0.5), [&] { order.push_back('c'); });
    k.run_until(s(2.0));
    EXPECT_EQ(order, (std::vector<char>{'c', 'a', 'b'}));
}

TEST(KernelTest, CancelledEventNeverFires) {
    Kernel k;
    int hits = 0;
    auto h = k.schedule(s(1.0), [&] { ++hits; });
    EXPECT_TRUE(k.pending(h));
    EXPECT_TRUE(k.cancel(h));
    EXPECT_FALSE(k.cancel(h));
    EXPECT_FALSE(k.cancel(EventHandle{}));
    k.run_until(s(2.0));
    EXPECT_EQ(hits, 0);
}

TEST(KernelTest, SchedulingInThePastIsRejected) {
    Kernel k;
    k.run_until(s(5.0));
    EXPECT_THROW(k.schedule(s(4.0), [] {}), SchedulingError);
    EXPECT_NO_THROW(k.schedule(s(5.0), [] {}));
    EXPECT_THROW(k.run_until(s(1.0)), SchedulingError);
}

TEST(KernelTest, RunUntilIsInclusiveAndAdvancesClock) {
    Kernel k;
    bool fired_at_end = false;
    bool fired_after = false;
    k.schedule(s(3.0), [&] { fired_at_end = true; });
    k.schedule(s(3.000001), [&] { fired_after = true; });
    k.run_until(s(3.0));
    EXPECT_TRUE(fired_at_end);
    EXPECT_FALSE(fired_after);
    EXPECT_EQ(k.now(), s(3.0));
    EXPECT_EQ(k.pending_count(), 1u);
}

TEST(KernelTest, EmptyQueueJustMovesClock) {
    Kernel k;
    auto out = k.run_until(s(10.0));
    EXPECT_TRUE(out.empty());
    EXPECT_EQ(k.now(), s(10.0));
}

TEST(KernelTest, EventsScheduledDuringDispatchRunInSameCall) {
    Kernel k;
    std::vector<SimTime> seen;
    k.schedule(s(1.0), [&] {
        seen.push_back(k.now());
        k.schedule_in(s(0.5), [&] { seen.push_back(k.now()); });
    });
    k.run_until(s(2.0));
    EXPECT_EQ(seen, (std::vector<SimTime>{s(1.0), s(1.5)}));
}

TEST(KernelTest, RunUntilReturnsRecordsStampedWithClock) {
    Kernel k;
    k.schedule(s(1.25), [&] { k.emit(TraceRecord(TraceKind::Hello, 3).with("ev", "send")); });
    auto out = k.run_until(s(2.0));
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].time, s(1.25));
    EXPECT_EQ(k.trace().size(), 1u);
    EXPECT_TRUE(k.run_until(s(3.0)).empty());
}

TEST(KernelTest, ClockNeverDecreasesAcrossHandlers) {
    Kernel k(9);
    Rng rng(9);
    SimTime last;
    bool monotone = true;
    for (int i = 0; i < 500; ++i) {
        k.schedule(SimTime::from_micros(static_cast<std::int64_t>(rng.uniform_int(0, 1'000'000))), [&] {
            monotone = monotone && k.now() >= last;
            last = k.now();
        });
    }
    k.run_until(s(1.0));
    EXPECT_TRUE(monotone);
}

TEST(RngTest, SameSeedSameSequence) {
    Rng a(42), b(42), c(43);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        auto x = a.next();
        EXPECT_EQ(x, b.next());
        differs = differs || x != c.next();
    }
    EXPECT_TRUE(differs);
}

TEST(RngTest, NamedStreamsAreIndependentAndReproducible) {
    EXPECT_EQ(Rng::derive(1, "radio.loss").next(), Rng::derive(1, "radio.loss").next());
    EXPECT_NE(Rng::derive(1, "radio.loss").next(), Rng::derive(1, "aodv.hello.0").next());
    EXPECT_NE(Rng::derive(1, "radio.loss").next(), Rng::derive(2, "radio.loss").next());
}

TEST(RngTest, UniformStaysInRange) {
    Rng r(7);
    for (int i = 0; i < 10'000; ++i) {
        double u = r.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        auto k = r.uniform_int(3, 5);
        ASSERT_GE(k, 3u);
        ASSERT_LE(k, 5u);
    }
}
