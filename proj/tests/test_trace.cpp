#include "manetsim/trace.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace manet;

TEST(TraceTest, FormatsFixedColumnsThenFields) {
    TraceRecord r(TraceKind::Drop, 4);
    r.time = SimTime::from_micros(55'125'298);
    r.with("pkt", "data").with("flow", 1).with("cause", "LINK_BREAK");
    EXPECT_EQ(format_record(r), "55.125298\tDROP\t4\tpkt=data\tflow=1\tcause=LINK_BREAK");
}

TEST(TraceTest, RecordRoundTripsEveryKind) {
    for (auto kind : {TraceKind::Send, TraceKind::Recv, TraceKind::Fwd, TraceKind::Drop, TraceKind::Rreq,
                      TraceKind::Rrep, TraceKind::Rerr, TraceKind::Hello, TraceKind::Rtbl, TraceKind::Clst,
                      TraceKind::Dist, TraceKind::End}) {
        TraceRecord r(kind, 17);
        r.time = SimTime::from_micros(123'456);
        r.with("a", "x,y").with("b", std::uint64_t{9});
        EXPECT_EQ(parse_record(format_record(r)), r) << to_string(kind);
        EXPECT_EQ(trace_kind_from_string(to_string(kind)), kind);
    }
}

TEST(TraceTest, RecordWithoutFieldsRoundTrips) {
    TraceRecord r(TraceKind::End, 0);
    EXPECT_EQ(parse_record(format_record(r)), r);
}

TEST(TraceTest, ReservedCharactersInKeysAreRejected) {
    TraceRecord r(TraceKind::Send, 1);
    EXPECT_THROW(r.with("a=b", "1"), TraceFormatError);
    EXPECT_THROW(r.with("a\tb", "1"), TraceFormatError);
    EXPECT_THROW(r.with("a", "x\ny"), TraceFormatError);
}

TEST(TraceTest, AccessorsReportMissingAndNonNumericFields) {
    TraceRecord r(TraceKind::Send, 1);
    r.with("flow", "abc");
    EXPECT_EQ(r.get("flow"), "abc");
    EXPECT_FALSE(r.has("seq"));
    EXPECT_THROW((void)r.at("seq"), TraceFormatError);
    EXPECT_THROW((void)r.int_at("flow"), TraceFormatError);
}

TEST(TraceTest, MalformedLinesAreRejected) {
    for (const char* bad : {"1.0\tSEND", "x\tSEND\t1", "1.0\tBOGUS\t1", "1.0\tSEND\tn", "1.0\tSEND\t1\tnoequals"}) {
        EXPECT_THROW(parse_record(bad), TraceFormatError) << bad;
    }
}

TEST(TraceTest, ReadTraceNamesTheBadLine) {
    std::istringstream in("1.000000\tSEND\t1\tflow=1\n2.000000\tNOPE\t1\n");
    try {
        read_trace(in);
        FAIL() << "expected TraceFormatError";
    } catch (const TraceFormatError& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
    }
}

TEST(TraceTest, WriteReadRoundTrip) {
    std::vector<TraceRecord> trace;
    for (int i = 0; i < 5; ++i) {
        TraceRecord r(TraceKind::Hello, static_cast<NodeId>(i));
        r.time = SimTime::from_micros(i * 250'000);
        r.with("ev", "send").with("seq", i);
        trace.push_back(r);
    }
    std::stringstream io;
    write_trace(io, trace);
    EXPECT_EQ(read_trace(io), trace);
}
