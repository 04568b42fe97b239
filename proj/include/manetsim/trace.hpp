#pragma once

#include "manetsim/sim_time.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace manet {

enum class TraceKind {
    Send,   // data packet originated at its source
    Recv,   // data packet delivered to its destination
    Fwd,    // data packet relayed by an intermediate node
    Drop,
    Rreq,
    Rrep,
    Rerr,
    Hello,
    Rtbl,   // routing table change
    Clst,   // cluster role change or formation
    Dist,   // distance sample
    End,    // end-of-run census
};

std::string_view to_string(TraceKind kind);
std::optional<TraceKind> trace_kind_from_string(std::string_view text);

/// One timestamped simulation event. Serialized as a single tab-separated
/// line: time (6 decimals), kind, node, then key=value pairs in insertion
/// order.
struct TraceRecord {
    SimTime time;
    TraceKind kind = TraceKind::Send;
    NodeId node = 0;
    std::vector<std::pair<std::string, std::string>> fields;

    TraceRecord() = default;
    TraceRecord(TraceKind k, NodeId n) : kind(k), node(n) {}

    TraceRecord& with(std::string key, std::string value);
    TraceRecord& with(std::string key, std::string_view value) {
        return with(std::move(key), std::string(value));
    }
    TraceRecord& with(std::string key, const char* value) {
        return with(std::move(key), std::string(value));
    }
    TraceRecord& with(std::string key, std::int64_t value) {
        return with(std::move(key), std::to_string(value));
    }
    TraceRecord& with(std::string key, std::uint64_t value) {
        return with(std::move(key), std::to_string(value));
    }
    TraceRecord& with(std::string key, std::uint32_t value) {
        return with(std::move(key), std::to_string(value));
    }
    TraceRecord& with(std::string key, int value) {
        return with(std::move(key), std::to_string(value));
    }
    TraceRecord& with(std::string key, SimTime value) { return with(std::move(key), value.str()); }

    /// First value stored under key, if any.
    std::optional<std::string_view> get(std::string_view key) const;
    bool has(std::string_view key) const { return get(key).has_value(); }

    /// Value under key; throws TraceFormatError when missing.
    std::string_view at(std::string_view key) const;
    std::int64_t int_at(std::string_view key) const;

    bool operator==(const TraceRecord&) const = default;
};

class TraceFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string format_record(const TraceRecord& record);

/// Parses one serialized line. Throws TraceFormatError describing the defect.
TraceRecord parse_record(std::string_view line);

void write_trace(std::ostream& out, const std::vector<TraceRecord>& trace);

/// Reads a whole trace. Errors carry the 1-based line number.
std::vector<TraceRecord> read_trace(std::istream& in);

}  // namespace manet
