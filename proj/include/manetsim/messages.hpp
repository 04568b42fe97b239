#pragma once

#include "manetsim/sim_time.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace manet {

/// 32-bit sequence number with wrap-aware ordering: a is newer than b when
/// the signed difference a - b is positive.
class SeqNum {
public:
    constexpr SeqNum() = default;
    constexpr explicit SeqNum(std::uint32_t v) : value_(v) {}

    constexpr std::uint32_t value() const { return value_; }

    constexpr bool newer_than(SeqNum other) const {
        return static_cast<std::int32_t>(value_ - other.value_) > 0;
    }

    constexpr SeqNum next() const { return SeqNum(value_ + 1); }

    constexpr bool operator==(const SeqNum&) const = default;

private:
    std::uint32_t value_ = 0;
};

/// The newer of two sequence numbers (a on ties).
constexpr SeqNum newest(SeqNum a, SeqNum b) { return b.newer_than(a) ? b : a; }

struct Hello {
    NodeId originator = 0;
    SeqNum originator_seq;
};

struct Rreq {
    std::uint32_t rreq_id = 0;
    NodeId originator = 0;
    SeqNum originator_seq;
    NodeId destination = 0;
    std::optional<SeqNum> dest_seq;  // unknown when empty
    std::uint32_t hop_count = 0;
    std::uint32_t ttl = 1;
};

struct Rrep {
    NodeId destination = 0;
    SeqNum dest_seq;
    NodeId originator = 0;
    std::uint32_t hop_count = 0;
    SimTime lifetime;
    std::uint32_t rreq_id = 0;  // the request being answered, for trace correlation
};

struct Rerr {
    std::vector<std::pair<NodeId, SeqNum>> unreachable;
};

struct DataPacket {
    std::uint32_t flow_id = 0;
    std::uint64_t packet_seq = 0;
    NodeId src = 0;
    NodeId dst = 0;
    std::uint32_t payload_bytes = 0;
    SimTime created_at;
    std::vector<NodeId> hop_trace;  // src first, then each relay
};

using Payload = std::variant<Hello, Rreq, Rrep, Rerr, DataPacket>;

/// A message on the air, tagged with the transmitting node.
struct Frame {
    NodeId sender = 0;
    Payload payload;
};

/// Short packet-type label used in trace records.
std::string_view payload_label(const Payload& p);

std::string join_nodes(const std::vector<NodeId>& nodes);

}  // namespace manet
