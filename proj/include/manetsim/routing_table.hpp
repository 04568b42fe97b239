#pragma once

#include "manetsim/messages.hpp"
#include "manetsim/sim_time.hpp"

#include <map>
#include <optional>
#include <set>

namespace manet {

enum class RouteState { Valid, Invalid };

/// Next-hop record for one destination. The next_hop field is the "pointer"
/// a node follows toward the destination.
struct RouteEntry {
    NodeId destination = 0;
    NodeId next_hop = 0;
    SeqNum dest_seq;
    bool seq_known = false;
    std::uint32_t hop_count = 0;
    SimTime expires_at;
    RouteState state = RouteState::Invalid;
    std::set<NodeId> precursors;

    bool usable(SimTime now) const { return state == RouteState::Valid && expires_at > now; }
};

/// Outcome of offering a route to the table.
enum class UpdateOutcome {
    Installed,  // no previous entry
    Replaced,   // previous entry overwritten
    Stale,      // rejected: offered sequence number older than stored
    Rejected,   // rejected: same sequence number, not fewer hops
};

constexpr bool accepted(UpdateOutcome o) { return o == UpdateOutcome::Installed || o == UpdateOutcome::Replaced; }

struct RouteOffer {
    NodeId destination = 0;
    SeqNum seq;
    std::uint32_t hop_count = 1;
    NodeId next_hop = 0;
    SimTime expires_at;
};

/// True when an offer must replace the stored entry.
///
/// Against a usable entry the offer wins iff its sequence number is newer, or
/// equal with fewer hops. An absent entry, or one with an unknown sequence
/// number, is always replaced. An Invalid or expired entry is replaced by any
/// offer whose sequence number is not older, and by a direct one-hop route to
/// the destination.
bool offer_wins(const RouteEntry* stored, const RouteOffer& offer, SimTime now);

class RoutingTable {
public:
    /// Applies the freshness rule. On acceptance the entry takes the offered
    /// next hop, hop count and sequence number, becomes Valid, and its
    /// lifetime is extended to at least offer.expires_at. Precursors survive.
    UpdateOutcome update(const RouteOffer& offer, SimTime now);

    const RouteEntry* find(NodeId destination) const;
    RouteEntry* find(NodeId destination);

    /// Entry only if usable at now.
    const RouteEntry* lookup(NodeId destination, SimTime now) const;

    /// Extends a usable entry's lifetime to at least until.
    void refresh(NodeId destination, SimTime until, SimTime now);

    const std::map<NodeId, RouteEntry>& entries() const { return entries_; }

private:
    std::map<NodeId, RouteEntry> entries_;
};

}  // namespace manet
