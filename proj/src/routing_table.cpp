#include "manetsim/routing_table.hpp"

#include <algorithm>

namespace manet {

bool offer_wins(const RouteEntry* stored, const RouteOffer& offer, SimTime now) {
    if (stored == nullptr || !stored->seq_known) {
        return true;
    }
    if (!stored->usable(now)) {
        // A dead entry only yields to information that is not older, except
        // for a direct link to the destination itself.
        return !stored->dest_seq.newer_than(offer.seq) || offer.next_hop == offer.destination;
    }
    if (offer.seq.newer_than(stored->dest_seq)) {
        return true;
    }
    return offer.seq == stored->dest_seq && offer.hop_count < stored->hop_count;
}

UpdateOutcome RoutingTable::update(const RouteOffer& offer, SimTime now) {
    auto it = entries_.find(offer.destination);
    RouteEntry* stored = it == entries_.end() ? nullptr : &it->second;
    if (!offer_wins(stored, offer, now)) {
        return stored->dest_seq.newer_than(offer.seq) ? UpdateOutcome::Stale : UpdateOutcome::Rejected;
    }
    if (stored == nullptr) {
        RouteEntry e;
        e.destination = offer.destination;
        e.next_hop = offer.next_hop;
        e.dest_seq = offer.seq;
        e.seq_known = true;
        e.hop_count = offer.hop_count;
        e.expires_at = offer.expires_at;
        e.state = RouteState::Valid;
        entries_.emplace(offer.destination, std::move(e));
        return UpdateOutcome::Installed;
    }
    bool was_usable = stored->usable(now);
    stored->next_hop = offer.next_hop;
    stored->dest_seq = offer.seq;
    stored->seq_known = true;
    stored->hop_count = offer.hop_count;
    stored->expires_at = was_usable ? std::max(stored->expires_at, offer.expires_at) : offer.expires_at;
    stored->state = RouteState::Valid;
    return UpdateOutcome::Replaced;
}

const RouteEntry* RoutingTable::find(NodeId destination) const {
    auto it = entries_.find(destination);
    return it == entries_.end() ? nullptr : &it->second;
}

RouteEntry* RoutingTable::find(NodeId destination) {
    auto it = entries_.find(destination);
    return it == entries_.end() ? nullptr : &it->second;
}

const RouteEntry* RoutingTable::lookup(NodeId destination, SimTime now) const {
    const RouteEntry* e = find(destination);
    return e != nullptr && e->usable(now) ? e : nullptr;
}

void RoutingTable::refresh(NodeId destination, SimTime until, SimTime now) {
    RouteEntry* e = find(destination);
    if (e != nullptr && e->usable(now)) {
        e->expires_at = std::max(e->expires_at, until);
    }
}

}  // namespace manet
