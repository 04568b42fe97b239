#include "manetsim/aodv.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace manet {

namespace {

std::string seq_or_unknown(const std::optional<SeqNum>& s) {
    return s ? std::to_string(s->value()) : std::string("unknown");
}

}  // namespace

std::uint32_t AodvConfig::ttl_for_attempt(std::uint32_t attempt) const {
    std::uint64_t ttl = ttl_start + static_cast<std::uint64_t>(attempt) * ttl_increment;
    if (ttl > ttl_threshold) {
        return net_diameter;
    }
    return static_cast<std::uint32_t>(ttl);
}

std::string_view to_string(DropCause cause) {
    switch (cause) {
    case DropCause::NoRoute: return "NO_ROUTE";
    case DropCause::NoRouteForwarding: return "NO_ROUTE_FORWARDING";
    case DropCause::LinkBreak: return "LINK_BREAK";
    case DropCause::QueueOverflow: return "QUEUE_OVERFLOW";
    case DropCause::TtlExpired: return "TTL_EXPIRED";
    case DropCause::BufferTimeout: return "BUFFER_TIMEOUT";
    case DropCause::LoopDetected: return "LOOP_DETECTED";
    }
    return "?";
}

std::string format_unreachable(const std::vector<std::pair<NodeId, SeqNum>>& list) {
    std::string out;
    for (std::size_t i = 0; i < list.size(); ++i) {
        if (i) {
            out += ',';
        }
        out += std::to_string(list[i].first) + ":" + std::to_string(list[i].second.value());
    }
    return out;
}

AodvAgent::AodvAgent(NodeId self, AodvConfig config, Kernel& kernel, Channel& channel)
    : self_(self), config_(config), kernel_(kernel), channel_(channel) {}

void AodvAgent::start() {
    Rng rng = kernel_.stream("aodv.hello." + std::to_string(self_));
    auto span = static_cast<std::uint64_t>(config_.hello_interval.micros());
    auto offset = SimTime::from_micros(static_cast<std::int64_t>(rng.uniform_int(0, span - 1)));
    hello_timer_ = kernel_.schedule_in(offset, [this]() { on_hello_timer(); });
}

bool AodvAgent::discovery_pending(NodeId destination) const {
    auto it = discoveries_.find(destination);
    return it != discoveries_.end() && it->second.active;
}

std::size_t AodvAgent::buffered_packets() const {
    std::size_t n = 0;
    for (const auto& [_, d] : discoveries_) {
        n += d.queue.size();
    }
    return n;
}

std::vector<NodeId> AodvAgent::neighbor_ids() const {
    std::vector<NodeId> out;
    for (const auto& [id, _] : neighbors_) {
        out.push_back(id);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Route table bookkeeping

void AodvAgent::expire_routes() {
    for (const auto& [dst, entry] : routes_.entries()) {
        if (entry.state == RouteState::Valid && entry.expires_at <= now()) {
            // Treated like a break: bump the sequence number so stale copies
            // held elsewhere cannot be taken back.
            RouteEntry* e = routes_.find(dst);
            invalidate(*e, e->dest_seq.next(), "expire");
        }
    }
}

void AodvAgent::invalidate(RouteEntry& entry, SeqNum seq, std::string_view reason) {
    entry.state = RouteState::Invalid;
    entry.dest_seq = seq;
    trace(TraceRecord(TraceKind::Rtbl, self_)
              .with("op", reason)
              .with("dst", entry.destination)
              .with("next", entry.next_hop)
              .with("hops", entry.hop_count)
              .with("seq", entry.dest_seq.value()));
}

UpdateOutcome AodvAgent::offer_route(const RouteOffer& offer) {
    UpdateOutcome outcome = routes_.update(offer, now());
    std::string_view op;
    switch (outcome) {
    case UpdateOutcome::Installed: op = "add"; break;
    case UpdateOutcome::Replaced: op = "update"; break;
    case UpdateOutcome::Stale: op = "stale"; break;
    case UpdateOutcome::Rejected: return outcome;
    }
    trace(TraceRecord(TraceKind::Rtbl, self_)
              .with("op", op)
              .with("dst", offer.destination)
              .with("next", offer.next_hop)
              .with("hops", offer.hop_count)
              .with("seq", offer.seq.value()));
    return outcome;
}

// ---------------------------------------------------------------------------
// Hellos and neighbor liveness

bool AodvAgent::broadcast(Payload payload) {
    std::string_view label = payload_label(payload);
    if (channel_.broadcast(self_, std::move(payload)) == SendResult::QueueOverflow) {
        drop_control(label, DropCause::QueueOverflow);
        return false;
    }
    last_broadcast_ = now();
    return true;
}

void AodvAgent::on_hello_timer() {
    expire_routes();
    bool recently_heard = last_broadcast_ && now() - *last_broadcast_ < config_.hello_interval;
    if (!recently_heard) {
        if (broadcast(Hello{self_, own_seq_})) {
            trace(TraceRecord(TraceKind::Hello, self_).with("ev", "send").with("seq", own_seq_.value()));
        }
    }
    hello_timer_ = kernel_.schedule_in(config_.hello_interval, [this]() { on_hello_timer(); });
}

void AodvAgent::note_neighbor(NodeId neighbor) {
    auto& rec = neighbors_[neighbor];
    rec.last_heard = now();
    kernel_.cancel(rec.timeout);
    rec.timeout = kernel_.schedule_in(config_.neighbor_timeout(), [this, neighbor]() { on_neighbor_timeout(neighbor); });
    RouteEntry* e = routes_.find(neighbor);
    if (e != nullptr && e->usable(now()) && e->next_hop == neighbor && e->hop_count == 1) {
        e->expires_at = std::max(e->expires_at, now() + config_.neighbor_timeout());
    }
}

void AodvAgent::on_neighbor_timeout(NodeId neighbor) {
    // The hello route to the neighbor expires at this same instant; break it
    // before expiry sweeps it so precursors still hear about it.
    neighbors_.erase(neighbor);
    detect_link_break(neighbor);
    expire_routes();
}

void AodvAgent::handle_hello(const Hello& hello, NodeId from) {
    RouteOffer offer{from, hello.originator_seq, 1, from, now() + config_.neighbor_timeout()};
    offer_route(offer);
}

// ---------------------------------------------------------------------------
// Link breaks and route errors

void AodvAgent::detect_link_break(NodeId lost) {
    std::vector<std::pair<NodeId, SeqNum>> unreachable;
    std::set<NodeId> notify;
    for (const auto& [dst, entry] : routes_.entries()) {
        if (entry.state == RouteState::Valid && entry.next_hop == lost) {
            RouteEntry* e = routes_.find(dst);
            invalidate(*e, e->dest_seq.next(), "invalidate");
            unreachable.emplace_back(dst, e->dest_seq);
            notify.insert(e->precursors.begin(), e->precursors.end());
        }
    }
    notify.erase(lost);
    if (!unreachable.empty() && !notify.empty()) {
        send_rerr(unreachable, "send");
    }
}

void AodvAgent::send_rerr(const std::vector<std::pair<NodeId, SeqNum>>& unreachable, std::string_view ev) {
    if (broadcast(Rerr{unreachable})) {
        trace(TraceRecord(TraceKind::Rerr, self_).with("ev", ev).with("dests", format_unreachable(unreachable)));
    }
}

void AodvAgent::handle_rerr(const Rerr& rerr, NodeId from) {
    trace(TraceRecord(TraceKind::Rerr, self_)
              .with("ev", "recv")
              .with("from", from)
              .with("dests", format_unreachable(rerr.unreachable)));
    std::vector<std::pair<NodeId, SeqNum>> unreachable;
    std::set<NodeId> notify;
    for (const auto& [dst, seq] : rerr.unreachable) {
        RouteEntry* e = routes_.find(dst);
        if (e == nullptr || !e->usable(now()) || e->next_hop != from) {
            continue;
        }
        invalidate(*e, newest(e->dest_seq.next(), seq), "invalidate");
        unreachable.emplace_back(dst, e->dest_seq);
        notify.insert(e->precursors.begin(), e->precursors.end());
    }
    notify.erase(from);
    if (!unreachable.empty() && !notify.empty()) {
        send_rerr(unreachable, "fwd");
    }
}

// ---------------------------------------------------------------------------
// Data path

void AodvAgent::originate_data(DataPacket packet) {
    if (packet.dst == self_) {
        throw std::invalid_argument("node " + std::to_string(self_) + " cannot send data to itself");
    }
    expire_routes();
    packet.src = self_;
    packet.created_at = now();
    packet.hop_trace = {self_};
    trace(TraceRecord(TraceKind::Send, self_)
              .with("flow", packet.flow_id)
              .with("seq", packet.packet_seq)
              .with("src", packet.src)
              .with("dst", packet.dst)
              .with("bytes", packet.payload_bytes));
    if (routes_.lookup(packet.dst, now()) != nullptr) {
        send_data(std::move(packet), false);
    } else {
        buffer_packet(std::move(packet));
    }
}

void AodvAgent::send_data(DataPacket packet, bool relay) {
    const RouteEntry* route = routes_.lookup(packet.dst, now());
    NodeId next = route->next_hop;
    NodeId dst = packet.dst;
    TraceRecord fwd(TraceKind::Fwd, self_);
    if (relay) {
        fwd.with("flow", packet.flow_id)
            .with("seq", packet.packet_seq)
            .with("src", packet.src)
            .with("dst", packet.dst)
            .with("next", next)
            .with("path", join_nodes(packet.hop_trace));
    }
    DataPacket copy_for_drop;
    copy_for_drop.flow_id = packet.flow_id;
    copy_for_drop.packet_seq = packet.packet_seq;
    copy_for_drop.src = packet.src;
    copy_for_drop.dst = packet.dst;
    switch (channel_.unicast(self_, next, std::move(packet))) {
    case SendResult::Scheduled:
        routes_.refresh(dst, now() + config_.active_route_timeout, now());
        routes_.refresh(next, now() + config_.active_route_timeout, now());
        if (relay) {
            trace(std::move(fwd));
        }
        break;
    case SendResult::LinkFailure:
        drop(copy_for_drop, DropCause::LinkBreak);
        if (auto it = neighbors_.find(next); it != neighbors_.end()) {
            kernel_.cancel(it->second.timeout);
            neighbors_.erase(it);
        }
        detect_link_break(next);
        break;
    case SendResult::QueueOverflow:
        drop(copy_for_drop, DropCause::QueueOverflow);
        break;
    }
}

void AodvAgent::handle_data(DataPacket packet, NodeId from) {
    if (packet.dst == self_) {
        trace(TraceRecord(TraceKind::Recv, self_)
                  .with("flow", packet.flow_id)
                  .with("seq", packet.packet_seq)
                  .with("src", packet.src)
                  .with("latency", now() - packet.created_at)
                  .with("hops", static_cast<std::uint64_t>(packet.hop_trace.size()))
                  .with("path", join_nodes(packet.hop_trace)));
        return;
    }
    if (std::find(packet.hop_trace.begin(), packet.hop_trace.end(), self_) != packet.hop_trace.end()) {
        drop(packet, DropCause::LoopDetected);
        return;
    }
    if (packet.hop_trace.size() >= config_.net_diameter) {
        drop(packet, DropCause::TtlExpired);
        return;
    }
    packet.hop_trace.push_back(self_);
    RouteEntry* route = routes_.find(packet.dst);
    if (route == nullptr || !route->usable(now())) {
        drop(packet, DropCause::NoRouteForwarding);
        SeqNum seq = route != nullptr ? route->dest_seq : SeqNum{};
        send_rerr({{packet.dst, seq}}, "send");
        return;
    }
    route->precursors.insert(from);
    send_data(std::move(packet), true);
}

void AodvAgent::drop(const DataPacket& packet, DropCause cause) {
    trace(TraceRecord(TraceKind::Drop, self_)
              .with("pkt", "data")
              .with("flow", packet.flow_id)
              .with("seq", packet.packet_seq)
              .with("src", packet.src)
              .with("dst", packet.dst)
              .with("cause", to_string(cause)));
}

void AodvAgent::drop_control(std::string_view pkt, DropCause cause) {
    trace(TraceRecord(TraceKind::Drop, self_).with("pkt", pkt).with("cause", to_string(cause)));
}

// ---------------------------------------------------------------------------
// Route discovery

void AodvAgent::buffer_packet(DataPacket packet) {
    NodeId dst = packet.dst;
    Discovery& d = discoveries_[dst];
    if (d.queue.size() >= config_.pending_buffer_capacity) {
        drop(packet, DropCause::QueueOverflow);
    } else {
        std::uint64_t token = ++buffer_token_;
        EventHandle timeout = kernel_.schedule_in(config_.buffer_timeout,
                                                  [this, dst, token]() { on_buffer_timeout(dst, token); });
        d.queue.push_back(Buffered{token, std::move(packet), timeout});
    }
    if (!d.active) {
        start_route_discovery(dst);
    }
}

void AodvAgent::start_route_discovery(NodeId destination) {
    Discovery& d = discoveries_[destination];
    if (d.active) {
        return;
    }
    d.active = true;
    d.attempt = 0;
    send_rreq(destination, d);
}

void AodvAgent::send_rreq(NodeId destination, Discovery& d) {
    own_seq_ = own_seq_.next();
    std::uint32_t id = ++rreq_counter_;
    std::uint32_t ttl = config_.ttl_for_attempt(d.attempt);
    Rreq rreq{id, self_, own_seq_, destination, std::nullopt, 0, ttl};
    if (const RouteEntry* e = routes_.find(destination); e != nullptr && e->seq_known) {
        rreq.dest_seq = e->dest_seq;
    }
    seen_[{self_, id}] = now() + config_.seen_cache_lifetime;
    trace(TraceRecord(TraceKind::Rreq, self_)
              .with("ev", "orig")
              .with("orig", self_)
              .with("id", id)
              .with("dst", destination)
              .with("ttl", ttl)
              .with("hops", 0)
              .with("oseq", own_seq_.value())
              .with("dseq", seq_or_unknown(rreq.dest_seq))
              .with("attempt", d.attempt));
    broadcast(rreq);
    SimTime wait = config_.reply_wait(ttl, channel_.params().per_hop_latency);
    d.wait = kernel_.schedule_in(wait, [this, destination]() { on_discovery_timeout(destination); });
}

void AodvAgent::on_discovery_timeout(NodeId destination) {
    expire_routes();
    auto it = discoveries_.find(destination);
    if (it == discoveries_.end() || !it->second.active) {
        return;
    }
    Discovery& d = it->second;
    if (routes_.lookup(destination, now()) != nullptr) {
        flush_buffer(destination);
        return;
    }
    if (d.attempt < config_.rreq_retries) {
        ++d.attempt;
        send_rreq(destination, d);
        return;
    }
    std::deque<Buffered> queue = std::move(d.queue);
    discoveries_.erase(it);
    for (auto& b : queue) {
        kernel_.cancel(b.timeout);
        drop(b.packet, DropCause::NoRoute);
    }
}

void AodvAgent::flush_buffer(NodeId destination) {
    auto it = discoveries_.find(destination);
    if (it == discoveries_.end()) {
        return;
    }
    kernel_.cancel(it->second.wait);
    std::deque<Buffered> queue = std::move(it->second.queue);
    discoveries_.erase(it);
    for (auto& b : queue) {
        kernel_.cancel(b.timeout);
        if (routes_.lookup(destination, now()) != nullptr) {
            send_data(std::move(b.packet), false);
        } else {
            drop(b.packet, DropCause::NoRoute);
        }
    }
}

void AodvAgent::on_buffer_timeout(NodeId destination, std::uint64_t token) {
    auto it = discoveries_.find(destination);
    if (it == discoveries_.end()) {
        return;
    }
    auto& q = it->second.queue;
    auto pos = std::find_if(q.begin(), q.end(), [token](const Buffered& b) { return b.token == token; });
    if (pos == q.end()) {
        return;
    }
    DataPacket packet = std::move(pos->packet);
    q.erase(pos);
    drop(packet, DropCause::BufferTimeout);
}

void AodvAgent::handle_rreq(const Rreq& rreq, NodeId from) {
    if (rreq.originator == self_) {
        return;
    }
    auto key = std::make_pair(rreq.originator, rreq.rreq_id);
    TraceRecord rec(TraceKind::Rreq, self_);
    rec.with("orig", rreq.originator)
        .with("id", rreq.rreq_id)
        .with("dst", rreq.destination)
        .with("ttl", rreq.ttl)
        .with("hops", rreq.hop_count)
        .with("oseq", rreq.originator_seq.value())
        .with("dseq", seq_or_unknown(rreq.dest_seq))
        .with("from", from);
    if (auto it = seen_.find(key); it != seen_.end() && it->second > now()) {
        rec.fields.insert(rec.fields.begin(), {"ev", "dup"});
        trace(std::move(rec));
        return;
    }
    if (seen_.size() > 512) {
        std::erase_if(seen_, [this](const auto& kv) { return kv.second <= now(); });
    }
    seen_[key] = now() + config_.seen_cache_lifetime;
    rec.fields.insert(rec.fields.begin(), {"ev", "recv"});
    trace(std::move(rec));

    RouteOffer reverse{rreq.originator, rreq.originator_seq, rreq.hop_count + 1, from,
                       now() + config_.active_route_timeout};
    offer_route(reverse);
    const RouteEntry* back = routes_.lookup(rreq.originator, now());
    if (back == nullptr) {
        // Our own entry for the originator is fresher and unusable; cannot answer.
        return;
    }
    if (back->next_hop == from) {
        routes_.refresh(rreq.originator, now() + config_.active_route_timeout, now());
    }

    if (rreq.destination == self_) {
        if (rreq.dest_seq) {
            own_seq_ = newest(own_seq_, *rreq.dest_seq);
        }
        Rrep rrep{self_, own_seq_, rreq.originator, 0, config_.active_route_timeout * 2, rreq.rreq_id};
        send_rrep(rrep, back->next_hop, "send", "src", "dest");
        return;
    }

    bool relay = may_relay();
    if (relay && config_.intermediate_reply) {
        RouteEntry* fwd = routes_.find(rreq.destination);
        RouteEntry* rev = routes_.find(rreq.originator);
        // A cached route leading back toward the requester would close a loop.
        if (fwd != nullptr && fwd->usable(now()) && fwd->seq_known && fwd->next_hop != from &&
            fwd->next_hop != rev->next_hop && (!rreq.dest_seq || !rreq.dest_seq->newer_than(fwd->dest_seq))) {
            fwd->precursors.insert(rev->next_hop);
            rev->precursors.insert(fwd->next_hop);
            Rrep rrep{rreq.destination, fwd->dest_seq, rreq.originator, fwd->hop_count, fwd->expires_at - now(),
                      rreq.rreq_id};
            send_rrep(rrep, rev->next_hop, "send", "src", "cache");
            return;
        }
    }
    if (relay && rreq.ttl > 1) {
        Rreq next = rreq;
        next.ttl -= 1;
        next.hop_count += 1;
        if (broadcast(next)) {
            trace(TraceRecord(TraceKind::Rreq, self_)
                      .with("ev", "fwd")
                      .with("orig", next.originator)
                      .with("id", next.rreq_id)
                      .with("dst", next.destination)
                      .with("ttl", next.ttl)
                      .with("hops", next.hop_count));
        }
    } else if (rreq.ttl <= 1) {
        trace(TraceRecord(TraceKind::Rreq, self_)
                  .with("ev", "expire")
                  .with("orig", rreq.originator)
                  .with("id", rreq.rreq_id)
                  .with("dst", rreq.destination));
    }
}

void AodvAgent::send_rrep(const Rrep& rrep, NodeId next_hop, std::string_view ev, std::string_view extra_key,
                          std::string_view extra_value) {
    TraceRecord rec(TraceKind::Rrep, self_);
    rec.with("ev", ev)
        .with("orig", rrep.originator)
        .with("dst", rrep.destination)
        .with("dseq", rrep.dest_seq.value())
        .with("hops", rrep.hop_count)
        .with("id", rrep.rreq_id)
        .with("next", next_hop);
    if (!extra_key.empty()) {
        rec.with(std::string(extra_key), extra_value);
    }
    switch (channel_.unicast(self_, next_hop, rrep)) {
    case SendResult::Scheduled:
        trace(std::move(rec));
        break;
    case SendResult::LinkFailure:
        drop_control("rrep", DropCause::LinkBreak);
        if (auto it = neighbors_.find(next_hop); it != neighbors_.end()) {
            kernel_.cancel(it->second.timeout);
            neighbors_.erase(it);
        }
        detect_link_break(next_hop);
        break;
    case SendResult::QueueOverflow:
        drop_control("rrep", DropCause::QueueOverflow);
        break;
    }
}

void AodvAgent::handle_rrep(const Rrep& rrep, NodeId from) {
    std::uint32_t hops = rrep.hop_count + 1;
    trace(TraceRecord(TraceKind::Rrep, self_)
              .with("ev", "recv")
              .with("orig", rrep.originator)
              .with("dst", rrep.destination)
              .with("dseq", rrep.dest_seq.value())
              .with("hops", hops)
              .with("id", rrep.rreq_id)
              .with("from", from));
    if (rrep.destination == self_) {
        return;
    }
    RouteOffer offer{rrep.destination, rrep.dest_seq, hops, from, now() + rrep.lifetime};
    UpdateOutcome outcome = offer_route(offer);

    if (rrep.originator == self_) {
        if (routes_.lookup(rrep.destination, now()) != nullptr) {
            flush_buffer(rrep.destination);
        }
        return;
    }

    RouteEntry* fwd = routes_.find(rrep.destination);
    bool carries_offer = accepted(outcome) ||
                         (fwd != nullptr && fwd->usable(now()) && fwd->dest_seq == rrep.dest_seq && fwd->hop_count == hops);
    if (!carries_offer) {
        trace(TraceRecord(TraceKind::Rrep, self_)
                  .with("ev", "suppress")
                  .with("orig", rrep.originator)
                  .with("dst", rrep.destination)
                  .with("id", rrep.rreq_id));
        return;
    }
    RouteEntry* rev = routes_.find(rrep.originator);
    if (rev == nullptr || !rev->usable(now())) {
        trace(TraceRecord(TraceKind::Rrep, self_)
                  .with("ev", "orphan")
                  .with("orig", rrep.originator)
                  .with("dst", rrep.destination)
                  .with("id", rrep.rreq_id));
        return;
    }
    fwd->precursors.insert(rev->next_hop);
    rev->precursors.insert(from);
    rev->expires_at = std::max(rev->expires_at, now() + config_.active_route_timeout);
    Rrep next = rrep;
    next.hop_count = hops;
    send_rrep(next, rev->next_hop, "fwd");
}

// ---------------------------------------------------------------------------

void AodvAgent::receive(const Frame& frame) {
    expire_routes();
    note_neighbor(frame.sender);
    std::visit(
        [&](const auto& msg) {
            using T = std::decay_t<decltype(msg)>;
            if constexpr (std::is_same_v<T, Hello>) {
                handle_hello(msg, frame.sender);
            } else if constexpr (std::is_same_v<T, Rreq>) {
                handle_rreq(msg, frame.sender);
            } else if constexpr (std::is_same_v<T, Rrep>) {
                handle_rrep(msg, frame.sender);
            } else if constexpr (std::is_same_v<T, Rerr>) {
                handle_rerr(msg, frame.sender);
            } else {
                handle_data(msg, frame.sender);
            }
        },
        frame.payload);
}

}  // namespace manet
