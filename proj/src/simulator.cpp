#include "manetsim/simulator.hpp"

#include <algorithm>
#include <cstdio>

namespace manet {

namespace {

// Heads pairwise non-adjacent and every other node next to a Head.
bool roles_consistent(const ClusterView& view, const NeighborGraph& graph) {
    for (const auto& [id, role] : view.roles) {
        const auto& adj = graph.at(id);
        bool head_near = std::any_of(adj.begin(), adj.end(),
                                     [&](NodeId n) { return view.roles.at(n).kind == ClusterRole::Kind::Head; });
        switch (role.kind) {
        case ClusterRole::Kind::Undecided: return false;
        case ClusterRole::Kind::Head:
            if (head_near) return false;
            break;
        default:
            if (!head_near) return false;
        }
    }
    return true;
}

std::string join_ids(const std::set<NodeId>& ids) {
    std::string out;
    for (NodeId id : ids) {
        if (!out.empty()) out += ',';
        out += std::to_string(id);
    }
    return out;
}

}  // namespace

Simulator::Simulator(const Scenario& scenario, RunOptions options)
    : scenario_(scenario),
      end_(options.until.value_or(scenario.sim_end)),
      mode_(options.cluster_mode.value_or(scenario.cluster_mode)),
      options_(options),
      kernel_(options.seed.value_or(scenario.seed)) {
    validate_scenario(scenario_);
    if (end_ < SimTime{}) {
        throw std::invalid_argument("run end time must not be negative");
    }
    std::map<NodeId, std::vector<Leg>> legs;
    for (const auto& w : scenario_.waypoints) {
        legs[w.node] = w.legs;
    }
    for (const auto& n : scenario_.nodes) {
        mobility_.add_node(n.id, n.initial, legs[n.id]);
    }
    if (options_.dist_ref && !mobility_.contains(*options_.dist_ref)) {
        throw UnknownNodeError(*options_.dist_ref);
    }
    if (options_.dist_interval <= SimTime{}) {
        throw std::invalid_argument("distance sample interval must be positive");
    }

    channel_ = std::make_unique<Channel>(kernel_, mobility_, scenario_.radio);
    for (const auto& n : scenario_.nodes) {
        agents_.emplace(n.id, std::make_unique<AodvAgent>(n.id, scenario_.aodv, kernel_, *channel_));
    }
    channel_->set_receiver([this](NodeId to, const Frame& frame) { agents_.at(to)->receive(frame); });

    if (mode_ == ClusterMode::Forwarding) {
        for (auto& [id, agent] : agents_) {
            NodeId self = id;
            agent->set_relay_policy([this, self]() {
                auto it = view_.roles.find(self);
                return it != view_.roles.end() && it->second.is_backbone();
            });
        }
    }

    for (auto& [_, agent] : agents_) {
        agent->start();
    }
    if (mode_ != ClusterMode::Off) {
        kernel_.schedule(SimTime{}, [this] { sample_clusters(); });
    }
    if (options_.dist_ref) {
        kernel_.schedule(SimTime{}, [this] { sample_distances(); });
    }
    for (std::size_t i = 0; i < scenario_.flows.size(); ++i) {
        flow_times_.push_back(origination_times(scenario_.flows[i]));
        schedule_flow(i, 0);
    }
}

AodvAgent& Simulator::agent(NodeId node) {
    auto it = agents_.find(node);
    if (it == agents_.end()) {
        throw UnknownNodeError(node);
    }
    return *it->second;
}

std::size_t Simulator::data_in_flight() const {
    std::size_t buffered = 0;
    for (const auto& [_, a] : agents_) {
        buffered += a->buffered_packets();
    }
    return buffered + channel_->data_in_flight();
}

void Simulator::schedule_flow(std::size_t flow_index, std::size_t packet_index) {
    const auto& times = flow_times_[flow_index];
    if (packet_index >= times.size() || times[packet_index] > end_) {
        return;
    }
    kernel_.schedule(times[packet_index], [this, flow_index, packet_index] {
        const FlowSpec& f = scenario_.flows[flow_index];
        DataPacket p;
        p.flow_id = f.flow_id;
        p.packet_seq = packet_index;
        p.src = f.src;
        p.dst = f.dst;
        p.payload_bytes = f.payload_bytes;
        agents_.at(f.src)->originate_data(std::move(p));
        schedule_flow(flow_index, packet_index + 1);
    });
}

void Simulator::sample_clusters() {
    NeighborGraph graph = mobility_.graph_at(kernel_.now(), scenario_.radio.range);
    ClusterView next = identify_gateways(elect_clusters(graph, view_.heads()), graph);
    next.formed_at = view_.formed_at;
    for (const auto& [id, role] : next.roles) {
        auto old = view_.roles.find(id);
        if (old == view_.roles.end() || old->second != role) {
            kernel_.emit(TraceRecord(TraceKind::Clst, id).with("ev", "role").with("role", role.str()));
        }
    }
    view_ = std::move(next);
    if (!formed_ && is_connected(graph) && roles_consistent(view_, graph)) {
        formed_ = true;
        view_.formed_at = kernel_.now();
        NodeId first = view_.roles.begin()->first;
        kernel_.emit(TraceRecord(TraceKind::Clst, first).with("ev", "formed").with("heads", join_ids(view_.heads())));
    }
    kernel_.schedule_in(scenario_.cluster_interval, [this] { sample_clusters(); });
}

void Simulator::sample_distances() {
    NodeId ref = *options_.dist_ref;
    SimTime now = kernel_.now();
    Position r = mobility_.position_at(ref, now);
    for (NodeId n : mobility_.node_ids()) {
        if (n == ref) continue;
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6f", euclidean(mobility_.position_at(n, now), r));
        kernel_.emit(TraceRecord(TraceKind::Dist, n).with("ref", ref).with("distance", std::string(buf)));
    }
    kernel_.schedule_in(options_.dist_interval, [this] { sample_distances(); });
}

void Simulator::run_until(SimTime t) {
    kernel_.run_until(std::min(t, end_));
}

const RunResult& Simulator::finish() {
    if (result_) {
        return *result_;
    }
    kernel_.run_until(end_);
    std::size_t buffered = 0;
    for (const auto& [_, a] : agents_) {
        buffered += a->buffered_packets();
    }
    std::size_t airborne = channel_->data_in_flight();
    kernel_.emit(TraceRecord(TraceKind::End, scenario_.nodes.front().id)
                     .with("inflight", static_cast<std::uint64_t>(buffered + airborne))
                     .with("buffered", static_cast<std::uint64_t>(buffered))
                     .with("airborne", static_cast<std::uint64_t>(airborne)));
    RunResult r;
    r.trace = kernel_.trace();
    r.metrics = compute_metrics(r.trace);
    r.end = end_;
    result_ = std::move(r);
    return *result_;
}

RunResult run_scenario(const Scenario& scenario, RunOptions options) {
    Simulator sim(scenario, std::move(options));
    return sim.finish();
}

}  // namespace manet
