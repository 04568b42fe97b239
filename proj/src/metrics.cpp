#include "manetsim/metrics.hpp"

#include "manetsim/aodv.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <sstream>

namespace manet {

namespace {

constexpr DropCause kAllCauses[] = {DropCause::NoRoute,       DropCause::NoRouteForwarding, DropCause::LinkBreak,
                                    DropCause::QueueOverflow, DropCause::TtlExpired,        DropCause::BufferTimeout,
                                    DropCause::LoopDetected};

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

template <typename T, typename F>
std::string or_undefined(const std::optional<T>& v, F fmt) {
    return v ? fmt(*v) : std::string("undefined");
}

}  // namespace

std::uint64_t MetricsReport::dropped_total() const {
    std::uint64_t n = 0;
    for (const auto& [_, c] : drops) {
        n += c;
    }
    return n;
}

bool MetricsReport::conserved() const {
    return in_flight && sent == delivered + dropped_total() + *in_flight;
}

SimTime nearest_rank(std::vector<SimTime> values, double p) {
    if (values.empty() || !(p > 0.0 && p <= 100.0)) {
        throw std::invalid_argument("nearest_rank: empty sample or percentile outside (0, 100]");
    }
    std::sort(values.begin(), values.end());
    auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(values.size())));
    rank = std::clamp<std::size_t>(rank, 1, values.size());
    return values[rank - 1];
}

MetricsReport compute_metrics(const std::vector<TraceRecord>& trace) {
    MetricsReport m;
    for (DropCause c : kAllCauses) {
        m.drops[std::string(to_string(c))] = 0;
    }
    std::map<std::uint32_t, FlowMetrics> flows;
    std::vector<SimTime> latencies;
    // (source, destination) pairs -> earliest RREP arrival at that source
    std::map<std::pair<NodeId, NodeId>, SimTime> first_reply;

    for (const auto& r : trace) {
        switch (r.kind) {
        case TraceKind::Send: {
            ++m.sent;
            auto id = static_cast<std::uint32_t>(r.int_at("flow"));
            auto& f = flows[id];
            f.flow_id = id;
            f.src = static_cast<NodeId>(r.int_at("src"));
            f.dst = static_cast<NodeId>(r.int_at("dst"));
            ++f.sent;
            break;
        }
        case TraceKind::Recv: {
            ++m.delivered;
            ++flows[static_cast<std::uint32_t>(r.int_at("flow"))].delivered;
            try {
                latencies.push_back(SimTime::parse(r.at("latency")));
            } catch (const std::invalid_argument& e) {
                throw TraceFormatError(e.what());
            }
            break;
        }
        case TraceKind::Drop: {
            auto cause = std::string(r.at("cause"));
            if (r.at("pkt") == "data") {
                auto it = m.drops.find(cause);
                if (it == m.drops.end()) {
                    throw TraceFormatError("unknown drop cause '" + cause + "'");
                }
                ++it->second;
            } else {
                ++m.control_drops;
            }
            break;
        }
        case TraceKind::Rreq: {
            auto ev = r.at("ev");
            if (ev == "orig") {
                ++m.rreq;
                if (!m.routing_started_at) {
                    m.routing_started_at = r.time;
                }
            } else if (ev == "fwd") {
                ++m.rreq;
            }
            break;
        }
        case TraceKind::Rrep: {
            auto ev = r.at("ev");
            if (ev == "send" || ev == "fwd") {
                ++m.rrep;
            } else if (ev == "orphan") {
                ++m.reply_orphaned;
            } else if (ev == "recv" && static_cast<NodeId>(r.int_at("orig")) == r.node) {
                auto key = std::make_pair(r.node, static_cast<NodeId>(r.int_at("dst")));
                first_reply.emplace(key, r.time);
            }
            break;
        }
        case TraceKind::Rerr: {
            auto ev = r.at("ev");
            if (ev == "send" || ev == "fwd") {
                ++m.rerr;
            }
            break;
        }
        case TraceKind::Hello:
            if (r.at("ev") == "send") {
                ++m.hello;
            }
            break;
        case TraceKind::Rtbl:
            if (r.at("op") == "stale") {
                ++m.stale_rejections;
            }
            break;
        case TraceKind::Clst:
            if (r.at("ev") == "formed" && !m.cluster_formed_at) {
                m.cluster_formed_at = r.time;
            }
            break;
        case TraceKind::End:
            m.in_flight = static_cast<std::uint64_t>(r.int_at("inflight"));
            break;
        case TraceKind::Fwd:
        case TraceKind::Dist:
            break;
        }
    }

    if (m.sent > 0) {
        m.delivery_ratio = static_cast<double>(m.delivered) / static_cast<double>(m.sent);
    }
    if (!latencies.empty()) {
        double sum = 0.0;
        for (SimTime t : latencies) {
            sum += t.seconds();
        }
        m.latency_mean = sum / static_cast<double>(latencies.size());
        m.latency_p50 = nearest_rank(latencies, 50.0);
        m.latency_p95 = nearest_rank(latencies, 95.0);
    }
    for (auto& [id, f] : flows) {
        if (auto it = first_reply.find({f.src, f.dst}); it != first_reply.end()) {
            f.first_route_at = it->second;
        }
        m.flows.push_back(f);
    }
    return m;
}

std::string MetricsReport::to_kv() const {
    auto time_str = [](SimTime t) { return t.str(); };
    std::ostringstream out;
    out << "sent=" << sent << '\n';
    out << "delivered=" << delivered << '\n';
    out << "dropped=" << dropped_total() << '\n';
    for (const auto& [cause, n] : drops) {
        out << "dropped." << cause << '=' << n << '\n';
    }
    out << "in_flight=" << or_undefined(in_flight, [](std::uint64_t v) { return std::to_string(v); }) << '\n';
    out << "delivery_ratio=" << or_undefined(delivery_ratio, fixed6) << '\n';
    out << "latency_mean=" << or_undefined(latency_mean, fixed6) << '\n';
    out << "latency_p50=" << or_undefined(latency_p50, time_str) << '\n';
    out << "latency_p95=" << or_undefined(latency_p95, time_str) << '\n';
    out << "control.rreq=" << rreq << '\n';
    out << "control.rrep=" << rrep << '\n';
    out << "control.rerr=" << rerr << '\n';
    out << "control.hello=" << hello << '\n';
    out << "control.dropped=" << control_drops << '\n';
    out << "stale_rejections=" << stale_rejections << '\n';
    out << "reply_orphaned=" << reply_orphaned << '\n';
    out << "routing_started_at=" << or_undefined(routing_started_at, time_str) << '\n';
    out << "cluster_formed_at=" << or_undefined(cluster_formed_at, time_str) << '\n';
    for (const auto& f : flows) {
        std::string p = "flow." + std::to_string(f.flow_id) + ".";
        out << p << "src=" << f.src << '\n';
        out << p << "dst=" << f.dst << '\n';
        out << p << "sent=" << f.sent << '\n';
        out << p << "delivered=" << f.delivered << '\n';
        out << p << "first_route_at=" << or_undefined(f.first_route_at, time_str) << '\n';
    }
    return out.str();
}

std::string MetricsReport::to_json() const {
    using nlohmann::json;
    auto opt_time = [](const std::optional<SimTime>& t) { return t ? json(t->seconds()) : json(nullptr); };
    json j;
    j["sent"] = sent;
    j["delivered"] = delivered;
    j["dropped"] = dropped_total();
    j["dropped_by_cause"] = drops;
    j["in_flight"] = in_flight ? json(*in_flight) : json(nullptr);
    j["delivery_ratio"] = delivery_ratio ? json(*delivery_ratio) : json(nullptr);
    j["latency_mean"] = latency_mean ? json(*latency_mean) : json(nullptr);
    j["latency_p50"] = opt_time(latency_p50);
    j["latency_p95"] = opt_time(latency_p95);
    j["control"] = {{"rreq", rreq}, {"rrep", rrep}, {"rerr", rerr}, {"hello", hello}, {"dropped", control_drops}};
    j["stale_rejections"] = stale_rejections;
    j["reply_orphaned"] = reply_orphaned;
    j["routing_started_at"] = opt_time(routing_started_at);
    j["cluster_formed_at"] = opt_time(cluster_formed_at);
    j["flows"] = json::array();
    for (const auto& f : flows) {
        j["flows"].push_back({{"flow", f.flow_id},
                              {"src", f.src},
                              {"dst", f.dst},
                              {"sent", f.sent},
                              {"delivered", f.delivered},
                              {"first_route_at", opt_time(f.first_route_at)}});
    }
    return j.dump(2) + "\n";
}

std::vector<DistanceSample> distance_series(const Mobility& mobility, NodeId ref, SimTime sample_dt, SimTime t_end) {
    if (!mobility.contains(ref)) {
        throw UnknownNodeError(ref);
    }
    if (sample_dt <= SimTime{}) {
        throw std::invalid_argument("sample interval must be positive");
    }
    std::vector<DistanceSample> out;
    auto ids = mobility.node_ids();
    for (std::int64_t k = 0;; ++k) {
        SimTime t = sample_dt * k;
        if (t > t_end) {
            break;
        }
        Position r = mobility.position_at(ref, t);
        for (NodeId n : ids) {
            if (n != ref) {
                out.push_back({t, n, ref, euclidean(mobility.position_at(n, t), r)});
            }
        }
    }
    return out;
}

void write_distance_csv(std::ostream& out, const std::vector<DistanceSample>& series) {
    out << "time,node,ref,distance_m\n";
    for (const auto& s : series) {
        out << s.t.str() << ',' << s.node << ',' << s.ref << ',' << fixed6(s.distance) << '\n';
    }
}

}  // namespace manet
