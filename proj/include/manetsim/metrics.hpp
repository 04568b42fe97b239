#pragma once

#include "manetsim/mobility.hpp"
#include "manetsim/sim_time.hpp"
#include "manetsim/trace.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace manet {

struct FlowMetrics {
    std::uint32_t flow_id = 0;
    NodeId src = 0;
    NodeId dst = 0;
    std::uint64_t sent = 0;
    std::uint64_t delivered = 0;
    /// First route reply reaching the source for this flow's destination.
    std::optional<SimTime> first_route_at;

    bool operator==(const FlowMetrics&) const = default;
};

struct MetricsReport {
    std::uint64_t sent = 0;
    std::uint64_t delivered = 0;
    std::map<std::string, std::uint64_t> drops;  // every data drop cause, zero-filled
    std::optional<std::uint64_t> in_flight;      // census from the END record
    std::optional<double> delivery_ratio;        // undefined when sent == 0
    std::optional<double> latency_mean;          // seconds
    std::optional<SimTime> latency_p50;          // nearest rank
    std::optional<SimTime> latency_p95;
    std::uint64_t rreq = 0;   // transmissions: originated + rebroadcast
    std::uint64_t rrep = 0;   // transmissions: generated + forwarded
    std::uint64_t rerr = 0;
    std::uint64_t hello = 0;
    std::uint64_t control_drops = 0;
    std::uint64_t stale_rejections = 0;
    std::uint64_t reply_orphaned = 0;
    std::optional<SimTime> routing_started_at;  // first RREQ originated
    std::optional<SimTime> cluster_formed_at;
    std::vector<FlowMetrics> flows;

    std::uint64_t dropped_total() const;

    /// sent == delivered + dropped + in_flight. False when no census exists.
    bool conserved() const;

    /// One key=value per line.
    std::string to_kv() const;
    std::string to_json() const;

    bool operator==(const MetricsReport&) const = default;
};

/// Nearest-rank percentile (p in (0, 100]) of a non-empty sample.
SimTime nearest_rank(std::vector<SimTime> values, double p);

MetricsReport compute_metrics(const std::vector<TraceRecord>& trace);

struct DistanceSample {
    SimTime t;
    NodeId node = 0;
    NodeId ref = 0;
    double distance = 0.0;

    bool operator==(const DistanceSample&) const = default;
};

/// Distance of every other node to ref at t = 0, dt, 2dt, ... <= t_end,
/// grouped by time then ascending node id. Throws UnknownNodeError for an
/// unknown ref and std::invalid_argument for dt <= 0.
std::vector<DistanceSample> distance_series(const Mobility& mobility, NodeId ref, SimTime sample_dt, SimTime t_end);

/// "time,node,ref,distance_m" with a header row.
void write_distance_csv(std::ostream& out, const std::vector<DistanceSample>& series);

}  // namespace manet
