#pragma once

#include "manetsim/aodv.hpp"
#include "manetsim/clustering.hpp"
#include "manetsim/kernel.hpp"
#include "manetsim/metrics.hpp"
#include "manetsim/mobility.hpp"
#include "manetsim/radio.hpp"
#include "manetsim/scenario.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <vector>

namespace manet {

/// Per-run overrides applied on top of the scenario.
struct RunOptions {
    std::optional<SimTime> until;  // replaces the scenario's sim_end
    std::optional<std::uint64_t> seed;
    std::optional<ClusterMode> cluster_mode;
    /// When set, DIST records (distance of every node to ref) are written
    /// into the trace every dist_interval.
    std::optional<NodeId> dist_ref;
    SimTime dist_interval = SimTime::from_micros(1'000'000);
};

struct RunResult {
    std::vector<TraceRecord> trace;
    MetricsReport metrics;
    SimTime end;
};

/// One fully wired run: kernel, mobility, channel, an AODV agent per node,
/// traffic sources and the cluster sampler. Owns all of its state, so
/// independent instances may run on different threads.
class Simulator {
public:
    explicit Simulator(const Scenario& scenario, RunOptions options = {});

    Simulator(const Simulator&) = delete;
    Simulator& operator=(const Simulator&) = delete;

    /// Advances to t (clamped to the end time). Throws SchedulingError when t
    /// lies in the past.
    void run_until(SimTime t);

    /// Runs to the end time, writes the END census and computes metrics.
    /// Further calls return the same result.
    const RunResult& finish();

    SimTime end_time() const { return end_; }
    Kernel& kernel() { return kernel_; }
    const Mobility& mobility() const { return mobility_; }
    Channel& channel() { return *channel_; }
    AodvAgent& agent(NodeId node);
    const ClusterView& clusters() const { return view_; }
    ClusterMode cluster_mode() const { return mode_; }

    /// Data packets still buffered or on the air.
    std::size_t data_in_flight() const;

private:
    void schedule_flow(std::size_t flow_index, std::size_t packet_index);
    void sample_clusters();
    void sample_distances();

    Scenario scenario_;
    SimTime end_;
    ClusterMode mode_;
    RunOptions options_;
    Kernel kernel_;
    Mobility mobility_;
    std::unique_ptr<Channel> channel_;
    std::map<NodeId, std::unique_ptr<AodvAgent>> agents_;
    std::vector<std::vector<SimTime>> flow_times_;
    ClusterView view_;
    bool formed_ = false;
    std::optional<RunResult> result_;
};

RunResult run_scenario(const Scenario& scenario, RunOptions options = {});

}  // namespace manet
