#pragma once

#include "manetsim/sim_time.hpp"

#include <cstdint>
#include <vector>

namespace manet {

/// Constant-bit-rate flow.
struct FlowSpec {
    std::uint32_t flow_id = 0;
    NodeId src = 0;
    NodeId dst = 0;
    SimTime start_at;
    SimTime stop_at;
    SimTime interval = SimTime::from_micros(250'000);
    std::uint32_t payload_bytes = 512;

    bool operator==(const FlowSpec&) const = default;
};

/// Origination instants start_at + k * interval that fall strictly before
/// stop_at. Computed by multiplication so no rounding accumulates.
std::vector<SimTime> origination_times(const FlowSpec& flow);

}  // namespace manet
