#include "manetsim/traffic.hpp"

#include <stdexcept>

namespace manet {

std::vector<SimTime> origination_times(const FlowSpec& flow) {
    if (flow.interval <= SimTime{}) {
        throw std::invalid_argument("flow interval must be positive");
    }
    std::vector<SimTime> out;
    for (std::int64_t k = 0;; ++k) {
        SimTime t = flow.start_at + flow.interval * k;
        if (t >= flow.stop_at) {
            break;
        }
        out.push_back(t);
    }
    return out;
}

}  // namespace manet
