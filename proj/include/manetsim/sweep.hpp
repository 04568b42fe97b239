#pragma once

#include "manetsim/metrics.hpp"
#include "manetsim/scenario.hpp"
#include "manetsim/simulator.hpp"

#include <optional>
#include <string>
#include <vector>

namespace manet {

struct SweepRow {
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;  // set when ok is false
    MetricsReport metrics;

    bool operator==(const SweepRow&) const = default;
};

struct SweepAggregate {
    std::string metric;
    std::size_t samples = 0;  // runs contributing a defined value
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;

    bool operator==(const SweepAggregate&) const = default;
};

struct SweepReport {
    std::vector<SweepRow> rows;  // ascending seed, duplicates removed
    std::vector<SweepAggregate> aggregates;

    bool all_ok() const;

    /// CSV: one row per seed, then one mean/min/max line per metric.
    std::string to_text() const;

    bool operator==(const SweepReport&) const = default;
};

/// Reference implementation: runs seeds one after another.
SweepReport sweep_serial(const Scenario& scenario, std::vector<std::uint64_t> seeds, const RunOptions& base = {});

/// Runs seeds concurrently with OpenMP, one isolated Simulator per seed.
/// threads <= 0 uses the OpenMP default. Produces the same report as
/// sweep_serial.
SweepReport sweep_parallel(const Scenario& scenario, std::vector<std::uint64_t> seeds, const RunOptions& base = {},
                           int threads = 0);

/// Aggregates rows that completed; failed rows are skipped.
std::vector<SweepAggregate> aggregate_rows(const std::vector<SweepRow>& rows);

}  // namespace manet
