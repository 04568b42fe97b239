#include "manetsim/sweep.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdio>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace manet {

namespace {

using Extractor = std::function<std::optional<double>(const MetricsReport&)>;

const std::vector<std::pair<std::string, Extractor>>& columns() {
    static const std::vector<std::pair<std::string, Extractor>> cols = {
        {"sent", [](const MetricsReport& m) { return std::optional<double>(static_cast<double>(m.sent)); }},
        {"delivered", [](const MetricsReport& m) { return std::optional<double>(static_cast<double>(m.delivered)); }},
        {"dropped",
         [](const MetricsReport& m) { return std::optional<double>(static_cast<double>(m.dropped_total())); }},
        {"delivery_ratio", [](const MetricsReport& m) { return m.delivery_ratio; }},
        {"latency_mean", [](const MetricsReport& m) { return m.latency_mean; }},
        {"rreq", [](const MetricsReport& m) { return std::optional<double>(static_cast<double>(m.rreq)); }},
        {"rrep", [](const MetricsReport& m) { return std::optional<double>(static_cast<double>(m.rrep)); }},
        {"rerr", [](const MetricsReport& m) { return std::optional<double>(static_cast<double>(m.rerr)); }},
        {"hello", [](const MetricsReport& m) { return std::optional<double>(static_cast<double>(m.hello)); }},
    };
    return cols;
}

std::string fmt(std::optional<double> v, bool integral = false) {
    if (!v) {
        return "undefined";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, integral ? "%.0f" : "%.6f", *v);
    return buf;
}

std::vector<std::uint64_t> normalize(std::vector<std::uint64_t> seeds) {
    if (seeds.empty()) {
        throw std::invalid_argument("sweep needs at least one seed");
    }
    std::sort(seeds.begin(), seeds.end());
    seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
    return seeds;
}

SweepRow run_one(const Scenario& scenario, std::uint64_t seed, RunOptions options) {
    SweepRow row;
    row.seed = seed;
    options.seed = seed;
    try {
        row.metrics = run_scenario(scenario, options).metrics;
        row.ok = true;
    } catch (const std::exception& e) {
        row.error = e.what();
    }
    return row;
}

SweepReport assemble(std::vector<SweepRow> rows) {
    SweepReport r;
    r.rows = std::move(rows);
    r.aggregates = aggregate_rows(r.rows);
    return r;
}

}  // namespace

bool SweepReport::all_ok() const {
    return std::all_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.ok; });
}

std::vector<SweepAggregate> aggregate_rows(const std::vector<SweepRow>& rows) {
    std::vector<SweepAggregate> out;
    for (const auto& [name, get] : columns()) {
        SweepAggregate a;
        a.metric = name;
        double sum = 0.0;
        for (const auto& row : rows) {
            if (!row.ok) continue;
            auto v = get(row.metrics);
            if (!v) continue;
            if (a.samples == 0) {
                a.min = a.max = *v;
            }
            a.min = std::min(a.min, *v);
            a.max = std::max(a.max, *v);
            sum += *v;
            ++a.samples;
        }
        if (a.samples > 0) {
            a.mean = sum / static_cast<double>(a.samples);
        }
        out.push_back(a);
    }
    return out;
}

std::string SweepReport::to_text() const {
    std::ostringstream out;
    out << "seed,status";
    for (const auto& [name, _] : columns()) {
        out << ',' << name;
    }
    out << '\n';
    for (const auto& row : rows) {
        out << row.seed << ',' << (row.ok ? "ok" : "failed");
        for (const auto& [name, get] : columns()) {
            bool integral = name != "delivery_ratio" && name != "latency_mean";
            out << ',' << (row.ok ? fmt(get(row.metrics), integral) : std::string("undefined"));
        }
        out << '\n';
    }
    for (const char* stat : {"mean", "min", "max"}) {
        out << stat << ',' << (all_ok() ? "ok" : "partial");
        for (const auto& a : aggregates) {
            std::optional<double> v;
            if (a.samples > 0) {
                v = std::string_view(stat) == "mean" ? a.mean : std::string_view(stat) == "min" ? a.min : a.max;
            }
            out << ',' << fmt(v);
        }
        out << '\n';
    }
    for (const auto& row : rows) {
        if (!row.ok) {
            out << "# seed " << row.seed << " failed: " << row.error << '\n';
        }
    }
    return out.str();
}

SweepReport sweep_serial(const Scenario& scenario, std::vector<std::uint64_t> seeds, const RunOptions& base) {
    seeds = normalize(std::move(seeds));
    std::vector<SweepRow> rows;
    rows.reserve(seeds.size());
    for (std::uint64_t s : seeds) {
        rows.push_back(run_one(scenario, s, base));
    }
    return assemble(std::move(rows));
}

SweepReport sweep_parallel(const Scenario& scenario, std::vector<std::uint64_t> seeds, const RunOptions& base,
                           int threads) {
    seeds = normalize(std::move(seeds));
    std::vector<SweepRow> rows(seeds.size());
    const auto n = static_cast<std::int64_t>(seeds.size());
    int team = threads > 0 ? threads : omp_get_max_threads();
    // Each iteration owns one Simulator; results land in their seed's slot.
#pragma omp parallel for schedule(dynamic, 1) num_threads(team)
    for (std::int64_t i = 0; i < n; ++i) {
        rows[static_cast<std::size_t>(i)] = run_one(scenario, seeds[static_cast<std::size_t>(i)], base);
    }
    return assemble(std::move(rows));
}

}  // namespace manet
