// Command-line front end: run, validate, metrics, sweep, distances.
//
// Exit status: 0 success, 1 usage or scenario/trace parse error, 2 runtime
// failure (unwritable output, failed sweep seed, simulation error).

#include "manetsim/metrics.hpp"
#include "manetsim/scenario.hpp"
#include "manetsim/simulator.hpp"
#include "manetsim/sweep.hpp"
#include "manetsim/trace.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace manet;

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kRuntime = 2;

/// Raised for conditions that map to exit status 1.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised for conditions that map to exit status 2.
struct RuntimeFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

SimTime parse_time_flag(const std::string& flag, const std::string& text) {
    try {
        return SimTime::parse(text);
    } catch (const std::invalid_argument&) {
        throw UsageError(flag + ": expected seconds, got '" + text + "'");
    }
}

std::uint64_t parse_u64(const std::string& text, const std::string& flag) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw UsageError(flag + ": expected a non-negative integer, got '" + text + "'");
    }
    return v;
}

/// "1..10", "3,5,8" or a mix such as "1..3,7".
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
    std::vector<std::uint64_t> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto comma = text.find(',', start);
        std::string part = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        if (auto dots = part.find(".."); dots != std::string::npos) {
            auto lo = parse_u64(part.substr(0, dots), "--seeds");
            auto hi = parse_u64(part.substr(dots + 2), "--seeds");
            if (hi < lo || hi - lo > 1'000'000) {
                throw UsageError("--seeds: bad range '" + part + "'");
            }
            for (auto s = lo; s <= hi; ++s) {
                out.push_back(s);
            }
        } else {
            out.push_back(parse_u64(part, "--seeds"));
        }
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

Scenario load(const std::string& name) {
    try {
        return parse_scenario(resolve_scenario(name));
    } catch (const ScenarioError& e) {
        throw UsageError(e.what());
    }
}

/// Opens every requested output before any work so that a bad path fails
/// fast and leaves no partial files behind.
class Outputs {
public:
    std::ostream* open(const std::string& path) {
        if (path.empty()) {
            return nullptr;
        }
        auto& f = files_.emplace_back(std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc));
        if (!*f) {
            throw RuntimeFailure("cannot write '" + path + "'");
        }
        return f.get();
    }

    void check(const std::string& what) {
        for (auto& f : files_) {
            f->flush();
            if (!*f) {
                throw RuntimeFailure("write failed for " + what);
            }
        }
    }

private:
    std::vector<std::unique_ptr<std::ofstream>> files_;
};

std::string render_metrics(const MetricsReport& m, const std::string& format) {
    return format == "json" ? m.to_json() : m.to_kv();
}

struct CommonRunFlags {
    std::string scenario;
    std::optional<std::uint64_t> seed;
    std::string until;
    std::string cluster_mode;

    void attach(CLI::App* cmd, bool with_seed = true) {
        cmd->add_option("--scenario", scenario, "Scenario file or bundled name (paper-5node, static-grid)")
            ->required();
        if (with_seed) {
            cmd->add_option("--seed", seed, "Override the scenario seed");
        }
        cmd->add_option("--until", until, "Override the end time in seconds");
        cmd->add_option("--cluster-mode", cluster_mode, "off | overlay | forwarding");
    }

    RunOptions options() const {
        RunOptions o;
        o.seed = seed;
        if (!until.empty()) {
            o.until = parse_time_flag("--until", until);
        }
        if (!cluster_mode.empty()) {
            auto mode = cluster_mode_from_string(cluster_mode);
            if (!mode) {
                throw UsageError("--cluster-mode: expected off, overlay or forwarding, got '" + cluster_mode + "'");
            }
            o.cluster_mode = mode;
        }
        return o;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deterministic MANET simulator: AODV over a clustered topology"};
    app.require_subcommand(1);

    CommonRunFlags run_flags;
    std::string out_trace, out_metrics, out_distances, metrics_format = "kv", sample_dt = "1";
    std::optional<NodeId> ref_node;
    auto* run = app.add_subcommand("run", "Simulate a scenario and write trace, metrics and distances");
    run_flags.attach(run);
    run->add_option("--out-trace", out_trace, "Trace output path (TSV)");
    run->add_option("--out-metrics,--metrics", out_metrics, "Metrics output path (stdout when omitted)");
    run->add_option("--format", metrics_format, "Metrics format")->check(CLI::IsMember({"kv", "json"}));
    run->add_option("--out-distances", out_distances, "Distance series output path (CSV)");
    run->add_option("--ref-node", ref_node, "Reference node for the distance series");
    run->add_option("--sample-dt", sample_dt, "Distance sampling interval in seconds");

    std::string validate_scenario_name;
    auto* validate = app.add_subcommand("validate", "Parse and validate a scenario without running it");
    validate->add_option("--scenario", validate_scenario_name, "Scenario file or bundled name")->required();

    std::string trace_in, metrics_out2, metrics_format2 = "kv";
    auto* metrics = app.add_subcommand("metrics", "Recompute metrics from an existing trace");
    metrics->add_option("--trace", trace_in, "Trace file")->required();
    metrics->add_option("--out-metrics,--metrics", metrics_out2, "Output path (stdout when omitted)");
    metrics->add_option("--format", metrics_format2, "Metrics format")->check(CLI::IsMember({"kv", "json"}));

    CommonRunFlags sweep_flags;
    std::string seeds_text, sweep_out;
    int threads = 0;
    bool serial = false;
    auto* sweep = app.add_subcommand("sweep", "Run one scenario over many seeds and aggregate the metrics");
    sweep_flags.attach(sweep, false);
    sweep->add_option("--seeds", seeds_text, "Seed list, e.g. 1..10 or 1,4,9")->required();
    sweep->add_option("--threads", threads, "Worker threads (0 = OpenMP default)");
    sweep->add_flag("--serial", serial, "Run seeds one after another");
    sweep->add_option("--out", sweep_out, "Report output path (stdout when omitted)");

    CommonRunFlags dist_flags;
    std::string dist_out, dist_dt = "1";
    NodeId dist_ref = 0;
    auto* distances = app.add_subcommand("distances", "Write the distance-to-reference series of a scenario");
    dist_flags.attach(distances, false);
    distances->add_option("--ref-node", dist_ref, "Reference node")->required();
    distances->add_option("--sample-dt", dist_dt, "Sampling interval in seconds");
    distances->add_option("--out-distances", dist_out, "Output path (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        Outputs outputs;
        if (*run) {
            Scenario s = load(run_flags.scenario);
            RunOptions opts = run_flags.options();
            SimTime dt = parse_time_flag("--sample-dt", sample_dt);
            if (!out_distances.empty() && !ref_node) {
                throw UsageError("--out-distances requires --ref-node");
            }
            std::ostream* trace_os = outputs.open(out_trace);
            std::ostream* metrics_os = outputs.open(out_metrics);
            std::ostream* dist_os = outputs.open(out_distances);

            Simulator sim(s, opts);
            const RunResult& r = sim.finish();
            if (trace_os) {
                write_trace(*trace_os, r.trace);
            }
            std::string m = render_metrics(r.metrics, metrics_format);
            (metrics_os ? *metrics_os : std::cout) << m;
            if (dist_os) {
                write_distance_csv(*dist_os, distance_series(sim.mobility(), *ref_node, dt, r.end));
            }
            outputs.check("run outputs");
        } else if (*validate) {
            Scenario s = load(validate_scenario_name);
            std::cout << "ok: " << s.name << " (" << s.nodes.size() << " nodes, " << s.flows.size()
                      << " flows, cluster_mode=" << to_string(s.cluster_mode) << ")\n";
        } else if (*metrics) {
            std::ifstream in(trace_in, std::ios::binary);
            if (!in) {
                throw UsageError("cannot read trace '" + trace_in + "'");
            }
            std::vector<TraceRecord> trace;
            try {
                trace = read_trace(in);
            } catch (const TraceFormatError& e) {
                throw UsageError(trace_in + ": " + e.what());
            }
            std::ostream* os = outputs.open(metrics_out2);
            MetricsReport m;
            try {
                m = compute_metrics(trace);
            } catch (const TraceFormatError& e) {
                throw UsageError(trace_in + ": " + e.what());
            }
            (os ? *os : std::cout) << render_metrics(m, metrics_format2);
            outputs.check("metrics output");
        } else if (*sweep) {
            Scenario s = load(sweep_flags.scenario);
            RunOptions opts = sweep_flags.options();
            auto seeds = parse_seeds(seeds_text);
            std::ostream* os = outputs.open(sweep_out);
            SweepReport rep = serial ? sweep_serial(s, seeds, opts) : sweep_parallel(s, seeds, opts, threads);
            (os ? *os : std::cout) << rep.to_text();
            outputs.check("sweep output");
            if (!rep.all_ok()) {
                std::cerr << "error: some seeds failed; aggregates are partial\n";
                return kRuntime;
            }
        } else if (*distances) {
            Scenario s = load(dist_flags.scenario);
            RunOptions opts = dist_flags.options();
            SimTime dt = parse_time_flag("--sample-dt", dist_dt);
            SimTime end = opts.until.value_or(s.sim_end);
            std::ostream* os = outputs.open(dist_out);
            Mobility mob;
            std::map<NodeId, std::vector<Leg>> legs;
            for (const auto& w : s.waypoints) {
                legs[w.node] = w.legs;
            }
            for (const auto& n : s.nodes) {
                mob.add_node(n.id, n.initial, legs[n.id]);
            }
            try {
                write_distance_csv(os ? *os : std::cout, distance_series(mob, dist_ref, dt, end));
            } catch (const UnknownNodeError& e) {
                throw UsageError(std::string("--ref-node: ") + e.what());
            } catch (const std::invalid_argument& e) {
                throw UsageError(std::string("--sample-dt: ") + e.what());
            }
            outputs.check("distance output");
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const RuntimeFailure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntime;
    }
    return kOk;
}
