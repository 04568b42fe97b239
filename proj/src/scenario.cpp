#include "manetsim/scenario.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace manet {

namespace {

using nlohmann::json;

[[noreturn]] void semantic(const std::string& path, const std::string& what) {
    throw ScenarioError(ScenarioError::Kind::Semantic, path + ": " + what);
}

/// A JSON object being read under a dotted path. Keys that were read are
/// recorded so done() can report leftovers as unknown.
class ObjectReader {
public:
    ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) {
            semantic(display(), "expected an object");
        }
    }

    ObjectReader(const ObjectReader&) = delete;

    /// Rejects keys that were never read.
    void done() const {
        for (const auto& [key, _] : j_.items()) {
            if (!used_.contains(key)) {
                semantic(child(key), "unknown key");
            }
        }
    }

    std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const json* find(const std::string& key) {
        used_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    const json& require(const std::string& key) {
        const json* v = find(key);
        if (v == nullptr) {
            semantic(child(key), "required field missing");
        }
        return *v;
    }

    double number(const std::string& key, const json& v) const {
        if (!v.is_number()) {
            semantic(child(key), "expected a number");
        }
        double d = v.get<double>();
        if (!std::isfinite(d)) {
            semantic(child(key), "must be finite");
        }
        return d;
    }

    std::uint64_t unsigned_int(const std::string& key, const json& v) const {
        if (v.is_number_unsigned()) {
            return v.get<std::uint64_t>();
        }
        if (v.is_number_integer()) {
            semantic(child(key), "must not be negative");
        }
        semantic(child(key), "expected a non-negative integer");
    }

    std::uint32_t u32(const std::string& key, const json& v) const {
        std::uint64_t x = unsigned_int(key, v);
        if (x > 0xffffffffULL) {
            semantic(child(key), "out of range");
        }
        return static_cast<std::uint32_t>(x);
    }

    SimTime time(const std::string& key, const json& v) const { return SimTime::from_seconds(number(key, v)); }

    std::string text(const std::string& key, const json& v) const {
        if (!v.is_string()) {
            semantic(child(key), "expected a string");
        }
        return v.get<std::string>();
    }

    bool boolean(const std::string& key, const json& v) const {
        if (!v.is_boolean()) {
            semantic(child(key), "expected true or false");
        }
        return v.get<bool>();
    }

    // Optional setters: leave the target untouched when the key is absent.
    void opt(const std::string& key, double& out) {
        if (auto* v = find(key)) out = number(key, *v);
    }
    void opt(const std::string& key, SimTime& out) {
        if (auto* v = find(key)) out = time(key, *v);
    }
    void opt(const std::string& key, std::uint32_t& out) {
        if (auto* v = find(key)) out = u32(key, *v);
    }
    void opt(const std::string& key, std::uint64_t& out) {
        if (auto* v = find(key)) out = unsigned_int(key, *v);
    }
    void opt(const std::string& key, bool& out) {
        if (auto* v = find(key)) out = boolean(key, *v);
    }
    void opt(const std::string& key, std::string& out) {
        if (auto* v = find(key)) out = text(key, *v);
    }

    const std::string& path() const { return path_; }

private:
    std::string display() const { return path_.empty() ? "scenario" : path_; }

    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

const json& require_array(ObjectReader& r, const std::string& key) {
    const json& v = r.require(key);
    if (!v.is_array()) {
        semantic(r.child(key), "expected an array");
    }
    return v;
}

std::string indexed(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

Position read_position(ObjectReader& r) {
    return {r.number("x", r.require("x")), r.number("y", r.require("y"))};
}

Scenario from_json(const json& doc) {
    Scenario s;
    ObjectReader top(doc, "");
    s.name = top.text("name", top.require("name"));
    top.opt("description", s.description);
    s.sim_end = top.time("sim_end", top.require("sim_end"));
    top.opt("seed", s.seed);
    if (auto* v = top.find("cluster_mode")) {
        auto text = top.text("cluster_mode", *v);
        auto mode = cluster_mode_from_string(text);
        if (!mode) {
            semantic("cluster_mode", "expected off, overlay or forwarding, got '" + text + "'");
        }
        s.cluster_mode = *mode;
    }
    top.opt("cluster_interval", s.cluster_interval);

    if (auto* v = top.find("radio")) {
        ObjectReader r(*v, "radio");
        r.opt("range", s.radio.range);
        r.opt("per_hop_latency", s.radio.per_hop_latency);
        r.opt("queue_capacity", s.radio.queue_capacity);
        r.opt("loss_probability", s.radio.loss_probability);
        r.done();
    }

    if (auto* v = top.find("aodv")) {
        ObjectReader r(*v, "aodv");
        AodvConfig& a = s.aodv;
        r.opt("hello_interval", a.hello_interval);
        r.opt("allowed_hello_loss", a.allowed_hello_loss);
        r.opt("active_route_timeout", a.active_route_timeout);
        r.opt("ttl_start", a.ttl_start);
        r.opt("ttl_increment", a.ttl_increment);
        r.opt("ttl_threshold", a.ttl_threshold);
        r.opt("net_diameter", a.net_diameter);
        r.opt("rreq_retries", a.rreq_retries);
        r.opt("traversal_factor", a.traversal_factor);
        r.opt("seen_cache_lifetime", a.seen_cache_lifetime);
        r.opt("pending_buffer_capacity", a.pending_buffer_capacity);
        r.opt("buffer_timeout", a.buffer_timeout);
        r.opt("intermediate_reply", a.intermediate_reply);
        r.done();
    }

    const json& nodes = require_array(top, "nodes");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        ObjectReader r(nodes[i], indexed("nodes", i));
        s.nodes.push_back({r.u32("id", r.require("id")), read_position(r)});
        r.done();
    }

    if (auto* v = top.find("waypoints")) {
        if (!v->is_array()) {
            semantic("waypoints", "expected an array");
        }
        for (std::size_t i = 0; i < v->size(); ++i) {
            ObjectReader r((*v)[i], indexed("waypoints", i));
            WaypointScript w;
            w.node = r.u32("node", r.require("node"));
            const json& legs = require_array(r, "legs");
            for (std::size_t k = 0; k < legs.size(); ++k) {
                ObjectReader lr(legs[k], indexed(r.child("legs"), k));
                Leg leg;
                leg.depart_at = lr.time("at", lr.require("at"));
                leg.target = read_position(lr);
                leg.speed = lr.number("speed", lr.require("speed"));
                lr.done();
                w.legs.push_back(leg);
            }
            r.done();
            s.waypoints.push_back(std::move(w));
        }
    }

    if (auto* v = top.find("flows")) {
        if (!v->is_array()) {
            semantic("flows", "expected an array");
        }
        for (std::size_t i = 0; i < v->size(); ++i) {
            ObjectReader r((*v)[i], indexed("flows", i));
            FlowSpec f;
            f.flow_id = r.u32("id", r.require("id"));
            f.src = r.u32("src", r.require("src"));
            f.dst = r.u32("dst", r.require("dst"));
            f.start_at = r.time("start", r.require("start"));
            f.stop_at = r.time("stop", r.require("stop"));
            r.opt("interval", f.interval);
            r.opt("payload_bytes", f.payload_bytes);
            r.done();
            s.flows.push_back(f);
        }
    }
    top.done();
    return s;
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

double as_seconds(SimTime t) { return t.seconds(); }

}  // namespace

void validate_scenario(const Scenario& s) {
    if (s.name.empty()) {
        semantic("name", "must not be empty");
    }
    if (s.sim_end <= SimTime{}) {
        semantic("sim_end", "must be positive");
    }
    if (s.cluster_interval <= SimTime{}) {
        semantic("cluster_interval", "must be positive");
    }
    if (!(s.radio.range > 0.0)) {
        semantic("radio.range", "must be positive");
    }
    if (s.radio.per_hop_latency <= SimTime{}) {
        semantic("radio.per_hop_latency", "must be positive");
    }
    if (s.radio.queue_capacity == 0) {
        semantic("radio.queue_capacity", "must be positive");
    }
    if (!(s.radio.loss_probability >= 0.0 && s.radio.loss_probability <= 1.0)) {
        semantic("radio.loss_probability", "must lie in [0, 1]");
    }

    const AodvConfig& a = s.aodv;
    auto positive_time = [](const char* field, SimTime t) {
        if (t <= SimTime{}) {
            semantic(std::string("aodv.") + field, "must be positive");
        }
    };
    auto positive = [](const char* field, std::uint32_t v) {
        if (v == 0) {
            semantic(std::string("aodv.") + field, "must be positive");
        }
    };
    positive_time("hello_interval", a.hello_interval);
    positive_time("active_route_timeout", a.active_route_timeout);
    positive_time("seen_cache_lifetime", a.seen_cache_lifetime);
    positive_time("buffer_timeout", a.buffer_timeout);
    positive("allowed_hello_loss", a.allowed_hello_loss);
    positive("ttl_start", a.ttl_start);
    positive("ttl_increment", a.ttl_increment);
    positive("net_diameter", a.net_diameter);
    positive("traversal_factor", a.traversal_factor);
    positive("pending_buffer_capacity", a.pending_buffer_capacity);
    if (a.ttl_threshold < a.ttl_start) {
        semantic("aodv.ttl_threshold", "must not be below ttl_start");
    }

    if (s.nodes.empty()) {
        semantic("nodes", "at least one node is required");
    }
    std::set<NodeId> ids;
    for (std::size_t i = 0; i < s.nodes.size(); ++i) {
        const auto& n = s.nodes[i];
        if (!ids.insert(n.id).second) {
            semantic(indexed("nodes", i) + ".id", "duplicate node id " + std::to_string(n.id));
        }
        if (!std::isfinite(n.initial.x) || !std::isfinite(n.initial.y)) {
            semantic(indexed("nodes", i), "coordinates must be finite");
        }
    }

    std::set<NodeId> scripted;
    for (std::size_t i = 0; i < s.waypoints.size(); ++i) {
        const auto& w = s.waypoints[i];
        std::string p = indexed("waypoints", i);
        if (!ids.contains(w.node)) {
            semantic(p + ".node", "unknown node " + std::to_string(w.node));
        }
        if (!scripted.insert(w.node).second) {
            semantic(p + ".node", "node " + std::to_string(w.node) + " already has a script");
        }
        for (std::size_t k = 0; k < w.legs.size(); ++k) {
            const Leg& leg = w.legs[k];
            std::string lp = indexed(p + ".legs", k);
            if (leg.depart_at < SimTime{}) {
                semantic(lp + ".at", "must not be negative");
            }
            if (k > 0 && leg.depart_at <= w.legs[k - 1].depart_at) {
                semantic(lp + ".at", "legs must depart in strictly increasing order");
            }
            if (!(leg.speed > 0.0) || !std::isfinite(leg.speed)) {
                semantic(lp + ".speed", "must be positive");
            }
            if (!std::isfinite(leg.target.x) || !std::isfinite(leg.target.y)) {
                semantic(lp, "coordinates must be finite");
            }
        }
    }

    std::set<std::uint32_t> flow_ids;
    for (std::size_t i = 0; i < s.flows.size(); ++i) {
        const auto& f = s.flows[i];
        std::string p = indexed("flows", i);
        if (!flow_ids.insert(f.flow_id).second) {
            semantic(p + ".id", "duplicate flow id " + std::to_string(f.flow_id));
        }
        if (!ids.contains(f.src)) {
            semantic(p + ".src", "unknown node " + std::to_string(f.src));
        }
        if (!ids.contains(f.dst)) {
            semantic(p + ".dst", "unknown node " + std::to_string(f.dst));
        }
        if (f.src == f.dst) {
            semantic(p + ".dst", "must differ from src");
        }
        if (f.start_at < SimTime{}) {
            semantic(p + ".start", "must not be negative");
        }
        if (f.stop_at <= f.start_at) {
            semantic(p + ".stop", "must be after start");
        }
        if (f.interval <= SimTime{}) {
            semantic(p + ".interval", "must be positive");
        }
        if (f.payload_bytes == 0) {
            semantic(p + ".payload_bytes", "must be positive");
        }
    }
}

Scenario parse_scenario_text(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
        std::string what = e.what();
        // Keep nlohmann's detail but drop its "[json.exception...]" prefix.
        if (auto pos = what.rfind(": "); pos != std::string::npos) {
            what = what.substr(pos + 2);
        }
        throw ScenarioError(ScenarioError::Kind::Syntax, "syntax error at line " + std::to_string(line) + ", column " +
                                                             std::to_string(col) + ": " + what);
    }
    Scenario s = from_json(doc);
    validate_scenario(s);
    return s;
}

Scenario parse_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ScenarioError(ScenarioError::Kind::Io, "cannot read scenario file '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_scenario_text(buf.str());
    } catch (const ScenarioError& e) {
        throw ScenarioError(e.kind, path.string() + ": " + e.what());
    }
}

std::string emit_scenario(const Scenario& s) {
    json j = json::object();
    j["name"] = s.name;
    if (!s.description.empty()) {
        j["description"] = s.description;
    }
    j["sim_end"] = as_seconds(s.sim_end);
    j["seed"] = s.seed;
    j["cluster_mode"] = std::string(to_string(s.cluster_mode));
    j["cluster_interval"] = as_seconds(s.cluster_interval);
    j["radio"] = {{"range", s.radio.range},
                  {"per_hop_latency", as_seconds(s.radio.per_hop_latency)},
                  {"queue_capacity", s.radio.queue_capacity},
                  {"loss_probability", s.radio.loss_probability}};
    const AodvConfig& a = s.aodv;
    j["aodv"] = {{"hello_interval", as_seconds(a.hello_interval)},
                 {"allowed_hello_loss", a.allowed_hello_loss},
                 {"active_route_timeout", as_seconds(a.active_route_timeout)},
                 {"ttl_start", a.ttl_start},
                 {"ttl_increment", a.ttl_increment},
                 {"ttl_threshold", a.ttl_threshold},
                 {"net_diameter", a.net_diameter},
                 {"rreq_retries", a.rreq_retries},
                 {"traversal_factor", a.traversal_factor},
                 {"seen_cache_lifetime", as_seconds(a.seen_cache_lifetime)},
                 {"pending_buffer_capacity", a.pending_buffer_capacity},
                 {"buffer_timeout", as_seconds(a.buffer_timeout)},
                 {"intermediate_reply", a.intermediate_reply}};
    j["nodes"] = json::array();
    for (const auto& n : s.nodes) {
        j["nodes"].push_back({{"id", n.id}, {"x", n.initial.x}, {"y", n.initial.y}});
    }
    j["waypoints"] = json::array();
    for (const auto& w : s.waypoints) {
        json legs = json::array();
        for (const auto& leg : w.legs) {
            legs.push_back(
                {{"at", as_seconds(leg.depart_at)}, {"x", leg.target.x}, {"y", leg.target.y}, {"speed", leg.speed}});
        }
        j["waypoints"].push_back({{"node", w.node}, {"legs", legs}});
    }
    j["flows"] = json::array();
    for (const auto& f : s.flows) {
        j["flows"].push_back({{"id", f.flow_id},
                              {"src", f.src},
                              {"dst", f.dst},
                              {"start", as_seconds(f.start_at)},
                              {"stop", as_seconds(f.stop_at)},
                              {"interval", as_seconds(f.interval)},
                              {"payload_bytes", f.payload_bytes}});
    }
    return j.dump(2) + "\n";
}

std::filesystem::path resolve_scenario(std::string_view name_or_path) {
    std::filesystem::path direct(name_or_path);
    if (std::filesystem::exists(direct)) {
        return direct;
    }
    std::filesystem::path bundled = std::filesystem::path(MANETSIM_SCENARIO_DIR) / direct;
    if (std::filesystem::exists(bundled)) {
        return bundled;
    }
    bundled += ".json";
    if (std::filesystem::exists(bundled)) {
        return bundled;
    }
    // "paper-5node.scn" style: same bundled file under another extension.
    if (direct.has_extension() && !direct.has_parent_path()) {
        auto by_stem = std::filesystem::path(MANETSIM_SCENARIO_DIR) / direct.stem();
        by_stem += ".json";
        if (std::filesystem::exists(by_stem)) {
            return by_stem;
        }
    }
    return direct;
}

}  // namespace manet
