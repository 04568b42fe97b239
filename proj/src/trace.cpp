#include "manetsim/trace.hpp"

#include <array>
#include <charconv>
#include <istream>
#include <ostream>

namespace manet {

namespace {

constexpr std::array<std::pair<TraceKind, std::string_view>, 12> kKindNames{{
    {TraceKind::Send, "SEND"},
    {TraceKind::Recv, "RECV"},
    {TraceKind::Fwd, "FWD"},
    {TraceKind::Drop, "DROP"},
    {TraceKind::Rreq, "RREQ"},
    {TraceKind::Rrep, "RREP"},
    {TraceKind::Rerr, "RERR"},
    {TraceKind::Hello, "HELLO"},
    {TraceKind::Rtbl, "RTBL"},
    {TraceKind::Clst, "CLST"},
    {TraceKind::Dist, "DIST"},
    {TraceKind::End, "END"},
}};

bool valid_token(std::string_view s, bool is_key) {
    for (char c : s) {
        if (c == '\t' || c == '\n' || c == '\r' || (is_key && c == '=')) {
            return false;
        }
    }
    return !is_key || !s.empty();
}

}  // namespace

std::string_view to_string(TraceKind kind) {
    for (const auto& [k, name] : kKindNames) {
        if (k == kind) {
            return name;
        }
    }
    return "?";
}

std::optional<TraceKind> trace_kind_from_string(std::string_view text) {
    for (const auto& [k, name] : kKindNames) {
        if (name == text) {
            return k;
        }
    }
    return std::nullopt;
}

TraceRecord& TraceRecord::with(std::string key, std::string value) {
    if (!valid_token(key, true) || !valid_token(value, false)) {
        throw TraceFormatError("field '" + key + "' contains a reserved character");
    }
    fields.emplace_back(std::move(key), std::move(value));
    return *this;
}

std::optional<std::string_view> TraceRecord::get(std::string_view key) const {
    for (const auto& [k, v] : fields) {
        if (k == key) {
            return std::string_view(v);
        }
    }
    return std::nullopt;
}

std::string_view TraceRecord::at(std::string_view key) const {
    auto v = get(key);
    if (!v) {
        throw TraceFormatError(std::string(to_string(kind)) + " record missing field '" + std::string(key) + "'");
    }
    return *v;
}

std::int64_t TraceRecord::int_at(std::string_view key) const {
    auto v = at(key);
    std::int64_t out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size()) {
        throw TraceFormatError("field '" + std::string(key) + "' is not an integer: '" + std::string(v) + "'");
    }
    return out;
}

std::string format_record(const TraceRecord& record) {
    std::string line = record.time.str();
    line += '\t';
    line += to_string(record.kind);
    line += '\t';
    line += std::to_string(record.node);
    for (const auto& [k, v] : record.fields) {
        line += '\t';
        line += k;
        line += '=';
        line += v;
    }
    return line;
}

TraceRecord parse_record(std::string_view line) {
    std::vector<std::string_view> cols;
    std::size_t start = 0;
    while (true) {
        std::size_t tab = line.find('\t', start);
        cols.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
        if (tab == std::string_view::npos) {
            break;
        }
        start = tab + 1;
    }
    if (cols.size() < 3) {
        throw TraceFormatError("expected at least 3 tab-separated columns");
    }
    TraceRecord rec;
    try {
        rec.time = SimTime::parse(cols[0]);
    } catch (const std::invalid_argument& e) {
        throw TraceFormatError(e.what());
    }
    auto kind = trace_kind_from_string(cols[1]);
    if (!kind) {
        throw TraceFormatError("unknown record kind '" + std::string(cols[1]) + "'");
    }
    rec.kind = *kind;
    {
        auto node = cols[2];
        auto [p, ec] = std::from_chars(node.data(), node.data() + node.size(), rec.node);
        if (ec != std::errc{} || p != node.data() + node.size() || node.empty()) {
            throw TraceFormatError("malformed node id '" + std::string(node) + "'");
        }
    }
    for (std::size_t i = 3; i < cols.size(); ++i) {
        auto eq = cols[i].find('=');
        if (eq == std::string_view::npos || eq == 0) {
            throw TraceFormatError("malformed field '" + std::string(cols[i]) + "'");
        }
        rec.fields.emplace_back(std::string(cols[i].substr(0, eq)), std::string(cols[i].substr(eq + 1)));
    }
    return rec;
}

void write_trace(std::ostream& out, const std::vector<TraceRecord>& trace) {
    for (const auto& r : trace) {
        out << format_record(r) << '\n';
    }
}

std::vector<TraceRecord> read_trace(std::istream& in) {
    std::vector<TraceRecord> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        try {
            out.push_back(parse_record(line));
        } catch (const TraceFormatError& e) {
            throw TraceFormatError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace manet
