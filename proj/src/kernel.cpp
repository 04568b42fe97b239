#include "manetsim/kernel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace manet {

SimTime SimTime::from_seconds(double s) {
    if (!std::isfinite(s)) {
        throw std::invalid_argument("non-finite time value");
    }
    return SimTime(std::llround(s * 1e6));
}

SimTime SimTime::parse(std::string_view text) {
    auto fail = [&]() { return std::invalid_argument("malformed time '" + std::string(text) + "'"); };
    if (text.empty()) {
        throw fail();
    }
    bool negative = false;
    if (text.front() == '-') {
        negative = true;
        text.remove_prefix(1);
    }
    std::int64_t whole = 0;
    std::int64_t frac = 0;
    int frac_digits = 0;
    bool seen_dot = false;
    bool any_digit = false;
    for (char c : text) {
        if (c == '.') {
            if (seen_dot) {
                throw fail();
            }
            seen_dot = true;
            continue;
        }
        if (c < '0' || c > '9') {
            throw fail();
        }
        any_digit = true;
        if (!seen_dot) {
            whole = whole * 10 + (c - '0');
            if (whole > 9'000'000'000'000LL) {
                throw fail();
            }
        } else if (frac_digits < 6) {
            frac = frac * 10 + (c - '0');
            ++frac_digits;
        } else if (c != '0') {
            // sub-microsecond digits are not representable
            throw fail();
        }
    }
    if (!any_digit) {
        throw fail();
    }
    while (frac_digits < 6) {
        frac *= 10;
        ++frac_digits;
    }
    std::int64_t us = whole * 1'000'000 + frac;
    return SimTime(negative ? -us : us);
}

std::string SimTime::str() const {
    std::int64_t v = us_;
    std::string sign;
    if (v < 0) {
        sign = "-";
        v = -v;
    }
    std::string frac = std::to_string(v % 1'000'000);
    frac.insert(0, 6 - frac.size(), '0');
    return sign + std::to_string(v / 1'000'000) + "." + frac;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Rng Rng::derive(std::uint64_t run_seed, std::string_view stream) {
    // FNV-1a over the stream name, mixed with the run seed.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : stream) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return Rng(splitmix64(splitmix64(run_seed) ^ h));
}

EventHandle Kernel::schedule(SimTime at, Action action) {
    if (at < now_) {
        throw SchedulingError("event scheduled at " + at.str() + " before current clock " + now_.str());
    }
    std::uint64_t seq = next_seq_++;
    queue_.emplace(Key{at.micros(), seq}, std::move(action));
    return EventHandle(at, seq);
}

bool Kernel::cancel(EventHandle handle) {
    if (!handle.valid()) {
        return false;
    }
    return queue_.erase(Key{handle.at_.micros(), handle.seq_}) > 0;
}

bool Kernel::pending(EventHandle handle) const {
    return handle.valid() && queue_.contains(Key{handle.at_.micros(), handle.seq_});
}

std::vector<TraceRecord> Kernel::run_until(SimTime t_end) {
    if (t_end < now_) {
        throw SchedulingError("run_until " + t_end.str() + " is before current clock " + now_.str());
    }
    std::size_t first = trace_.size();
    while (!queue_.empty()) {
        auto it = queue_.begin();
        if (it->first.first > t_end.micros()) {
            break;
        }
        now_ = SimTime::from_micros(it->first.first);
        Action action = std::move(it->second);
        queue_.erase(it);
        action();
    }
    now_ = t_end;
    return {trace_.begin() + static_cast<std::ptrdiff_t>(first), trace_.end()};
}

void Kernel::emit(TraceRecord record) {
    record.time = now_;
    trace_.push_back(std::move(record));
}

}  // namespace manet
