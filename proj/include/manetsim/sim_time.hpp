#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace manet {

using NodeId = std::uint32_t;

/// Simulation time with microsecond resolution.
///
/// Stored as a signed count of microseconds so that arithmetic and ordering are
/// exact and every run formats timestamps identically. The same type is used
/// for durations.
class SimTime {
public:
    constexpr SimTime() = default;

    static constexpr SimTime from_micros(std::int64_t us) { return SimTime(us); }
    static SimTime from_seconds(double seconds);

    /// Parses a decimal seconds string ("12.5", "7.325251") without going
    /// through floating point. Throws std::invalid_argument on bad input.
    static SimTime parse(std::string_view text);

    constexpr std::int64_t micros() const { return us_; }
    constexpr double seconds() const { return static_cast<double>(us_) / 1e6; }

    /// Fixed six-decimal rendering, e.g. "10.491251".
    std::string str() const;

    constexpr auto operator<=>(const SimTime&) const = default;

    constexpr SimTime operator+(SimTime o) const { return SimTime(us_ + o.us_); }
    constexpr SimTime operator-(SimTime o) const { return SimTime(us_ - o.us_); }
    constexpr SimTime operator*(std::int64_t k) const { return SimTime(us_ * k); }
    constexpr SimTime& operator+=(SimTime o) {
        us_ += o.us_;
        return *this;
    }

private:
    constexpr explicit SimTime(std::int64_t us) : us_(us) {}
    std::int64_t us_ = 0;
};

inline SimTime seconds(double s) { return SimTime::from_seconds(s); }

}  // namespace manet
