#pragma once

#include "manetsim/rng.hpp"
#include "manetsim/sim_time.hpp"
#include "manetsim/trace.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <vector>

namespace manet {

class SchedulingError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Identifies one scheduled event. A default-constructed handle refers to
/// nothing and cancels as a no-op.
class EventHandle {
public:
    EventHandle() = default;

    bool valid() const { return seq_ != 0; }
    SimTime fire_at() const { return at_; }

    bool operator==(const EventHandle&) const = default;

private:
    friend class Kernel;
    EventHandle(SimTime at, std::uint64_t seq) : at_(at), seq_(seq) {}

    SimTime at_;
    std::uint64_t seq_ = 0;
};

/// Discrete-event core: clock, event queue ordered by (fire_at, insertion
/// sequence), per-run trace and the seed from which module RNG streams are
/// derived.
///
/// Single-threaded. A Kernel and everything attached to it belong to one run.
class Kernel {
public:
    using Action = std::function<void()>;

    explicit Kernel(std::uint64_t seed = 0) : seed_(seed) {}

    Kernel(const Kernel&) = delete;
    Kernel& operator=(const Kernel&) = delete;

    SimTime now() const { return now_; }
    std::uint64_t seed() const { return seed_; }

    /// Throws SchedulingError if at < now().
    EventHandle schedule(SimTime at, Action action);
    EventHandle schedule_in(SimTime delay, Action action) { return schedule(now_ + delay, std::move(action)); }

    /// True if the event was pending and has been removed.
    bool cancel(EventHandle handle);
    bool pending(EventHandle handle) const;
    std::size_t pending_count() const { return queue_.size(); }

    /// Fires every event with fire_at <= t_end in order, then sets the clock
    /// to t_end. Returns the records emitted during this call.
    std::vector<TraceRecord> run_until(SimTime t_end);

    /// Stamps the record with the current clock and appends it.
    void emit(TraceRecord record);

    const std::vector<TraceRecord>& trace() const { return trace_; }

    Rng stream(std::string_view name) const { return Rng::derive(seed_, name); }

private:
    using Key = std::pair<std::int64_t, std::uint64_t>;

    SimTime now_;
    std::uint64_t seed_;
    std::uint64_t next_seq_ = 1;
    std::map<Key, Action> queue_;
    std::vector<TraceRecord> trace_;
};

}  // namespace manet
