#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace manet {

/// Seeded 64-bit generator stream. Streams are derived from a run seed and a
/// stream name, so each consumer draws from its own sequence and adding a new
/// consumer never shifts the draws seen by existing ones.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    static Rng derive(std::uint64_t run_seed, std::string_view stream);

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1). Built from the top 53 bits so the value does not
    /// depend on the standard library's distribution implementation.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi].
    std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) {
        return lo + engine_() % (hi - lo + 1);
    }

private:
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace manet
