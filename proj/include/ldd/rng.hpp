#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>

namespace ldd {

/// Seeded random source with platform-independent draws.
///
/// The standard distributions are implementation-defined, so the same seed can
/// give different values under libstdc++, libc++ and MSVC. Only the raw
/// mt19937_64 output is pinned by the standard; the mappings to reals and
/// bounded integers below are done by hand so replays are bit-exact everywhere.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random mantissa bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) {
        double v = lo + (hi - lo) * uniform01();
        // lo + (hi - lo) * u can round up to hi for u close to 1.
        if (v >= hi) v = std::nextafter(hi, lo);
        return v;
    }

    /// Uniform integer in the closed range [lo, hi], rejection sampled.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        if (hi < lo) throw std::invalid_argument("uniform_int: hi < lo");
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        if (span == 0) return static_cast<std::int64_t>(engine_());
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % span;
        std::uint64_t draw;
        do {
            draw = engine_();
        } while (draw >= limit);
        return lo + static_cast<std::int64_t>(draw % span);
    }

    friend bool operator==(const Rng&, const Rng&) = default;

private:
    std::mt19937_64 engine_;
};

}  // namespace ldd
