#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace deepvat {

/// SplitMix64 generator.
///
/// All randomness in the library flows through this generator so that any
/// implementation following the same recipe reproduces identical data:
///
///   state += 0x9E3779B97F4A7C15
///   z = state
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   return z ^ (z >> 31)
///
/// `uniform()` maps the top 53 bits to [0, 1). `normal()` is Box-Muller over
/// two consecutive uniforms (u1 replaced by 1 - u1 so the log argument is
/// in (0, 1]); the cosine branch is returned first and the sine branch is
/// cached for the next call.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    /// Unbiased integer in [0, bound) by rejection of the low remainder band.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t x = next();
            if (x >= threshold) return x % bound;
        }
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Pipeline stages that consume randomness. The numeric value is the stage
/// index mixed into the master seed.
enum class Stage : std::uint64_t {
    reduce = 1,
    sample = 2,
    generate = 3,
};

/// Per-stage seed: one SplitMix64 output from state
/// master ^ (stage_index * 0xD1B54A32D192ED03). Toggling one stage never
/// shifts the stream seen by another.
inline std::uint64_t stage_seed(std::uint64_t master, Stage stage) {
    SplitMix64 mix(master ^ (static_cast<std::uint64_t>(stage) * 0xD1B54A32D192ED03ULL));
    return mix.next();
}

}  // namespace deepvat
