#pragma once

#include <cmath>
#include <cstdint>

namespace pacs {

/// SplitMix64 (Steele, Lea, Flood 2014). Counter-based: the k-th output of a
/// stream seeded with s is mix(s + (k+1)*GAMMA), so per-path seeds can be
/// derived without advancing shared state. Normals come from Box-Muller on
/// the 53-bit uniform, so a (seed, draw-index) pair pins every sample
/// bit-for-bit regardless of thread schedule.
class SplitMix64 {
public:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t next_u64() {
        state_ += kGamma;
        return mix(state_);
    }

    /// Uniform on (0, 1]; never returns 0 so log() below is safe.
    double next_unit() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

    /// Standard normal via Box-Muller; the paired draw is cached.
    double next_normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        const double u1 = next_unit();
        const double u2 = next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double phi = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(phi);
        has_cached_ = true;
        return r * std::cos(phi);
    }

private:
    std::uint64_t state_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

/// Seed for the index-th member of an ensemble rooted at base_seed.
inline std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index) {
    return SplitMix64::mix(base_seed + (index + 1) * SplitMix64::kGamma);
}

}  // namespace pacs
