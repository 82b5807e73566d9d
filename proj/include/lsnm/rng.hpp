#pragma once

#include <cstdint>
#include <random>

namespace lsnm {

// splitmix64 step; used to derive independent seeds from a base seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Deterministic seed derivation: mixes a base seed with up to two stream tags.
// Every random stream in the library is keyed this way so that runs are
// reproducible and sub-streams are independent of scheduling order.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag_a, std::uint64_t tag_b = 0) {
    std::uint64_t s = base;
    (void)splitmix64(s);
    s ^= 0xD1B54A32D192ED03ULL * (tag_a + 1);
    (void)splitmix64(s);
    s ^= 0x8CB92BA72F3D8DD7ULL * (tag_b + 1);
    return splitmix64(s);
}

// Seeded random source. The engine (mt19937_64) has a standard-mandated
// sequence, and all distributions below are implemented on top of raw 64-bit
// draws, so results are identical across platforms and compilers.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1]; safe as a log() argument.
    double uniform01_open_low() { return 1.0 - uniform01(); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Standard normal via Box-Muller (both draws consumed every call).
    double gaussian() {
        double u1 = uniform01_open_low();
        double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace lsnm
