#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace peca {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Mixes a base seed with a stream index into an independent seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

/// Random source with platform-independent variate generation. Each
/// Monte Carlo replicate gets its own stream keyed by (seed, index), so the
/// sequence a replicate sees never depends on scheduling.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    static Rng stream(std::uint64_t seed, std::uint64_t index) {
        return Rng(derive_seed(seed, index));
    }

    std::uint64_t next() { return engine_(); }

    /// Uniform on the open interval (0, 1).
    double uniform() {
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Uniform integer in [0, bound), bound > 0 (Lemire's rejection method).
    std::uint64_t below(std::uint64_t bound) {
        __uint128_t m = static_cast<__uint128_t>(next()) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                m = static_cast<__uint128_t>(next()) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Exponential(1) draw by inversion.
    double exponential() { return -std::log(uniform()); }

private:
    std::mt19937_64 engine_;
};

}  // namespace peca
