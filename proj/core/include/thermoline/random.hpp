#pragma once

#include <cstdint>
#include <random>

namespace thermoline::rng {

// One stream per trajectory / Monte Carlo draw. Every stochastic routine in
// the library draws exclusively through this wrapper so that results are a
// pure function of the seed, independent of platform or thread schedule.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    // Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    std::uint64_t raw() { return engine_(); }

  private:
    std::mt19937_64 engine_;
};

// splitmix64 finalizer; decorrelates consecutive seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Seed for the stream owned by trajectory (or Monte Carlo draw) `index`
// under a master seed. This mapping is part of the reproducibility
// contract: it is stable across versions, so a (master_seed, index) pair
// always identifies the same trajectory.
inline std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t index) {
    return splitmix64(master_seed + 0x9E3779B97F4A7C15ull * (index + 1));
}

}  // namespace thermoline::rng
