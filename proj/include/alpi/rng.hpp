#pragma once

#include <cstdint>

namespace alpi {

/// Counter-based pseudo-random generator. Every draw is a pure function of
/// (seed, counter), so independently created streams with the same seed are
/// identical regardless of call order, and substreams can be split off
/// without sharing state. That makes parallel experiment cells reproducible.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t next_u64() { return mix(seed_ + golden_ * ++counter_); }

    /// Uniform double in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t next_below(std::uint64_t n) {
        // 128-bit multiply avoids the modulo bias for the n we use here.
        unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Uniform double in [lo, hi).
    double next_in(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    /// Independent generator derived from this one's seed and a stream id.
    CounterRng substream(std::uint64_t stream) const {
        return CounterRng(mix(seed_ ^ mix(stream + golden_)));
    }

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

  private:
    static constexpr std::uint64_t golden_ = 0x9e3779b97f4a7c15ULL;
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

} // namespace alpi
