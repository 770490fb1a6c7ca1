#pragma once

#include <cstdint>

namespace growthlab {

/// Splittable counter-style generator. Each (master_seed, stream_index)
/// pair owns an independent stream: the stream key seeds a SplitMix64
/// walk and the Weyl increment itself is derived per stream, so distinct
/// indices produce genuinely different sequences rather than shifted
/// copies of one orbit. Batch code derives one stream per trajectory or
/// per Monte Carlo sample, which makes results independent of thread
/// scheduling.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
        : state_(mix(master_seed ^ mix(stream_index + 0x9e3779b97f4a7c15ull))),
          gamma_(mix(stream_index ^ rotl(master_seed, 31)) | 1ull),
          key_(state_) {}

    std::uint64_t next_u64() {
        state_ += gamma_;
        return mix(state_);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return next_double() < p; }

    /// Derived 64-bit key identifying this stream (stable across replays).
    std::uint64_t stream_key() const { return key_; }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    // Stafford mix13 finalizer.
    static constexpr std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
    std::uint64_t gamma_;
    std::uint64_t key_;
};

} // namespace growthlab
