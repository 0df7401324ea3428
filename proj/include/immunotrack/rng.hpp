#pragma once

#include <cstdint>
#include <limits>

namespace immunotrack {

/// SplitMix64 finalizer; used to derive independent substream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Small counter-based generator satisfying UniformRandomBitGenerator.
///
/// A run never shares one generator across trackers. Instead every consumer
/// (initial tracker, clone, synthetic series) derives its own stream from the
/// master seed and a tuple of integer coordinates, which keeps results
/// independent of evaluation order and thread count.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept {
        return std::numeric_limits<result_type>::max();
    }

    result_type operator()() noexcept {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

/// Stream tags keep substreams of different purposes disjoint.
enum class StreamTag : std::uint64_t {
    init_population = 1,
    clone = 2,
    synthetic = 3,
};

constexpr std::uint64_t substream_seed(std::uint64_t master, StreamTag tag,
                                       std::uint64_t a = 0, std::uint64_t b = 0,
                                       std::uint64_t c = 0) noexcept {
    std::uint64_t h = mix64(master ^ mix64(static_cast<std::uint64_t>(tag)));
    h = mix64(h ^ a);
    h = mix64(h ^ mix64(b));
    h = mix64(h ^ mix64(mix64(c)));
    return h;
}

inline Rng substream(std::uint64_t master, StreamTag tag, std::uint64_t a = 0,
                     std::uint64_t b = 0, std::uint64_t c = 0) noexcept {
    return Rng{substream_seed(master, tag, a, b, c)};
}

}  // namespace immunotrack
