#pragma once

// Counter-based random number generation (Philox4x32-10). Every variate is
// addressed by an absolute sample index, so disjoint chunks of a stream can
// be generated in any order, on any thread, with bit-identical results.

#include <array>
#include <cstdint>

#include "ldv/types.hpp"

namespace ldv {

/// Stateless gateway to one Philox4x32-10 stream. The (seed, stream_id)
/// pair selects the stream; the per-call index selects the counter block.
class CounterRng {
public:
    explicit CounterRng(RandomSeed s);

    /// Raw 128-bit Philox block for counter `index`.
    std::array<std::uint32_t, 4> block(std::uint64_t index) const;

    /// Uniform double in (0, 1].
    double uniform(std::uint64_t index) const;

    /// Standard normal (Box-Muller, cosine branch).
    double normal(std::uint64_t index) const;

    /// Two independent standard normals from one counter block.
    std::array<double, 2> normal_pair(std::uint64_t index) const;

    /// Unit-mean exponential variate.
    double exponential(std::uint64_t index) const;

private:
    std::uint32_t key_[2];
    std::uint32_t stream_[2];
};

/// Derives a child stream from `base`, keyed by `tag`. Used to hand each
/// noise source / channel / scenario its own independent stream.
RandomSeed derive_stream(RandomSeed base, std::uint64_t tag);

/// SplitMix64 finalizer; exposed for hashing scenario names into stream tags.
std::uint64_t mix64(std::uint64_t x);

} // namespace ldv
